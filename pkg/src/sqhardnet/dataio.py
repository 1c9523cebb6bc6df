"""Delimited output and run manifests.

Floats are written with ``%.17g`` (17 significant digits), which round-trips
IEEE double exactly, so re-running a command from its manifest reproduces
byte-identical CSV files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np


def format_float(v: float) -> str:
    return "%.17g" % float(v)


def write_table(path, header: list[str], rows) -> None:
    """Write a CSV table; floats get 17 significant digits, ints stay ints."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [
                    format_float(v) if isinstance(v, (float, np.floating)) else v
                    for v in row
                ]
            )


def write_samples_csv(path, x: np.ndarray, y: np.ndarray | None = None) -> None:
    """Samples with header x1,...,xn and an optional trailing y column."""
    x = np.asarray(x)
    header = [f"x{j + 1}" for j in range(x.shape[1])]
    if y is None:
        rows = ([float(v) for v in row] for row in x)
    else:
        y = np.asarray(y)
        if y.shape[0] != x.shape[0]:
            raise ValueError("x and y row counts differ")
        header.append("y")
        rows = (
            [float(v) for v in row] + [float(yv)] for row, yv in zip(x, y)
        )
    write_table(path, header, rows)


def read_samples_csv(path) -> tuple[np.ndarray, np.ndarray | None]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        has_y = header[-1] == "y"
        ncols = len(header)
        data = [[float(v) for v in row] for row in reader if row]
    arr = np.array(data, dtype=float).reshape(len(data), ncols)
    if has_y:
        return arr[:, :-1], arr[:, -1]
    return arr, None


def write_manifest(out_dir, subcommand: str, config: dict) -> Path:
    """Record the fully resolved configuration of a run.

    The manifest plus the same tool version is sufficient to re-run the
    command and reproduce its CSV outputs byte for byte.
    """
    from . import __version__

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "manifest.json"
    payload = {
        "tool": "sqhardnet",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_manifest(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
