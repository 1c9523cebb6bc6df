"""Sign-symmetric input distributions.

A distribution D over R^n is *sign-symmetric* when x ~ D implies x∘z ~ D for
every fixed sign vector z in {±1}^n (∘ is the elementwise product).  The three
kinds provided here all have independent, identically distributed coordinates
drawn from a symmetric law, which is more than enough:

- ``standard-gaussian``: N(0, I_n);
- ``rademacher``: uniform on {±1}^n;
- ``gaussian-scale-mixture``: each row picks a component (scale s_j, weight
  p_j) and is then s_j · N(0, I_n).  Finite component lists only.

Sampling is deterministic given (spec, count, seed): rows are produced in
fixed-size chunks, each chunk from its own labeled substream, and concatenated
in chunk order, so the output never depends on how many workers produced it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .seeds import generator

_CHUNK_ROWS = 1 << 17

_KINDS = ("standard-gaussian", "rademacher", "gaussian-scale-mixture")


@dataclass(frozen=True)
class DistributionSpec:
    kind: str
    dim: int
    components: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")
        if self.kind == "gaussian-scale-mixture":
            if not self.components:
                raise ValueError("gaussian-scale-mixture needs components")
            scales = np.array([s for s, _ in self.components])
            weights = np.array([w for _, w in self.components])
            if np.any(scales <= 0):
                raise ValueError("mixture scales must be positive")
            if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
                raise ValueError("mixture weights must be positive and sum to 1")
        elif self.components is not None:
            raise ValueError(f"{self.kind} takes no components")

    @property
    def tag(self) -> str:
        if self.kind != "gaussian-scale-mixture":
            return self.kind
        parts = ";".join(f"{s:g},{w:g}" for s, w in self.components)
        return f"gaussian-scale-mixture:{parts}"


def standard_gaussian(dim: int) -> DistributionSpec:
    return DistributionSpec("standard-gaussian", dim)


def rademacher(dim: int) -> DistributionSpec:
    return DistributionSpec("rademacher", dim)


def gaussian_scale_mixture(
    dim: int, components: list[tuple[float, float]]
) -> DistributionSpec:
    return DistributionSpec(
        "gaussian-scale-mixture", dim, tuple((float(s), float(w)) for s, w in components)
    )


def parse_distribution(text: str, dim: int) -> DistributionSpec:
    """Parse a CLI name: ``standard-gaussian``, ``rademacher``, or
    ``gaussian-scale-mixture:s1,w1;s2,w2;...``."""
    name, _, arg = text.partition(":")
    if name == "standard-gaussian":
        return standard_gaussian(dim)
    if name == "rademacher":
        return rademacher(dim)
    if name == "gaussian-scale-mixture":
        if not arg:
            raise ValueError("gaussian-scale-mixture needs components: s1,w1;s2,w2")
        comps = []
        for piece in arg.split(";"):
            s, w = piece.split(",")
            comps.append((float(s), float(w)))
        return gaussian_scale_mixture(dim, comps)
    raise ValueError(f"unknown distribution {text!r}")


def _sample_chunk(spec: DistributionSpec, rows: int, rng: np.random.Generator):
    if spec.kind == "standard-gaussian":
        return rng.standard_normal((rows, spec.dim))
    if spec.kind == "rademacher":
        return rng.integers(0, 2, size=(rows, spec.dim)).astype(float) * 2.0 - 1.0
    scales = np.array([s for s, _ in spec.components])
    weights = np.array([w for _, w in spec.components])
    which = rng.choice(len(scales), size=rows, p=weights / weights.sum())
    return scales[which, None] * rng.standard_normal((rows, spec.dim))


def sample(spec: DistributionSpec, count: int, seed: int) -> np.ndarray:
    """Draw ``count`` rows from ``spec``; deterministic in (spec, count, seed)."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    chunks = []
    for index, start in enumerate(range(0, count, _CHUNK_ROWS)):
        rows = min(_CHUNK_ROWS, count - start)
        rng = generator(seed, "sample", spec.tag, spec.dim, index)
        chunks.append(_sample_chunk(spec, rows, rng))
    if not chunks:
        return np.empty((0, spec.dim))
    return np.concatenate(chunks, axis=0)


def sign_flip(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Elementwise product x∘z, requiring every entry of z to be ±1."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    if not np.all(np.abs(z) == 1.0):
        raise ValueError("sign vector entries must be exactly +1 or -1")
    return x * z
