"""Pointwise activation functions with declared analytic properties.

An :class:`ActivationSpec` is a value object naming one of a fixed set of
scalar activations together with the properties other modules rely on:
``declared_odd`` (used by the family construction, which needs an odd outer
activation) and ``declared_range`` (used to decide whether a function can act
as a conditional class-probability shift, which must land in [-1, 1]).

Supported kinds: relu, truncated-relu (parameter T), sigmoid, tanh, sign,
identity, constant (parameter c).  ``sign`` uses the convention sign(0) = +1
so that label maps are total.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_KINDS = ("relu", "truncated-relu", "sigmoid", "tanh", "sign", "identity", "constant")


@dataclass(frozen=True)
class ActivationSpec:
    kind: str
    param: float | None = None
    declared_odd: bool = False
    declared_range: tuple[float, float] | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown activation kind {self.kind!r}")
        if self.kind == "truncated-relu":
            if self.param is None or self.param <= 0:
                raise ValueError("truncated-relu needs a positive threshold")
        elif self.kind == "constant":
            if self.param is None:
                raise ValueError("constant needs a value")
        elif self.param is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    @property
    def tag(self) -> str:
        """Stable string identifier, e.g. ``relu`` or ``truncated-relu(3)``."""
        if self.param is None:
            return self.kind
        return f"{self.kind}({self.param:g})"

    def __call__(self, x):
        x = np.asarray(x)
        if self.kind == "relu":
            return np.maximum(x, 0.0)
        if self.kind == "truncated-relu":
            return np.clip(x, 0.0, self.param)
        if self.kind == "sigmoid":
            # stable logistic: exp of a nonpositive argument only
            out = np.empty_like(x, dtype=float)
            pos = x >= 0
            out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
            ex = np.exp(x[~pos])
            out[~pos] = ex / (1.0 + ex)
            return out
        if self.kind == "tanh":
            return np.tanh(x)
        if self.kind == "sign":
            return np.where(x >= 0, 1.0, -1.0)
        if self.kind == "identity":
            return x + 0.0
        return np.full_like(x, self.param, dtype=float)

    def grad(self, x):
        """Pointwise derivative (a.e. for the kinked/discontinuous kinds)."""
        x = np.asarray(x)
        if self.kind == "relu":
            return (x > 0).astype(x.dtype if x.dtype.kind == "f" else float)
        if self.kind == "truncated-relu":
            inside = (x > 0) & (x < self.param)
            return inside.astype(float)
        if self.kind == "sigmoid":
            s = self(x)
            return s * (1.0 - s)
        if self.kind == "tanh":
            t = np.tanh(x)
            return 1.0 - t * t
        if self.kind in ("sign", "constant"):
            return np.zeros_like(x, dtype=float)
        return np.ones_like(x, dtype=float)


def relu() -> ActivationSpec:
    return ActivationSpec("relu")


def truncated_relu(threshold: float) -> ActivationSpec:
    return ActivationSpec(
        "truncated-relu", float(threshold), declared_range=(0.0, float(threshold))
    )


def sigmoid() -> ActivationSpec:
    return ActivationSpec("sigmoid", declared_range=(0.0, 1.0))


def tanh() -> ActivationSpec:
    return ActivationSpec("tanh", declared_odd=True, declared_range=(-1.0, 1.0))


def sign() -> ActivationSpec:
    return ActivationSpec("sign", declared_odd=True, declared_range=(-1.0, 1.0))


def identity() -> ActivationSpec:
    return ActivationSpec("identity", declared_odd=True)


def constant(value: float) -> ActivationSpec:
    v = float(value)
    return ActivationSpec("constant", v, declared_odd=(v == 0.0), declared_range=(v, v))


def parse_activation(text: str) -> ActivationSpec:
    """Parse a CLI name: ``relu``, ``tanh``, ..., ``truncated-relu:T``, ``constant:c``."""
    name, _, arg = text.partition(":")
    simple = {
        "relu": relu,
        "sigmoid": sigmoid,
        "tanh": tanh,
        "sign": sign,
        "identity": identity,
    }
    if name in simple:
        if arg:
            raise ValueError(f"activation {name!r} takes no parameter")
        return simple[name]()
    if name == "truncated-relu":
        if not arg:
            raise ValueError("truncated-relu needs a threshold, e.g. truncated-relu:6")
        return truncated_relu(float(arg))
    if name == "constant":
        if not arg:
            raise ValueError("constant needs a value, e.g. constant:0.5")
        return constant(float(arg))
    raise ValueError(f"unknown activation {text!r}")
