"""The orthogonal concept family.

A family is indexed by the k-subsets S of {0,…,n−1}.  For a sign pattern
w ∈ {±1}^k write χ(w) = ∏_j w_j.  The member attached to S is

    f_S(x) = ψ( g_S(x) ),   g_S(x) = Σ_{w ∈ {±1}^k} χ(w) · φ(⟨w, x_S⟩/√k),

a one-layer network with 2^k φ-units on the coordinates S and an odd outer
activation ψ.  Because replacing x by x∘z permutes the inner terms, g and f
pick up exactly the factor χ_S(z) = ∏_{j∈S} z_j:

    f_S(x∘z) = χ_S(z) · f_S(x),

which is what makes distinct members orthogonal under every sign-symmetric
input distribution.

Sign patterns are enumerated by the k-bit integers 0 … 2^k−1 in increasing
order, bit b = 0 meaning +1, most significant bit first; sums always run in
that fixed order, so evaluations are bit-reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .activations import ActivationSpec
from .seeds import generator


@dataclass(frozen=True)
class FamilySpec:
    n: int
    k: int
    inner: ActivationSpec
    outer: ActivationSpec

    def __post_init__(self):
        if not 1 <= self.k <= self.n:
            raise ValueError("need 1 <= k <= n")
        if self.k > 30:
            raise ValueError("k > 30: sign-pattern enumeration would overflow")
        if not self.outer.declared_odd:
            raise ValueError("outer activation must be declared odd")

    @property
    def units(self) -> int:
        """Hidden units per member: one per sign pattern, 2^k."""
        return 1 << self.k


@dataclass(frozen=True)
class ConceptId:
    """A k-subset of coordinate indices (0-based, strictly increasing)."""

    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(idx) == 0 or any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("indices must be nonempty and strictly increasing")
        if idx[0] < 0:
            raise ValueError("indices must be nonnegative")

    def validate_for(self, spec: FamilySpec) -> None:
        if len(self.indices) != spec.k:
            raise ValueError(f"concept has {len(self.indices)} indices, spec.k = {spec.k}")
        if self.indices[-1] >= spec.n:
            raise ValueError("concept index out of range for spec.n")


def parity(w) -> float:
    """χ(w) = product of the entries of a ±1 vector."""
    w = np.asarray(w, dtype=float)
    if not np.all(np.abs(w) == 1.0):
        raise ValueError("sign pattern entries must be exactly +1 or -1")
    return float(np.prod(w))


@lru_cache(maxsize=None)
def _patterns_and_parities(k: int) -> tuple[np.ndarray, np.ndarray]:
    codes = np.arange(1 << k, dtype=np.uint32)
    bits = (codes[:, None] >> np.arange(k - 1, -1, -1, dtype=np.uint32)) & 1
    patterns = 1.0 - 2.0 * bits.astype(float)
    parities = np.prod(patterns, axis=1)
    return patterns, parities


def sign_patterns(k: int) -> np.ndarray:
    """All 2^k sign patterns, fixed enumeration order (read-only view)."""
    return _patterns_and_parities(k)[0]


def eval_inner_cols(spec: FamilySpec, x_cols: np.ndarray) -> np.ndarray:
    """g evaluated on pre-restricted inputs of shape (rows, k)."""
    x_cols = np.atleast_2d(np.asarray(x_cols, dtype=float))
    if x_cols.shape[1] != spec.k:
        raise ValueError(f"expected {spec.k} columns, got {x_cols.shape[1]}")
    patterns, parities = _patterns_and_parities(spec.k)
    z = x_cols @ patterns.T / math.sqrt(spec.k)
    return spec.inner(z) @ parities


def eval_inner(spec: FamilySpec, concept: ConceptId, x: np.ndarray) -> np.ndarray:
    """g_S(x) for each row of x (shape (rows, n) or (n,))."""
    concept.validate_for(spec)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != spec.n:
        raise ValueError(f"expected {spec.n} input columns, got {x.shape[1]}")
    return eval_inner_cols(spec, x[:, list(concept.indices)])


def eval_concept(spec: FamilySpec, concept: ConceptId, x: np.ndarray) -> np.ndarray:
    """f_S(x) = ψ(g_S(x)) for each row of x."""
    return spec.outer(eval_inner(spec, concept, x))


def enumerate_family(n: int, k: int) -> list[ConceptId]:
    """All C(n,k) concepts in lexicographic index order."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    return [ConceptId(c) for c in itertools.combinations(range(n), k)]


def family_size(n: int, k: int) -> int:
    return math.comb(n, k)


def sample_labels(
    spec: FamilySpec,
    concept: ConceptId,
    x: np.ndarray,
    mode: str,
    seed: int,
) -> np.ndarray:
    """Labels for the rows of x.

    - ``regression``: y = f_S(x) exactly.
    - ``p-concept``: y ∈ {±1} with P[y = +1 | x] = (1 + f_S(x))/2, which
      requires the outer activation to have a declared range inside [−1, 1]
      (values are never clamped; out-of-range activations are rejected).
    """
    values = eval_concept(spec, concept, x)
    if mode == "regression":
        return values
    if mode != "p-concept":
        raise ValueError(f"unknown label mode {mode!r}")
    rng_range = spec.outer.declared_range
    if rng_range is None or rng_range[0] < -1.0 or rng_range[1] > 1.0:
        raise ValueError(
            "p-concept labels need an outer activation with declared range "
            "inside [-1, 1]"
        )
    rng = generator(seed, "labels", spec.outer.tag, concept.indices)
    u = rng.uniform(size=values.shape[0])
    return np.where(u < (1.0 + values) / 2.0, 1.0, -1.0)
