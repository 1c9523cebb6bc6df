"""Probabilists' Hermite polynomials and activation expansions.

Conventions.  H_0 = 1, H_1 = x, H_{i+1}(x) = x·H_i(x) − i·H_{i−1}(x); these
are orthogonal under N(0,1) with E[H_i H_j] = δ_ij · i!.  The *normalized*
family H̃_i = H_i/√(i!) is orthonormal, and every square-integrable activation
φ has the expansion φ = Σ_i φ̂_i H̃_i with φ̂_i = E[φ(x) H̃_i(x)].

Normalized evaluation uses the equivalent recurrence
H̃_{i+1} = (x·H̃_i − √i·H̃_{i−1})/√(i+1), which keeps intermediates in range
where the two-step "evaluate then divide by √(i!)" form would overflow.
Bare normalization constants (the closed-form ReLU coefficients) are computed
in log space via lgamma.

Expectations over N(0,1) are computed with Gauss–Hermite quadrature for the
weight e^{−t²} after the change of variables x = √2·t:
E[f(x)] = (1/√π) Σ_j w_j f(√2·t_j).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_hermite

from .activations import ActivationSpec

# Above degree ~300, √(degree!) exceeds the double range; the normalized
# recurrence would survive, but coefficients that small are pure noise anyway.
MAX_DEGREE = 300

DEFAULT_QUADRATURE_NODES = 400


def gauss_hermite_standard_normal(nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Abscissas and weights so that E_{N(0,1)}[f] ≈ Σ w_j f(x_j)."""
    t, w = roots_hermite(nodes)
    return math.sqrt(2.0) * t, w / math.sqrt(math.pi)


def _check_degree(degree: int) -> None:
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if degree > MAX_DEGREE:
        raise ValueError(
            f"degree {degree} exceeds the cap {MAX_DEGREE}: √(degree!) would "
            "overflow the floating range"
        )


def hermite_eval(degree: int, x, normalized: bool = False):
    """H_degree(x), or H̃_degree(x) = H_degree(x)/√(degree!) when normalized."""
    _check_degree(degree)
    x = np.asarray(x, dtype=float)
    if normalized:
        h_prev, h = np.ones_like(x), x.copy()
        if degree == 0:
            return h_prev
        for i in range(1, degree):
            h_prev, h = h, (x * h - math.sqrt(i) * h_prev) / math.sqrt(i + 1)
        return h
    h_prev, h = np.ones_like(x), x.copy()
    if degree == 0:
        return h_prev
    for i in range(1, degree):
        h_prev, h = h, x * h - i * h_prev
    return h


def normalized_hermite_matrix(max_degree: int, x: np.ndarray) -> np.ndarray:
    """Rows i = 0..max_degree of H̃_i evaluated at the points x."""
    _check_degree(max_degree)
    x = np.asarray(x, dtype=float)
    out = np.empty((max_degree + 1, x.size))
    out[0] = 1.0
    if max_degree >= 1:
        out[1] = x
    for i in range(1, max_degree):
        out[i + 1] = (x * out[i] - math.sqrt(i) * out[i - 1]) / math.sqrt(i + 1)
    return out


def log_double_factorial_odd(n: int) -> float:
    """log((2j−1)!!) for odd n = 2j−1 ≥ −1, with (−1)!! = 1."""
    if n == -1:
        return 0.0
    j = (n + 1) // 2
    return math.lgamma(2 * j + 1) - j * math.log(2.0) - math.lgamma(j + 1)


def relu_hermite_coeff(degree: int) -> float:
    """Closed-form normalized Hermite coefficient of relu under N(0,1).

    c_0 = √(1/2π), c_1 = 1/2, odd degrees ≥ 3 vanish, and even degrees 2m
    reduce to (−1)^{m+1} (2m−3)!!/√(2π·(2m)!), evaluated in log space.
    """
    _check_degree(degree)
    if degree == 0:
        return math.sqrt(1.0 / (2.0 * math.pi))
    if degree == 1:
        return 0.5
    if degree % 2 == 1:
        return 0.0
    m = degree // 2
    log_mag = (
        log_double_factorial_odd(2 * m - 3)
        - 0.5 * (math.log(2.0 * math.pi) + math.lgamma(2 * m + 1))
    )
    return (-1.0) ** (m + 1) * math.exp(log_mag)


@dataclass(frozen=True)
class HermiteSeries:
    """Normalized-Hermite coefficients of a named activation, degrees 0..D."""

    coeffs: np.ndarray
    activation_tag: str
    squared_norm: float = field(default=float("nan"))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        if self.coeffs.ndim != 1 or self.coeffs.size == 0:
            raise ValueError("coeffs must be a nonempty 1-d array")
        if math.isfinite(self.squared_norm):
            # Bessel: partial sums of squared coefficients cannot exceed ‖φ‖².
            if float(np.sum(self.coeffs**2)) > self.squared_norm + 1e-9:
                raise ValueError("coefficient mass exceeds the activation norm")

    @property
    def max_degree(self) -> int:
        return self.coeffs.size - 1


def hermite_coeffs_quadrature(
    activation: ActivationSpec,
    max_degree: int,
    nodes: int = DEFAULT_QUADRATURE_NODES,
) -> HermiteSeries:
    """Coefficients φ̂_i = E[φ(x)·H̃_i(x)], i ≤ max_degree, by quadrature.

    Requires nodes ≥ 2·max_degree + 20 so the rule integrates the full
    polynomial degree content with headroom.
    """
    _check_degree(max_degree)
    if nodes < 2 * max_degree + 20:
        raise ValueError(
            f"{nodes} quadrature nodes insufficient for degree {max_degree}; "
            f"need at least {2 * max_degree + 20}"
        )
    x, w = gauss_hermite_standard_normal(nodes)
    values = activation(x)
    basis = normalized_hermite_matrix(max_degree, x)
    coeffs = basis @ (w * values)
    squared_norm = float(np.dot(w, values * values))
    return HermiteSeries(coeffs, activation.tag, squared_norm)


def relu_hermite_series(max_degree: int) -> HermiteSeries:
    """Closed-form relu series (exact coefficients, ‖relu‖² = 1/2)."""
    coeffs = np.array([relu_hermite_coeff(i) for i in range(max_degree + 1)])
    return HermiteSeries(coeffs, "relu", 0.5)
