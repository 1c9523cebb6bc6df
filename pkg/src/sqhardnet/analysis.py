"""Numerical verification: norms, bounds, correlations, and query arithmetic.

Everything here is either exact combinatorics (big-integer multinomial sums),
closed-form bound arithmetic, or Monte-Carlo estimation with explicit standard
errors.  MC estimates are returned as :class:`EstimateWithError`; callers
decide the acceptance slack (the test suites use 4·stderr).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import distributions as dist_mod
from .distributions import DistributionSpec, standard_gaussian
from .family import ConceptId, FamilySpec, enumerate_family, eval_concept, eval_inner_cols
from .hermite import HermiteSeries
from .seeds import generator

_CHUNK_ROWS = 1 << 17


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    stderr: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 2:
            raise ValueError("need at least 2 samples for a standard error")


def _welford_rows(values_by_chunk) -> EstimateWithError:
    count, mean, m2 = 0, 0.0, 0.0
    for v in values_by_chunk:
        v = np.asarray(v, dtype=float)
        cn = v.size
        if cn == 0:
            continue
        cmean = float(v.mean())
        cm2 = float(((v - cmean) ** 2).sum())
        delta = cmean - mean
        total = count + cn
        mean += delta * cn / total
        m2 += cm2 + delta * delta * count * cn / total
        count = total
    if count < 2:
        raise ValueError("need at least 2 samples")
    var = m2 / (count - 1)
    return EstimateWithError(mean, math.sqrt(max(var, 0.0) / count), count)


def mc_mean(fn, x: np.ndarray, chunk_rows: int = _CHUNK_ROWS) -> EstimateWithError:
    """Chunked mean/stderr of fn(rows) over a fixed sample array."""
    n = x.shape[0]
    return _welford_rows(
        fn(x[start : start + chunk_rows]) for start in range(0, n, chunk_rows)
    )


# ---------------------------------------------------------------------------
# Exact combinatorics and series arithmetic
# ---------------------------------------------------------------------------

def odd_multinomial_sum(total: int, parts: int) -> int:
    """Σ multinomial(total; i_1..i_parts) over compositions into odd parts.

    Exact big-integer value via inclusion–exclusion over coordinate signs:
    2^{-parts} Σ_j (−1)^j C(parts, j) (parts − 2j)^total.  The sum is positive
    exactly when total ≥ parts and total ≡ parts (mod 2).
    """
    if total < 0 or parts < 0:
        raise ValueError("total and parts must be nonnegative")
    if parts == 0:
        return 1 if total == 0 else 0
    acc = sum(
        (-1) ** j * math.comb(parts, j) * (parts - 2 * j) ** total
        for j in range(parts + 1)
    )
    if acc % (1 << parts):
        raise ArithmeticError("inclusion-exclusion sum not divisible by 2^parts")
    return acc >> parts


@dataclass(frozen=True)
class SeriesMoment:
    value: float
    tail_truncated: bool


def second_moment_series(
    spec: FamilySpec, series: HermiteSeries, max_degree: int = 40
) -> SeriesMoment:
    """E[g²] = 4^k Σ_i (φ̂_i²/k^i)·odd_multinomial_sum(i, k), summed to max_degree.

    All terms are nonnegative, so the partial sum is a certified lower bound;
    ``tail_truncated`` reports whether any *known* coefficient beyond
    max_degree (at the contributing parity, degree ≥ k) was dropped.
    """
    if series.activation_tag != spec.inner.tag:
        raise ValueError(
            f"series is for {series.activation_tag!r}, spec.inner is {spec.inner.tag!r}"
        )
    k = spec.k
    top = min(max_degree, series.max_degree)
    total = 0.0
    for i in range(top + 1):
        c = float(series.coeffs[i])
        if c == 0.0:
            continue
        total += c * c * (odd_multinomial_sum(i, k) / k**i)
    dropped = any(
        series.coeffs[i] != 0.0 and i >= k and (i - k) % 2 == 0
        for i in range(top + 1, series.max_degree + 1)
    )
    return SeriesMoment(4.0**k * total, dropped)


# ---------------------------------------------------------------------------
# Monte-Carlo inner products
# ---------------------------------------------------------------------------

def mc_inner_product(
    spec: FamilySpec,
    concept_a: ConceptId,
    concept_b: ConceptId,
    dist: DistributionSpec,
    n_samples: int,
    seed: int,
) -> EstimateWithError:
    """Plain MC estimate of ⟨f_A, f_B⟩_D = E[f_A(x)·f_B(x)]."""
    if dist.dim != spec.n:
        raise ValueError("distribution dimension must equal spec.n")
    x = dist_mod.sample(dist, n_samples, seed)
    return mc_mean(
        lambda rows: eval_concept(spec, concept_a, rows)
        * eval_concept(spec, concept_b, rows),
        x,
    )


def symmetrized_inner_product(
    spec: FamilySpec,
    concept_a: ConceptId,
    concept_b: ConceptId,
    dist: DistributionSpec,
    n_samples: int,
    seed: int,
) -> EstimateWithError:
    """Sign-symmetrized MC estimate of ⟨f_A, f_B⟩_D.

    Each sample is averaged over all sign flips of the coordinate union
    S_A ∪ S_B.  For A ≠ B the per-sample average is identically zero (the
    parities of A and B disagree on some flipped coordinate), so the estimate
    vanishes to floating roundoff with any sample count; for A = B it is a
    variance-reduced norm estimate.
    """
    union = sorted(set(concept_a.indices) | set(concept_b.indices))
    if len(union) > 26:
        raise ValueError("coordinate union too large to symmetrize (max 26)")
    if dist.dim != spec.n:
        raise ValueError("distribution dimension must equal spec.n")
    pos = {j: p for p, j in enumerate(union)}
    local_a = [pos[j] for j in concept_a.indices]
    local_b = [pos[j] for j in concept_b.indices]
    x = dist_mod.sample(dist, n_samples, seed)[:, union]
    u = len(union)
    codes = np.arange(1 << u, dtype=np.uint32)
    flips = 1.0 - 2.0 * ((codes[:, None] >> np.arange(u - 1, -1, -1, dtype=np.uint32)) & 1)

    def per_sample(rows):
        acc = np.zeros(rows.shape[0])
        for z in flips:
            flipped = rows * z
            fa = spec.outer(eval_inner_cols(spec, flipped[:, local_a]))
            fb = spec.outer(eval_inner_cols(spec, flipped[:, local_b]))
            acc += fa * fb
        return acc / flips.shape[0]

    return mc_mean(per_sample, x, chunk_rows=max(1, _CHUNK_ROWS >> u))


def average_correlation(
    spec: FamilySpec,
    concepts: list[ConceptId],
    dist: DistributionSpec,
    n_samples: int,
    seed: int,
) -> float:
    """ρ̂_D(C) = |C|^{-2} Σ_{a,b} |⟨f_a, f_b⟩_D| with the diagonal included."""
    if dist.dim != spec.n:
        raise ValueError("distribution dimension must equal spec.n")
    x = dist_mod.sample(dist, n_samples, seed)
    values = np.column_stack([eval_concept(spec, c, x) for c in concepts])
    gram = values.T @ values / x.shape[0]
    return float(np.abs(gram).mean())


# ---------------------------------------------------------------------------
# Closed-form bounds and their MC counterparts
# ---------------------------------------------------------------------------

def relu_norm_lower_bound(k: int) -> float:
    """4^k c_k² k!/k^k, the guaranteed E[g²] lower bound for relu inner, k even.

    For odd k ≥ 3 no such bound exists: relu's odd-degree coefficients above
    degree 1 vanish, so g is identically zero there.
    """
    if k < 2 or k % 2:
        raise ValueError("bound holds for even k >= 2 only")
    from .hermite import relu_hermite_coeff

    c_k = relu_hermite_coeff(k)
    return 4.0**k * c_k * c_k * math.exp(math.lgamma(k + 1) - k * math.log(k))


def truncation_norm_bound(k: int, threshold: float) -> float:
    """Certified bound on ‖g − g^T‖ when relu is clipped at T = threshold."""
    if k < 1 or threshold <= 0:
        raise ValueError("need k >= 1 and threshold > 0")
    t = float(threshold)
    inner = t * t + 1.0 - t / math.sqrt(2.0 * math.pi)
    return 2.0**k * math.exp(-t * t / 4.0) * math.sqrt(inner)


def truncation_prob_bound(k: int, threshold: float) -> float:
    """Certified bound on P[g(x) ≠ g^T(x)]."""
    if k < 1 or threshold <= 0:
        raise ValueError("need k >= 1 and threshold > 0")
    return 2.0**k * math.exp(-threshold * threshold / 2.0)


@dataclass(frozen=True)
class TruncationGap:
    norm: EstimateWithError
    mismatch_prob: EstimateWithError


def mc_truncation_gap(k: int, threshold: float, n_samples: int, seed: int) -> TruncationGap:
    """MC estimates of ‖g − g^T‖ and P[g ≠ g^T] under N(0, I_k).

    The norm estimate is √(mean of (g−g^T)²) with a delta-method stderr;
    when no sampled point differs, both estimates are exactly zero.
    """
    from .activations import identity, relu, truncated_relu

    spec = FamilySpec(k, k, relu(), identity())
    spec_t = FamilySpec(k, k, truncated_relu(threshold), identity())
    x = dist_mod.sample(standard_gaussian(k), n_samples, seed)

    sq = mc_mean(
        lambda rows: (eval_inner_cols(spec, rows) - eval_inner_cols(spec_t, rows)) ** 2,
        x,
    )
    freq = mc_mean(
        lambda rows: (
            eval_inner_cols(spec, rows) != eval_inner_cols(spec_t, rows)
        ).astype(float),
        x,
    )
    norm_value = math.sqrt(max(sq.value, 0.0))
    norm_stderr = sq.stderr / (2.0 * norm_value) if norm_value > 0 else 0.0
    return TruncationGap(
        EstimateWithError(norm_value, norm_stderr, sq.n_samples), freq
    )


def anticoncentration_estimate(
    spec: FamilySpec,
    dist: DistributionSpec,
    n_samples: int,
    seed: int,
    threshold: float = 1.0,
) -> EstimateWithError:
    """Frequency of |g(x)| ≥ threshold with a binomial standard error."""
    if dist.dim != spec.n:
        raise ValueError("distribution dimension must equal spec.n")
    cols = list(range(spec.k))  # any k-subset works; coordinates are exchangeable
    x = dist_mod.sample(dist, n_samples, seed)
    hits = 0
    for start in range(0, n_samples, _CHUNK_ROWS):
        g = eval_inner_cols(spec, x[start : start + _CHUNK_ROWS, cols])
        hits += int(np.count_nonzero(np.abs(g) >= threshold))
    p = hits / n_samples
    stderr = math.sqrt(max(p * (1.0 - p), 0.0) / n_samples)
    return EstimateWithError(p, stderr, n_samples)


# ---------------------------------------------------------------------------
# Statistical-dimension arithmetic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SDAParams:
    """Inputs to the statistical-dimension lower bound.

    class_size: |C|; beta: uniform bound on squared norms ⟨c,c⟩_D;
    gamma: uniform bound on off-diagonal |⟨c,c'⟩_D|; gamma_prime: the slack
    above gamma at which the dimension is evaluated (the SDA threshold is
    gamma + gamma_prime); tau/epsilon: query tolerance and accuracy targets
    used by the per-mode preconditions of :func:`query_count_bound`.
    """

    class_size: int
    beta: float
    gamma: float
    gamma_prime: float
    tau: float | None = None
    epsilon: float | None = None

    def __post_init__(self):
        if self.class_size < 1:
            raise ValueError("class_size must be positive")
        if self.gamma < 0 or self.gamma_prime <= 0:
            raise ValueError("need gamma >= 0 and gamma_prime > 0")
        if self.beta <= self.gamma:
            raise ValueError("need beta > gamma")


def sda_lower_bound(params: SDAParams) -> float:
    """d = |C|·γ′/(β−γ), the statistical-dimension lower bound at threshold γ+γ′."""
    return params.class_size * params.gamma_prime / (params.beta - params.gamma)


def query_count_bound(params: SDAParams, mode: str) -> int:
    """Minimum number of tolerance-τ statistical queries forced by the bound.

    - ``l2``      (learn to ‖c̃−c‖ ≤ ε with all norms ≥ 3ε): requires τ ≤ ε²;
    - ``weak``    (advantage ε over random guessing): requires τ ≤ ε/2;
    - ``real-valued`` (zero-responding adversary): requires τ = √(γ+γ′).

    l2/weak force ⌊d⌋−1 queries, real-valued forces ⌊d/2⌋.
    """
    d = sda_lower_bound(params)
    if mode in ("l2", "weak"):
        if params.tau is None or params.epsilon is None:
            raise ValueError(f"mode {mode!r} needs tau and epsilon")
        if mode == "l2" and params.tau > params.epsilon**2:
            raise ValueError("l2 mode requires tau <= epsilon^2")
        if mode == "weak" and params.tau > params.epsilon / 2.0:
            raise ValueError("weak mode requires tau <= epsilon/2")
        return max(0, math.floor(d) - 1)
    if mode == "real-valued":
        if params.tau is None:
            raise ValueError("real-valued mode needs tau")
        want = math.sqrt(params.gamma + params.gamma_prime)
        if abs(params.tau - want) > 1e-9 * max(1.0, want):
            raise ValueError("real-valued mode requires tau = sqrt(gamma + gamma_prime)")
        return max(0, math.floor(d / 2.0))
    raise ValueError(f"unknown mode {mode!r}")


# ---------------------------------------------------------------------------
# Report rows shared by the verify CLI and the acceptance suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckRow:
    name: str
    value: float
    reference: float
    tolerance: float
    passed: bool
    detail: str = ""


def _row(name, value, reference, tolerance, detail="") -> CheckRow:
    return CheckRow(
        name, float(value), float(reference), float(tolerance),
        abs(float(value) - float(reference)) <= float(tolerance), detail,
    )


def orthogonality_report(
    spec: FamilySpec,
    dist: DistributionSpec,
    pair_count: int,
    mc_samples: int,
    seed: int,
    sym_samples: int = 64,
    sym_tolerance: float = 1e-10,
) -> list[CheckRow]:
    """Check ⟨f_S, f_T⟩_D = 0 for random S ≠ T two ways per pair.

    The symmetrized estimate must vanish to ``sym_tolerance``; the plain MC
    estimate must sit within 4 standard errors of zero.
    """
    rng = generator(seed, "orthogonality-pairs", spec.inner.tag, spec.outer.tag, dist.tag)
    concepts = enumerate_family(spec.n, spec.k)
    rows = []
    for p in range(pair_count):
        ia, ib = rng.choice(len(concepts), size=2, replace=False)
        a, b = concepts[int(ia)], concepts[int(ib)]
        tag = f"S={a.indices} T={b.indices} dist={dist.tag}"
        sym = symmetrized_inner_product(spec, a, b, dist, sym_samples, seed + 1)
        rows.append(_row(f"sym[{p}]", sym.value, 0.0, sym_tolerance, tag))
        mc = mc_inner_product(spec, a, b, dist, mc_samples, seed + 2)
        rows.append(_row(f"mc[{p}]", mc.value, 0.0, 4.0 * mc.stderr, tag))
    return rows


def second_moment_report(
    spec: FamilySpec,
    series: HermiteSeries,
    max_degree: int,
    mc_samples: int,
    seed: int,
) -> list[CheckRow]:
    """Series E[g²] vs Monte-Carlo at max(4·stderr, 1% relative)."""
    moment = second_moment_series(spec, series, max_degree)
    x = dist_mod.sample(standard_gaussian(spec.k), mc_samples, seed)
    mc = mc_mean(lambda rows: eval_inner_cols(spec, rows[:, : spec.k]) ** 2, x)
    tol = max(4.0 * mc.stderr, 0.01 * abs(moment.value))
    detail = f"k={spec.k} inner={spec.inner.tag} tail_truncated={moment.tail_truncated}"
    return [_row("second-moment", moment.value, mc.value, tol, detail)]


def truncation_report(k: int, threshold: float, mc_samples: int, seed: int) -> list[CheckRow]:
    """Certified truncation bounds must dominate MC estimates (4·stderr slack)."""
    gap = mc_truncation_gap(k, threshold, mc_samples, seed)
    nb = truncation_norm_bound(k, threshold)
    pb = truncation_prob_bound(k, threshold)
    rows = [
        CheckRow(
            "trunc-norm",
            gap.norm.value,
            nb,
            4.0 * gap.norm.stderr,
            gap.norm.value <= nb + 4.0 * gap.norm.stderr,
            f"k={k} T={threshold:g}",
        ),
        CheckRow(
            "trunc-prob",
            gap.mismatch_prob.value,
            pb,
            4.0 * gap.mismatch_prob.stderr,
            gap.mismatch_prob.value <= pb + 4.0 * gap.mismatch_prob.stderr,
            f"k={k} T={threshold:g}",
        ),
    ]
    return rows


def anticoncentration_report(
    spec: FamilySpec, mc_samples: int, seed: int, threshold: float = 1.0
) -> list[CheckRow]:
    est = anticoncentration_estimate(
        spec, standard_gaussian(spec.n), mc_samples, seed, threshold
    )
    detail = f"k={spec.k} inner={spec.inner.tag} threshold={threshold:g}"
    return [
        CheckRow(
            "anticoncentration", est.value, 0.0, 4.0 * est.stderr,
            est.value > 0.0, detail,
        )
    ]
