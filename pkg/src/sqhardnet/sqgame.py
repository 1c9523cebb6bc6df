"""Statistical-query oracles, distinguishing games, and GD via queries.

The statistical-query model here answers E_{D_c}[h(x, y)] for query functions
h with ‖h(·, y)‖_D ≤ 1 for each label value, up to a tolerance τ.  Labeled
worlds D_c draw x from the marginal D and y from the p-concept/regression
rule of a family member c; the unlabeled world D_0 draws y as an independent
uniform sign.

Three answering policies:

- ``truthful-mc``: Monte-Carlo estimate over a dataset drawn once from the
  labeled world; the sample budget must make 3·stderr ≤ τ, checked at answer
  time.
- ``adversary-d0``: answers E_{D_0}[h]; exactly 0 for inner-product queries
  g(x)·y, an MC estimate over the marginal for general queries.
- ``adversary-zero``: answers 0 to everything (consistent with the target
  being the zero function).

Query norms are certified empirically on the squared scale: the query is
rejected unless mean(g²) ≤ 1 + 3·stderr.  Inside :func:`gd_via_sq` the
per-coordinate gradient queries are instead rescaled to unit norm and the
response corrected back, with every rescale recorded in the trace — that is
the documented normalization convention for gradient estimation; everywhere
else rejection is the rule.
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import distributions as dist_mod
from .analysis import EstimateWithError, mc_mean
from .distributions import DistributionSpec, standard_gaussian
from .family import ConceptId, FamilySpec, eval_concept, sample_labels
from .hermite import gauss_hermite_standard_normal
from .seeds import generator
from .training import MLPParams, forward, grad_sq_loss


@dataclass(frozen=True)
class TargetSpec:
    family: FamilySpec
    concept: ConceptId
    label_mode: str  # "p-concept" | "regression"

    def __post_init__(self):
        self.concept.validate_for(self.family)
        if self.label_mode not in ("p-concept", "regression"):
            raise ValueError(f"unknown label mode {self.label_mode!r}")


@dataclass(frozen=True)
class SQQuery:
    """A statistical query.

    ``inner-product`` queries supply fn(x) and are understood as h(x,y) =
    fn(x)·y; ``general`` queries supply fn(x, y) for y ∈ {+1, −1}.  ``support``
    optionally names the coordinates fn actually reads, which lets the
    low-dimensional expectation engine integrate it exactly.
    """

    kind: str
    fn: Callable
    support: tuple[int, ...] | None = None
    description: str = ""

    def __post_init__(self):
        if self.kind not in ("inner-product", "general"):
            raise ValueError(f"unknown query kind {self.kind!r}")


def label_odd_part(query: SQQuery) -> SQQuery:
    """The x-function ĥ with ⟨ĥ, c⟩_D = E_{D_c}[h] − E_{D_0}[h].

    For a general query this is x ↦ (h(x,+1) − h(x,−1))/2; an inner-product
    query is its own odd part.
    """
    if query.kind == "inner-product":
        return query
    fn = query.fn
    return SQQuery(
        "inner-product",
        lambda x: (fn(x, 1.0) - fn(x, -1.0)) / 2.0,
        query.support,
        f"label-odd-part({query.description})",
    )


# ---------------------------------------------------------------------------
# Oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OracleConfig:
    tolerance: float
    policy: str  # "truthful-mc" | "adversary-d0" | "adversary-zero"
    dist: DistributionSpec
    target: TargetSpec | None = None
    sample_budget: int = 1 << 16
    seed: int = 0
    antithetic: bool = False

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.policy not in ("truthful-mc", "adversary-d0", "adversary-zero"):
            raise ValueError(f"unknown oracle policy {self.policy!r}")
        if self.policy == "truthful-mc" and self.target is None:
            raise ValueError("truthful-mc needs a target")
        if self.sample_budget < 2:
            raise ValueError("sample budget too small")
        if self.antithetic and self.sample_budget % 2:
            raise ValueError("antithetic sampling needs an even budget")


class SQOracle:
    """Answers statistical queries under one of the three policies.

    The marginal sample (and, for the truthful policy, its labels) is drawn
    once at construction from the labeled seed stream; answers are then
    deterministic.  With ``antithetic=True`` the marginal sample is the
    sign-paired set [x; −x], which keeps empirical expectations of odd
    integrands exactly zero.
    """

    def __init__(self, config: OracleConfig):
        self.config = config
        budget = config.sample_budget
        if config.antithetic:
            half = dist_mod.sample(config.dist, budget // 2, config.seed)
            self.xs = np.concatenate([half, -half], axis=0)
        else:
            self.xs = dist_mod.sample(config.dist, budget, config.seed)
        if config.policy == "truthful-mc":
            t = config.target
            self.ys = sample_labels(t.family, t.concept, self.xs, t.label_mode, config.seed)
        else:
            self.ys = None

    def dataset(self) -> tuple[np.ndarray, np.ndarray | None]:
        return self.xs, self.ys

    def _certify_columns(self, values: np.ndarray, rescale: bool) -> tuple[np.ndarray, np.ndarray, int]:
        """Certify ‖column‖ ≤ 1; return (scaled values, scales, rescale count)."""
        n = values.shape[0]
        sq = values * values
        norm_sq = sq.mean(axis=0)
        norm_sq_stderr = sq.std(axis=0, ddof=1) / math.sqrt(n)
        over = norm_sq > 1.0 + 3.0 * norm_sq_stderr
        if not rescale:
            if np.any(over):
                raise ValueError(
                    "query norm certification failed: empirical squared norm "
                    f"{float(norm_sq.max()):.6g} exceeds 1 beyond 3·stderr"
                )
            return values, np.ones(values.shape[1]), 0
        scales = np.where(over, np.sqrt(np.maximum(norm_sq, 1e-300)), 1.0)
        return values / scales, scales, int(np.count_nonzero(over))

    def answer_columns(
        self, values: np.ndarray, rescale: bool = False
    ) -> tuple[np.ndarray, int]:
        """Answer one inner-product query per column of ``values``.

        ``values[i, j]`` is g_j evaluated at the oracle's i-th marginal
        sample.  Returns the per-column answers on the *original* scale (the
        rescale convention divides the query by its norm and multiplies the
        response back) plus the number of rescaled columns.
        """
        values = np.atleast_2d(np.asarray(values, dtype=float))
        if values.shape[0] != self.xs.shape[0]:
            raise ValueError("query values must be evaluated on the oracle sample")
        scaled, scales, rescaled = self._certify_columns(values, rescale)
        if self.config.policy in ("adversary-zero", "adversary-d0"):
            # E_{D_0}[g(x)·y] = 0 exactly: labels are independent uniform signs.
            return np.zeros(values.shape[1]), rescaled
        prods = scaled * self.ys[:, None]
        means = prods.mean(axis=0)
        stderrs = prods.std(axis=0, ddof=1) / math.sqrt(values.shape[0])
        if np.any(3.0 * stderrs > self.config.tolerance):
            raise ValueError(
                "sample budget insufficient for the tolerance contract: "
                f"3·stderr = {float(3 * stderrs.max()):.3g} > τ = {self.config.tolerance:g}"
            )
        return means * scales, rescaled

    def answer(self, query: SQQuery) -> float:
        """Answer a single query under the configured policy."""
        if query.kind == "inner-product":
            values = np.asarray(query.fn(self.xs), dtype=float).reshape(-1, 1)
            answers, _ = self.answer_columns(values, rescale=False)
            return float(answers[0])
        # general query: certify per label value, then answer per policy
        v_pos = np.asarray(query.fn(self.xs, 1.0), dtype=float)
        v_neg = np.asarray(query.fn(self.xs, -1.0), dtype=float)
        for v in (v_pos, v_neg):
            self._certify_columns(v.reshape(-1, 1), rescale=False)
        if self.config.policy == "adversary-zero":
            return 0.0
        if self.config.policy == "adversary-d0":
            est = mc_mean(lambda rows: None, self.xs) if False else None
            vals = (v_pos + v_neg) / 2.0
            return float(vals.mean())
        probs_pos = _label_plus_probability(self.config.target, self.xs)
        vals = v_pos * probs_pos + v_neg * (1.0 - probs_pos)
        # labels enter through their conditional law; x-sampling noise remains
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1)) / math.sqrt(vals.size)
        if 3.0 * stderr > self.config.tolerance:
            raise ValueError(
                "sample budget insufficient for the tolerance contract: "
                f"3·stderr = {3 * stderr:.3g} > τ = {self.config.tolerance:g}"
            )
        return mean


def _label_plus_probability(target: TargetSpec, xs: np.ndarray) -> np.ndarray:
    values = eval_concept(target.family, target.concept, xs)
    if target.label_mode == "p-concept":
        return (1.0 + values) / 2.0
    raise ValueError("general queries over regression targets are not supported")
