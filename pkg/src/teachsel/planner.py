"""Optimal feature selection, with and without human learning.

Both planners reduce to the same n-log-n recipe: score every feature
independently, sort, and keep the best strictly-positive scores up to the
budget.  With fixed beliefs the score is the static value
``2*a_i*h_i - h_i^2``.  With a learning human, an optimal infinite plan can
always be taken to repeat one subset forever, scored per feature by

    value_i = a_i^2 / (1 - delta) - W * (a_i - h0_i)^2

where ``W = sum_t delta^t * phi(t)`` is the discounted weight the learning
curve leaves on the initial divergence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import LearningDynamic, discounted_phi_sum
from .errors import InvalidInputError
from .model import FeatureSubset, ProblemInstance, static_values

NEAR_TIE_RTOL = 1e-12


@dataclass(frozen=True, slots=True)
class FeatureValueReport:
    """Scoring breakdown for one feature."""

    index: int
    informativeness: float
    divergence0: float
    value: float
    selected: bool


@dataclass(frozen=True)
class StaticPlan:
    subset: FeatureSubset
    reports: tuple[FeatureValueReport, ...]
    degenerate: bool


@dataclass(frozen=True)
class StationaryPlan:
    subset: FeatureSubset
    total_value: float
    reports: tuple[FeatureValueReport, ...]
    degenerate: bool


def _rank(values: np.ndarray) -> np.ndarray:
    """Indices by descending value; equal values keep index order."""
    return np.argsort(-values, kind="stable")


def _near_ties(values: np.ndarray, order: np.ndarray) -> bool:
    ranked = values[order]
    if ranked.size < 2:
        return False
    gaps = np.abs(np.diff(ranked))
    scale = np.maximum(1.0, np.maximum(np.abs(ranked[:-1]), np.abs(ranked[1:])))
    return bool(np.any(gaps < NEAR_TIE_RTOL * scale))


def _select_top_k(values: np.ndarray, k: int) -> tuple[FeatureSubset, np.ndarray, bool]:
    order = _rank(values)
    positive = order[values[order] > 0.0]
    chosen = positive[:k]
    return tuple(sorted(int(i) for i in chosen)), order, _near_ties(values, order)


def _reports(
    instance: ProblemInstance,
    values: np.ndarray,
    divergence: np.ndarray,
    subset: FeatureSubset,
    order: np.ndarray,
) -> tuple[FeatureValueReport, ...]:
    mask = np.zeros(instance.n, dtype=bool)
    mask[list(subset)] = True
    # .tolist() up front keeps this loop in native floats; per-element numpy
    # indexing dominates runtime at n ~ 1e5 otherwise.
    info = instance.informativeness.tolist()
    div = divergence.tolist()
    vals = values.tolist()
    sel = mask.tolist()
    return tuple(
        FeatureValueReport(
            index=i,
            informativeness=info[i],
            divergence0=div[i],
            value=vals[i],
            selected=sel[i],
        )
        for i in order.tolist()
    )


def optimal_static_subset(
    instance: ProblemInstance, h: Sequence[float] | np.ndarray | None = None
) -> StaticPlan:
    """Best subset for a single prediction with beliefs held at `h`.

    Keeps the up-to-k features with the largest strictly positive static
    values; ties break toward the lower index.  Reports cover every
    feature, sorted by value.
    """
    hv = instance.h0 if h is None else np.asarray(h, dtype=float)
    values = static_values(instance, hv)
    subset, order, degenerate = _select_top_k(values, instance.k)
    divergence = (instance.a - hv) ** 2
    return StaticPlan(
        subset=subset,
        reports=_reports(instance, values, divergence, subset, order),
        degenerate=degenerate,
    )


def stationary_feature_value(
    instance: ProblemInstance, dynamic: LearningDynamic, i: int
) -> float:
    """Discounted value of revealing feature `i` at every step forever."""
    if not 0 <= int(i) < instance.n:
        raise InvalidInputError(f"feature index {i} out of range [0, {instance.n})")
    weight = discounted_phi_sum(dynamic, instance.delta)
    return float(
        instance.informativeness[i] / (1.0 - instance.delta)
        - weight * instance.divergence0[i]
    )


def stationary_values(
    instance: ProblemInstance, dynamic: LearningDynamic
) -> np.ndarray:
    """Vector of stationary per-feature values at the instance's delta."""
    weight = discounted_phi_sum(dynamic, instance.delta)
    return instance.informativeness / (1.0 - instance.delta) - weight * instance.divergence0


def optimal_stationary_sequence(
    instance: ProblemInstance, dynamic: LearningDynamic
) -> StationaryPlan:
    """Best repeat-forever feature subset and its total discounted value."""
    values = stationary_values(instance, dynamic)
    subset, order, degenerate = _select_top_k(values, instance.k)
    total = float(np.sum(values[list(subset)])) if subset else 0.0
    return StationaryPlan(
        subset=subset,
        total_value=total,
        reports=_reports(instance, values, instance.divergence0, subset, order),
        degenerate=degenerate,
    )


def discounted_baseline_loss(instance: ProblemInstance) -> float:
    """Discounted loss of never revealing any feature."""
    return instance.mse_empty() / (1.0 - instance.delta)
