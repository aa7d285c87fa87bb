"""Data model for multi-objective problems.

Parameter vectors and loss vectors are plain 1-D numpy arrays. An
:class:`ObjectiveSet` bundles ``m`` differentiable objectives over an
``n``-dimensional parameter with their analytic gradients; the Jacobian
stacks the gradients row-wise. Dominance comparisons between loss vectors
are exposed as a tri-state relation.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np

Array = np.ndarray


class EvaluationError(RuntimeError):
    """Raised when an objective evaluation is malformed or non-finite.

    Non-finite losses or gradients abort the run instead of being clamped:
    a silently clamped value would invalidate every descent guarantee the
    update direction is built on.
    """


def as_parameter_vector(values, n: int | None = None) -> Array:
    """Validate and convert ``values`` into a finite 1-D float64 array."""
    theta = np.asarray(values, dtype=float)
    if theta.ndim != 1:
        raise EvaluationError(f"parameter vector must be 1-D, got shape {theta.shape}")
    if n is not None and theta.shape[0] != n:
        raise EvaluationError(
            f"parameter vector has length {theta.shape[0]}, expected {n}"
        )
    if not np.all(np.isfinite(theta)):
        raise EvaluationError("parameter vector contains non-finite entries")
    return theta


@dataclass(frozen=True)
class ObjectiveSet:
    """A fixed set of differentiable objectives with analytic gradients.

    Immutable after construction and safe to share across concurrent
    evaluations; `losses[i]` and `gradients[i]` must be pure functions of
    the parameter vector.

    Args:
        n: Parameter dimension.
        losses: One callable per objective, theta -> float.
        gradients: One callable per objective, theta -> (n,) gradient.
        name: Registry name ("toy", "zdt2", ...) or "custom".
        clip: Optional hook applied to the parameter after each optimizer
            step (used by box-constrained benchmarks).
        front_sampler: Optional K -> (K, m) sampler of loss vectors on the
            known Pareto front, for oracle checks and plot overlays.
    """

    n: int
    losses: tuple[Callable[[Array], float], ...]
    gradients: tuple[Callable[[Array], Array], ...]
    name: str = "custom"
    clip: Callable[[Array], Array] | None = None
    front_sampler: Callable[[int], Array] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("parameter dimension must be >= 1")
        if len(self.losses) == 0:
            raise ValueError("at least one objective is required")
        if len(self.losses) != len(self.gradients):
            raise ValueError("losses and gradients must pair up one-to-one")

    @property
    def m(self) -> int:
        """Number of objectives."""
        return len(self.losses)

    def evaluate_losses(self, theta) -> Array:
        return evaluate_losses(self, theta)

    def evaluate_jacobian(self, theta) -> Array:
        return evaluate_jacobian(self, theta)


def evaluate_losses(objectives: ObjectiveSet, theta) -> Array:
    """Evaluate all objectives at ``theta``, returning an (m,) loss vector."""
    theta = as_parameter_vector(theta, objectives.n)
    values = np.empty(objectives.m)
    for i, loss in enumerate(objectives.losses):
        values[i] = loss(theta)
    if not np.all(np.isfinite(values)):
        bad = [int(i) for i in np.nonzero(~np.isfinite(values))[0]]
        raise EvaluationError(f"objective(s) {bad} evaluated to a non-finite value")
    return values


def evaluate_jacobian(objectives: ObjectiveSet, theta) -> Array:
    """Stack the objective gradients at ``theta`` into an (m, n) matrix."""
    theta = as_parameter_vector(theta, objectives.n)
    jac = np.empty((objectives.m, objectives.n))
    for i, gradient in enumerate(objectives.gradients):
        row = np.asarray(gradient(theta), dtype=float)
        if row.shape != (objectives.n,):
            raise EvaluationError(
                f"gradient {i} has shape {row.shape}, expected ({objectives.n},)"
            )
        jac[i] = row
    if not np.all(np.isfinite(jac)):
        bad = sorted({int(i) for i in np.nonzero(~np.isfinite(jac))[0]})
        raise EvaluationError(f"gradient(s) {bad} evaluated to a non-finite value")
    return jac


class Dominance(Enum):
    """Relation of a candidate loss vector ``b`` to an incumbent ``a``.

    STRICT: b is no worse everywhere and strictly better somewhere (b is a
    Pareto improvement over a). WEAK_EQUAL: b equals a componentwise.
    INCOMPARABLE: b is worse than a in at least one coordinate.
    """

    STRICT = "strictly-dominates"
    WEAK_EQUAL = "weakly-dominates-or-equal"
    INCOMPARABLE = "incomparable"


def dominates(a, b) -> Dominance:
    """Classify how loss vector ``b`` compares to loss vector ``a``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"loss vectors must share a 1-D shape, got {a.shape} vs {b.shape}")
    if np.all(b <= a):
        if np.any(b < a):
            return Dominance.STRICT
        return Dominance.WEAK_EQUAL
    return Dominance.INCOMPARABLE


def weakly_dominates(a, b) -> bool:
    """True when ``b`` is componentwise no worse than ``a``."""
    return dominates(a, b) is not Dominance.INCOMPARABLE
