"""Criterion functions defined on loss space, with analytic gradients.

All criteria map loss vectors to a scalar and expose the gradient with
respect to the losses; the optimization engine chains that gradient
through the problem Jacobian. Keeping criteria on loss space makes them
testable without any underlying problem.

Single-point criteria: weighted distance to a reference, a deliberately
non-linear cosine composite, and the non-uniformity score (KL divergence
of preference-weighted normalized losses from uniform, zero exactly when
``r_1 l_1 = ... = r_m l_m``). The ensemble criterion is the inverse-square
energy, a repulsion whose minimizers spread points evenly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

Array = np.ndarray

#: Pairwise loss-space distance below which the energy criterion is
#: treated as singular rather than evaluated.
ENERGY_MIN_SEPARATION = 1e-8

SINGLE_POINT_KINDS = ("weighted-distance", "complex-cosine", "non-uniformity")
ENSEMBLE_KINDS = ("energy-distance",)


class SingularityError(ValueError):
    """The energy criterion was evaluated at (nearly) coincident points."""


class CriterionEval(NamedTuple):
    value: float
    grad: Array  # d value / d losses, length m


class EnsembleEval(NamedTuple):
    value: float
    grads: Array  # (N, m): row i is d value / d losses of point i


def _check_losses(losses) -> Array:
    L = np.asarray(losses, dtype=float)
    if L.ndim != 1 or L.size == 0:
        raise ValueError(f"expected a nonempty 1-D loss vector, got shape {L.shape}")
    return L


def _check_reference(reference, m: int, positive: bool) -> Array:
    r = np.asarray(reference, dtype=float)
    if r.shape != (m,):
        raise ValueError(f"reference has shape {r.shape}, expected ({m},)")
    if positive and np.any(r <= 0.0):
        raise ValueError("reference entries must be strictly positive")
    return r


def weighted_distance(losses, reference) -> CriterionEval:
    """Reference-weighted squared distance ``sum_i (l_i - r_i)^2 / r_i``."""
    L = _check_losses(losses)
    r = _check_reference(reference, L.size, positive=True)
    diff = L - r
    value = float(np.sum(diff**2 / r))
    grad = 2.0 * diff / r
    return CriterionEval(value, grad)


def complex_cosine(losses, reference) -> CriterionEval:
    """Cosine composite ``-cos(pi (l_1 - r_1) / 2) + (cos(pi (l_2 - r_2)) + 1)^2``.

    Defined for exactly two losses. The second term reads the second loss
    against the second reference entry; this is the one documented
    interpretation this library implements.
    """
    L = _check_losses(losses)
    if L.size != 2:
        raise ValueError("complex-cosine is defined for exactly two losses")
    r = _check_reference(reference, 2, positive=False)
    d1 = np.pi * (L[0] - r[0]) / 2.0
    d2 = np.pi * (L[1] - r[1])
    inner = np.cos(d2) + 1.0
    value = float(-np.cos(d1) + inner**2)
    grad = np.array(
        [
            np.sin(d1) * np.pi / 2.0,
            -2.0 * inner * np.sin(d2) * np.pi,
        ]
    )
    return CriterionEval(value, grad)


def non_uniformity(losses, reference) -> CriterionEval:
    """KL divergence of the weighted loss profile from the uniform profile.

    With ``p_i = r_i l_i / sum_s r_s l_s``, the value is
    ``sum_i p_i log(m p_i)``: nonnegative, and zero exactly when all
    ``r_i l_i`` agree. Requires every weighted loss to be positive.
    """
    L = _check_losses(losses)
    r = _check_reference(reference, L.size, positive=True)
    weighted = r * L
    if np.any(weighted <= 0.0):
        raise ValueError("non-uniformity requires positive weighted losses r_i * l_i")
    total = float(np.sum(weighted))
    profile = weighted / total
    m = L.size
    log_ratio = np.log(m * profile)
    value = float(np.sum(profile * log_ratio))
    # d value / d l_j = r_j (log(m p_j) - value) / total, via the
    # normalization chain rule and sum(p) = 1.
    grad = r * (log_ratio - value) / total
    return CriterionEval(value, grad)


def energy_distance(losses, min_separation: float = ENERGY_MIN_SEPARATION) -> EnsembleEval:
    """Inverse-square energy ``sum_{i != j} ||L_i - L_j||^-2`` over ordered pairs.

    Each unordered pair is counted twice. The per-point gradient is
    ``sum_{j != i} -4 (L_i - L_j) ||L_i - L_j||^-4``. Evaluation at points
    closer than ``min_separation`` raises :class:`SingularityError`
    because the energy blows up at coincident points.
    """
    Ls = np.asarray(losses, dtype=float)
    if Ls.ndim != 2 or Ls.shape[0] < 2:
        raise ValueError(
            f"expected an (N, m) stack of at least two loss vectors, got shape {Ls.shape}"
        )
    n_points = Ls.shape[0]
    diffs = Ls[:, None, :] - Ls[None, :, :]
    sq_dists = np.einsum("ijk,ijk->ij", diffs, diffs)
    off_diag = ~np.eye(n_points, dtype=bool)
    if np.any(sq_dists[off_diag] <= min_separation**2):
        raise SingularityError(
            f"pairwise loss distance fell below {min_separation:g}; "
            "the energy criterion is singular at coincident points"
        )
    inv = np.where(off_diag, 1.0 / np.where(off_diag, sq_dists, 1.0), 0.0)
    value = float(np.sum(inv))
    # Both orderings of pair (i, j) contribute, hence the factor 4.
    grads = -4.0 * np.einsum("ij,ijk->ik", inv**2, diffs)
    return EnsembleEval(value, grads)


@dataclass(frozen=True)
class Criterion:
    """A single-point criterion bound to its reference vector."""

    kind: str
    reference: Array

    arity = "single"

    def __post_init__(self) -> None:
        if self.kind not in SINGLE_POINT_KINDS:
            raise ValueError(f"unknown single-point criterion kind {self.kind!r}")
        object.__setattr__(self, "reference", np.asarray(self.reference, dtype=float))
        if self.kind in ("weighted-distance", "non-uniformity") and np.any(
            self.reference <= 0.0
        ):
            raise ValueError(f"{self.kind} requires a strictly positive reference")
        if self.kind == "complex-cosine" and self.reference.shape != (2,):
            raise ValueError("complex-cosine requires a length-2 reference")

    def evaluate(self, losses) -> CriterionEval:
        if self.kind == "weighted-distance":
            return weighted_distance(losses, self.reference)
        if self.kind == "complex-cosine":
            return complex_cosine(losses, self.reference)
        return non_uniformity(losses, self.reference)


@dataclass(frozen=True)
class EnergyDistanceCriterion:
    """The ensemble repulsion criterion; needs no reference vector."""

    min_separation: float = ENERGY_MIN_SEPARATION

    arity = "ensemble"

    def evaluate(self, losses) -> EnsembleEval:
        return energy_distance(losses, self.min_separation)


@dataclass(frozen=True)
class SummedCriterion:
    """Lift a single-point criterion to an ensemble by summing over points."""

    base: Criterion

    arity = "ensemble"

    def evaluate(self, losses) -> EnsembleEval:
        Ls = np.asarray(losses, dtype=float)
        if Ls.ndim != 2:
            raise ValueError(f"expected an (N, m) loss stack, got shape {Ls.shape}")
        value = 0.0
        grads = np.empty_like(Ls)
        for i in range(Ls.shape[0]):
            point_eval = self.base.evaluate(Ls[i])
            value += point_eval.value
            grads[i] = point_eval.grad
        return EnsembleEval(value, grads)


def as_ensemble(criterion):
    """Adapt any criterion to the ensemble evaluation interface."""
    if getattr(criterion, "arity", None) == "ensemble":
        return criterion
    return SummedCriterion(criterion)


def make_criterion(kind: str, reference=None):
    """Build a criterion from its registry name and optional reference."""
    if kind in SINGLE_POINT_KINDS:
        if reference is None:
            raise ValueError(f"criterion {kind!r} requires a reference vector")
        return Criterion(kind, np.asarray(reference, dtype=float))
    if kind in ENSEMBLE_KINDS:
        if reference is not None:
            raise ValueError("energy-distance takes no reference vector")
        return EnergyDistanceCriterion()
    raise ValueError(f"unknown criterion kind {kind!r}")
