"""Two small dense quadratic programs at the heart of the navigation step.

* the min-norm-point problem over the probability simplex, whose optimum
  is the stationarity measure ``g`` and the worst-case-descent weights;
* the direction dual over the nonnegative orthant, whose multipliers turn
  the criterion gradient into a direction that still descends every
  objective at a guaranteed rate.

Both are solved by projected gradient iterations with a fixed 1/L step,
where L is the Gershgorin (diagonal-dominance) bound on the Gram matrix
``J @ J.T``. The Gram matrix is formed once per solve so each iteration is
O(m^2), independent of the parameter dimension.

Projected gradient identifies the optimal support quickly but can take
arbitrarily long to refine values when the Gram matrix is singular (more
objectives than parameter dimensions). Both solvers therefore check a KKT
certificate periodically and, when it fails, re-solve the tiny
equality-constrained system on supports read off the iterate and its
recent trend; a certified candidate ends the solve early.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

Array = np.ndarray

#: Multiplier magnitude beyond which the dual is declared unbounded
#: (infeasible primal).
MULTIPLIER_CAP = 1e8

#: Relative thresholds used to read candidate supports off an iterate.
_SUPPORT_THRESHOLDS = (1e-1, 1e-3, 1e-6)
#: Iterations between KKT certificate checks inside the solver loops.
_CERTIFICATE_INTERVAL = 25
_KKT_TOL = 1e-9


class InfeasibleDirectionError(RuntimeError):
    """No direction satisfies every per-objective descent-rate constraint."""


@dataclass(frozen=True)
class QpSolverConfig:
    """Stopping rule for the projected-gradient QP solvers.

    ``tol`` is an absolute threshold on the Euclidean norm of the iterate
    change. The step size is always 1/L with L bounded from the Gram
    matrix, so there is nothing else to tune.
    """

    max_iters: int = 100
    tol: float = 1e-8

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")


DEFAULT_QP_CONFIG = QpSolverConfig()


def project_simplex(x) -> Array:
    """Euclidean projection of ``x`` onto the probability simplex.

    Sort-based exact algorithm: find the largest shift ``tau`` such that
    clipping ``x + tau`` at zero sums to one.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"expected a nonempty 1-D array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("cannot project non-finite values")
    u = np.sort(x)[::-1]
    cumulative = np.cumsum(u)
    counts = np.arange(1, x.size + 1)
    support = np.nonzero(u + (1.0 - cumulative) / counts > 0.0)[0]
    rho = support[-1]
    tau = (1.0 - cumulative[rho]) / (rho + 1.0)
    return np.maximum(x + tau, 0.0)


def _validate_jacobian(J) -> Array:
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] == 0:
        raise ValueError(f"Jacobian must be a nonempty 2-D array, got shape {J.shape}")
    return J


def _gershgorin_bound(gram: Array) -> float:
    return float(np.max(np.sum(np.abs(gram), axis=1)))


def _candidate_supports(values: Array, trend: Array | None) -> list[tuple[int, ...]]:
    """Supports suggested by an iterate: by magnitude, and by dropping
    coordinates that the recent iterations are driving toward zero."""
    peak = float(np.max(values))
    candidates: list[tuple[int, ...]] = []
    if peak > 0.0:
        for threshold in _SUPPORT_THRESHOLDS:
            support = tuple(np.nonzero(values > threshold * peak)[0].tolist())
            if support and support not in candidates:
                candidates.append(support)
        if trend is not None:
            support = tuple(
                np.nonzero((values > 0.0) & (trend >= 0.0))[0].tolist()
            )
            if support and support not in candidates:
                candidates.append(support)
    full = tuple(range(values.shape[0]))
    if full not in candidates:
        candidates.append(full)
    return candidates


class MinNormResult(NamedTuple):
    weights: Array
    g: float
    converged: bool


def _simplex_optimality_gap(gram: Array, weights: Array) -> float:
    """Frank-Wolfe gap of the simplex QP: zero exactly at the optimum."""
    direction = gram @ weights
    return float(weights @ direction - np.min(direction))


def _polish_min_norm(gram: Array, weights: Array, trend: Array | None) -> Array | None:
    """Solve the simplex QP exactly on candidate supports; return a
    certified optimum or None."""
    m = weights.shape[0]
    scale = max(1.0, float(np.max(np.abs(gram))))
    for support in _candidate_supports(weights, trend):
        idx = np.asarray(support)
        k = idx.size
        # Bordered system: stationarity on the support plus sum-to-one.
        system = np.zeros((k + 1, k + 1))
        system[:k, :k] = 2.0 * gram[np.ix_(idx, idx)]
        system[:k, k] = 1.0
        system[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[k] = 1.0
        solution, *_ = np.linalg.lstsq(system, rhs, rcond=None)
        support_weights = solution[:k]
        if np.any(support_weights < -1e-9):
            continue
        candidate = np.zeros(m)
        candidate[idx] = np.maximum(support_weights, 0.0)
        total = float(np.sum(candidate))
        if total <= 0.0:
            continue
        candidate /= total
        if _simplex_optimality_gap(gram, candidate) <= _KKT_TOL * scale:
            return candidate
    return None


def min_norm_weights(J, config: QpSolverConfig | None = None) -> MinNormResult:
    """Minimize ``||sum_i w_i J[i]||^2`` over simplex weights ``w``.

    Returns the optimal weights, the attained squared norm ``g`` (the
    Pareto-stationarity measure: zero exactly on stationary points), and
    whether the result is converged: either the iterate-change rule fired
    or a KKT certificate validated the answer. A ``converged=False``
    result is the best iterate found within ``max_iters``.
    """
    J = _validate_jacobian(J)
    if config is None:
        config = DEFAULT_QP_CONFIG
    m = J.shape[0]
    if m == 1:
        return MinNormResult(np.ones(1), max(float(J[0] @ J[0]), 0.0), True)

    gram = J @ J.T
    lipschitz = 2.0 * _gershgorin_bound(gram)
    if lipschitz == 0.0:
        # All gradients vanish: every weight vector attains g = 0.
        return MinNormResult(np.full(m, 1.0 / m), 0.0, True)
    step = 1.0 / lipschitz
    scale = max(1.0, float(np.max(np.abs(gram))))

    weights = np.full(m, 1.0 / m)
    checkpoint = weights
    converged = False
    for iteration in range(1, config.max_iters + 1):
        new_weights = project_simplex(weights - step * 2.0 * (gram @ weights))
        change = float(np.linalg.norm(new_weights - weights))
        weights = new_weights
        if change < config.tol:
            converged = True
            break
        if iteration % _CERTIFICATE_INTERVAL == 0:
            if _simplex_optimality_gap(gram, weights) <= _KKT_TOL * scale:
                converged = True
                break
            polished = _polish_min_norm(gram, weights, weights - checkpoint)
            if polished is not None:
                weights = polished
                converged = True
                break
            checkpoint = weights

    if _simplex_optimality_gap(gram, weights) > _KKT_TOL * scale:
        polished = _polish_min_norm(gram, weights, weights - checkpoint)
        if polished is not None and float(polished @ gram @ polished) <= float(
            weights @ gram @ weights
        ):
            weights = polished
            converged = True
    g = float(weights @ gram @ weights)
    return MinNormResult(weights, max(g, 0.0), converged)


def _orthant_kkt_violation(gram: Array, linear: Array, lam: Array) -> float:
    """Worst violation of the orthant KKT conditions at ``lam``.

    The objective gradient is ``gram @ lam + linear``; optimality needs it
    nonnegative everywhere and zero on the support.
    """
    gradient = gram @ lam + linear
    feasibility = float(np.max(np.maximum(-gradient, 0.0)))
    slackness = float(np.max(np.abs(gradient * lam)))
    return max(feasibility, slackness)


def _polish_dual(gram: Array, linear: Array, lam: Array, trend: Array | None, scale: float) -> Array | None:
    """Solve the orthant QP exactly on candidate supports; return a
    certified optimum or None."""
    m = lam.shape[0]
    candidates: list[tuple[int, ...]] = [()]
    if float(np.max(lam)) > 0.0:
        candidates.extend(_candidate_supports(lam, trend))
    elif (m,) not in candidates:
        candidates.append(tuple(range(m)))
    for support in candidates:
        candidate = np.zeros(m)
        if support:
            idx = np.asarray(support)
            sub = gram[np.ix_(idx, idx)]
            solution, *_ = np.linalg.lstsq(sub, -linear[idx], rcond=None)
            peak = max(1.0, float(np.max(np.abs(solution))))
            if np.any(solution < -1e-9 * peak):
                continue
            candidate[idx] = np.maximum(solution, 0.0)
        if _orthant_kkt_violation(gram, linear, candidate) <= _KKT_TOL * scale:
            return candidate
    return None


def png_dual_solve(J, grad_f, phi: float, config: QpSolverConfig | None = None) -> Array:
    """Solve the direction dual: maximize ``-||grad_f + J.T @ lam||^2 / 2 + phi * sum(lam)`` over ``lam >= 0``.

    Projected gradient ascent from ``lam = 0`` with a fixed 1/L step,
    stopping when the iterate change drops below ``config.tol``, a KKT
    certificate validates the iterate, or ``max_iters`` is reached. The
    multipliers recombine into the primal direction via
    :func:`assemble_direction`.

    Raises:
        InfeasibleDirectionError: when no direction can satisfy the
            descent-rate constraints, detected either by a zero objective
            gradient paired with ``phi > 0`` or by multiplier divergence
            beyond ``MULTIPLIER_CAP``.
    """
    J = _validate_jacobian(J)
    if config is None:
        config = DEFAULT_QP_CONFIG
    grad_f = np.asarray(grad_f, dtype=float)
    if grad_f.shape != (J.shape[1],):
        raise ValueError(
            f"criterion gradient has shape {grad_f.shape}, expected ({J.shape[1]},)"
        )
    if not np.isfinite(phi):
        raise ValueError("phi must be finite; the control-off branch bypasses the dual")

    m = J.shape[0]
    if phi > 0.0:
        row_norms_sq = np.einsum("ij,ij->i", J, J)
        if np.any(row_norms_sq == 0.0):
            bad = [int(i) for i in np.nonzero(row_norms_sq == 0.0)[0]]
            raise InfeasibleDirectionError(
                f"objective(s) {bad} have zero gradient, so no direction can "
                f"reach descent rate phi={phi:g}"
            )
        # A positive rate floor is feasible exactly when no nonnegative
        # combination of the gradients cancels, i.e. the min-norm g is
        # nonzero (Farkas). Catch clean cancellations up front; borderline
        # ones still trip the multiplier cap below.
        stationarity = min_norm_weights(J, config)
        if stationarity.g <= 1e-14 * max(1.0, float(np.max(row_norms_sq))):
            raise InfeasibleDirectionError(
                f"the objective gradients admit a cancelling combination, so "
                f"no direction can reach descent rate phi={phi:g}"
            )

    gram = J @ J.T
    linear = J @ grad_f - phi
    lipschitz = _gershgorin_bound(gram)
    if lipschitz == 0.0:
        # All gradients vanish and phi <= 0: constraints hold trivially.
        return np.zeros(m)
    step = 1.0 / lipschitz
    scale = max(1.0, abs(phi), float(np.max(np.abs(linear))))

    lam = np.zeros(m)
    checkpoint = lam
    for iteration in range(1, config.max_iters + 1):
        new_lam = np.maximum(lam - step * (gram @ lam + linear), 0.0)
        if np.max(new_lam) > MULTIPLIER_CAP:
            raise InfeasibleDirectionError(
                "dual multipliers diverged; the descent-rate constraints "
                "admit no direction"
            )
        change = float(np.linalg.norm(new_lam - lam))
        lam = new_lam
        if change < config.tol:
            break
        if iteration % _CERTIFICATE_INTERVAL == 0:
            if _orthant_kkt_violation(gram, linear, lam) <= _KKT_TOL * scale:
                break
            polished = _polish_dual(gram, linear, lam, lam - checkpoint, scale)
            if polished is not None:
                return polished
            checkpoint = lam

    if _orthant_kkt_violation(gram, linear, lam) > _KKT_TOL * scale:
        polished = _polish_dual(gram, linear, lam, lam - checkpoint, scale)
        if polished is not None:
            return polished
    return lam


@dataclass(frozen=True)
class Direction:
    """An update direction with its diagnostic decomposition.

    ``v = grad_f_part + weighted_loss_part`` whenever both are present.
    ``multipliers`` holds the dual solution that produced the weighted
    loss part, when one exists. ``phi`` is the guaranteed per-objective
    descent rate, or None when the control is off (pure criterion
    descent) or not applicable to the mode.
    """

    v: Array
    grad_f_part: Array
    weighted_loss_part: Array
    multipliers: Array | None = None
    phi: float | None = None


def assemble_direction(J, grad_f, multipliers, phi: float | None = None) -> Direction:
    """Combine ``grad_f + J.T @ multipliers`` into a :class:`Direction`."""
    J = _validate_jacobian(J)
    grad_f = np.asarray(grad_f, dtype=float)
    multipliers = np.asarray(multipliers, dtype=float)
    if grad_f.shape != (J.shape[1],):
        raise ValueError(
            f"criterion gradient has shape {grad_f.shape}, expected ({J.shape[1]},)"
        )
    if multipliers.shape != (J.shape[0],):
        raise ValueError(
            f"multipliers have shape {multipliers.shape}, expected ({J.shape[0]},)"
        )
    weighted = J.T @ multipliers
    return Direction(
        v=grad_f + weighted,
        grad_f_part=grad_f,
        weighted_loss_part=weighted,
        multipliers=multipliers,
        phi=phi,
    )
