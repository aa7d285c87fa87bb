"""Direction selection and the iteration engine.

The navigating update keeps two goals in balance: descend the criterion,
and never sacrifice the objectives while doing so. Each iteration measures
Pareto stationarity via ``g`` (the min-norm simplex QP), derives a descent
floor ``phi`` from it, and picks the direction closest to the criterion
gradient among those whose rate of descent on every objective is at least
``phi``. Once ``g`` falls under an adaptive threshold the control switches
off and the step is plain gradient descent on the criterion.

Baselines share the same engine: worst-case multi-gradient descent (MGD),
linear scalarization with fixed weights, and unconstrained descent on the
criterion alone.

All solver and direction functions are pure; an ensemble iteration may in
principle solve its per-point QPs concurrently, but iterations are
synchronization barriers because the ensemble criterion reads every
point's losses.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EvaluationError,
    ObjectiveSet,
    as_parameter_vector,
    evaluate_jacobian,
    evaluate_losses,
)
from .criteria import SingularityError, as_ensemble
from .qp import (
    Direction,
    InfeasibleDirectionError,
    QpSolverConfig,
    assemble_direction,
    min_norm_weights,
    png_dual_solve,
)

Array = np.ndarray

MODES = ("png", "mgd", "linear-scalarization", "gradient-descent-on-F")


@dataclass(frozen=True)
class ControlSchedule:
    """The descent-floor control: ``phi = alpha * g`` while ``g`` exceeds an
    adaptive threshold, otherwise off.

    The threshold is ``gamma * eps0`` where ``eps0`` tracks an
    exponentially discounted average of the mean squared gradient norm, so
    it scales automatically with the problem at hand. ``eps0`` starts from
    the first observation rather than zero, making the threshold
    meaningful already at iteration 0.

    ``alpha_decay`` optionally shrinks alpha as ``alpha / (1 + k)^p``; the
    default ``p = 0`` keeps it constant.
    """

    alpha: float = 0.5
    gamma: float = 0.1
    beta: float = 0.9
    alpha_decay: float = 0.0
    eps0: float = 0.0
    initialized: bool = False

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0, 1)")
        if self.alpha_decay < 0:
            raise ValueError("alpha_decay must be >= 0")
        if not (self.eps0 >= 0.0 and math.isfinite(self.eps0)):
            raise ValueError("eps0 must be finite and >= 0")

    @property
    def threshold(self) -> float:
        """The control-off threshold ``gamma * eps0``."""
        return self.gamma * self.eps0

    def alpha_at(self, iteration: int) -> float:
        if self.alpha_decay == 0.0:
            return self.alpha
        return self.alpha / (1.0 + iteration) ** self.alpha_decay


def update_eps_floor(schedule: ControlSchedule, J) -> ControlSchedule:
    """Fold the current gradient magnitudes into the discounted floor.

    The raw observation is the mean squared row norm of ``J``. The first
    call initializes ``eps0`` to the raw value; later calls apply
    ``eps0 <- beta * eps0 + (1 - beta) * raw``.
    """
    J = np.asarray(J, dtype=float)
    if J.ndim != 2 or J.shape[0] == 0:
        raise ValueError(f"Jacobian must be a nonempty 2-D array, got shape {J.shape}")
    raw = float(np.mean(np.einsum("ij,ij->i", J, J)))
    if not schedule.initialized:
        eps0 = raw
    else:
        eps0 = schedule.beta * schedule.eps0 + (1.0 - schedule.beta) * raw
    return dataclasses.replace(schedule, eps0=eps0, initialized=True)


def compute_phi(schedule: ControlSchedule, g: float, iteration: int = 0) -> float | None:
    """The descent floor for the current stationarity measure ``g``.

    Returns None (control off) when ``g`` is at or below the threshold,
    otherwise ``alpha * g``. None is an explicit marker; no floating
    sentinel ever enters arithmetic.
    """
    if g < 0:
        raise ValueError("g must be >= 0")
    if g <= schedule.threshold:
        return None
    return schedule.alpha_at(iteration) * g


def png_direction(
    objectives: ObjectiveSet,
    theta,
    grad_f,
    schedule: ControlSchedule,
    qp_config: QpSolverConfig | None = None,
    iteration: int = 0,
) -> Direction:
    """The navigating direction at ``theta`` for criterion gradient ``grad_f``.

    With the control off the direction is exactly ``grad_f``; otherwise it
    is the dual-solve combination ``grad_f + sum_i lam_i grad l_i`` whose
    descent rate on every objective is at least ``phi``.
    """
    theta = as_parameter_vector(theta, objectives.n)
    grad_f = np.asarray(grad_f, dtype=float)
    J = evaluate_jacobian(objectives, theta)
    result = min_norm_weights(J, qp_config)
    phi = compute_phi(schedule, result.g, iteration)
    if phi is None:
        return Direction(
            v=grad_f,
            grad_f_part=grad_f,
            weighted_loss_part=np.zeros(objectives.n),
            multipliers=None,
            phi=None,
        )
    multipliers = png_dual_solve(J, grad_f, phi, qp_config)
    return assemble_direction(J, grad_f, multipliers, phi=phi)


def mgd_direction(
    objectives: ObjectiveSet, theta, qp_config: QpSolverConfig | None = None
) -> Direction:
    """The worst-case-descent direction: min-norm convex combination of
    the objective gradients. Its fixed points are exactly the Pareto
    stationary points (``g = 0``)."""
    theta = as_parameter_vector(theta, objectives.n)
    J = evaluate_jacobian(objectives, theta)
    result = min_norm_weights(J, qp_config)
    weighted = J.T @ result.weights
    return Direction(
        v=weighted,
        grad_f_part=np.zeros(objectives.n),
        weighted_loss_part=weighted,
        multipliers=None,
        phi=None,
    )


def step(theta, direction: Direction, step_size: float) -> Array:
    """One incremental update ``theta - step_size * v``."""
    if step_size <= 0:
        raise ValueError("step size must be positive")
    theta = np.asarray(theta, dtype=float)
    return theta - step_size * direction.v


@dataclass(frozen=True)
class OptimizerConfig:
    """Engine settings: step size, iteration budget, and update mode.

    ``scalarization_weights`` is consulted only by the
    linear-scalarization mode. ``seed`` records the RNG seed that produced
    the starting points so a run is reproducible from its config alone.
    ``shared_eps_floor`` makes an ensemble share one control threshold
    instead of tracking one per point.
    """

    step_size: float
    max_iters: int
    mode: str = "png"
    scalarization_weights: Array | None = None
    seed: int = 0
    shared_eps_floor: bool = False

    def __post_init__(self) -> None:
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be >= 0")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "linear-scalarization":
            if self.scalarization_weights is None:
                raise ValueError("linear-scalarization mode needs scalarization_weights")
            w = np.asarray(self.scalarization_weights, dtype=float)
            if w.ndim != 1 or np.any(w < 0) or abs(float(np.sum(w)) - 1.0) > 1e-9:
                raise ValueError("scalarization_weights must be nonnegative and sum to 1")
            object.__setattr__(self, "scalarization_weights", w)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Per-point, per-iteration state snapshot.

    ``phi`` is None when the control was off or the mode has no control.
    ``f_value`` is NaN for runs without a criterion. The direction itself
    is summarized by its norm; ``theta`` and ``losses`` allow everything
    else to be recomputed.
    """

    iteration: int
    point_id: int
    theta: Array
    losses: Array
    g: float
    phi: float | None
    f_value: float
    v_norm: float


class RunAborted(RuntimeError):
    """A run stopped early; carries the partial trajectory and the reason."""

    def __init__(self, records: list[TrajectoryRecord], reason: str):
        super().__init__(reason)
        self.records = records
        self.reason = reason


def run_single(
    objectives: ObjectiveSet,
    criterion,
    theta0,
    opt_config: OptimizerConfig,
    schedule: ControlSchedule | None = None,
    qp_config: QpSolverConfig | None = None,
) -> list[TrajectoryRecord]:
    """Iterate a single point, recording every iteration.

    Produces ``max_iters + 1`` records: the state before each of the
    ``max_iters`` steps plus the arrival state, each including the
    direction that would be taken there. ``criterion`` may be None for
    baseline modes that do not consume a criterion gradient.
    """
    theta0 = as_parameter_vector(theta0, objectives.n)
    ensemble_criterion = None if criterion is None else as_ensemble(criterion)
    return _run(
        objectives, ensemble_criterion, theta0[None, :], opt_config, schedule, qp_config
    )


def run_ensemble(
    objectives: ObjectiveSet,
    criterion,
    thetas0,
    opt_config: OptimizerConfig,
    schedule: ControlSchedule | None = None,
    qp_config: QpSolverConfig | None = None,
) -> list[TrajectoryRecord]:
    """Iterate an ensemble of points coupled only through the criterion.

    Each point gets its own stationarity measure, descent floor, and QP;
    the criterion's loss-space gradient at point ``i`` is chained through
    that point's Jacobian. All points advance synchronously.
    """
    thetas0 = np.asarray(thetas0, dtype=float)
    if thetas0.ndim != 2:
        raise ValueError(f"expected an (N, n) array of starting points, got {thetas0.shape}")
    ensemble_criterion = None if criterion is None else as_ensemble(criterion)
    return _run(objectives, ensemble_criterion, thetas0, opt_config, schedule, qp_config)


def _run(objectives, criterion, thetas0, opt_config, schedule, qp_config):
    n_points = thetas0.shape[0]
    if n_points == 0:
        raise ValueError("need at least one starting point")
    thetas = [as_parameter_vector(thetas0[i], objectives.n) for i in range(n_points)]
    if schedule is None:
        schedule = ControlSchedule()
    mode = opt_config.mode
    if mode in ("png", "gradient-descent-on-F") and criterion is None:
        raise ValueError(f"mode {mode!r} requires a criterion")
    if mode == "linear-scalarization":
        weights = opt_config.scalarization_weights
        if weights.shape != (objectives.m,):
            raise ValueError(
                f"scalarization_weights have shape {weights.shape}, "
                f"expected ({objectives.m},)"
            )

    shared = opt_config.shared_eps_floor
    schedules = [schedule] * n_points

    records: list[TrajectoryRecord] = []
    try:
        for k in range(opt_config.max_iters + 1):
            losses = np.stack([evaluate_losses(objectives, th) for th in thetas])
            jacobians = [evaluate_jacobian(objectives, th) for th in thetas]

            if criterion is not None:
                f_value, loss_grads = criterion.evaluate(losses)
            else:
                f_value, loss_grads = float("nan"), np.zeros_like(losses)

            if mode == "png":
                if shared:
                    updated = update_eps_floor(schedules[0], np.vstack(jacobians))
                    schedules = [updated] * n_points
                else:
                    schedules = [
                        update_eps_floor(schedules[i], jacobians[i])
                        for i in range(n_points)
                    ]

            directions = []
            g_values = []
            for i in range(n_points):
                J = jacobians[i]
                result = min_norm_weights(J, qp_config)
                g_values.append(result.g)
                if mode == "png":
                    grad_f = J.T @ loss_grads[i]
                    phi = compute_phi(schedules[i], result.g, k)
                    if phi is None:
                        direction = Direction(
                            v=grad_f,
                            grad_f_part=grad_f,
                            weighted_loss_part=np.zeros(objectives.n),
                            multipliers=None,
                            phi=None,
                        )
                    else:
                        multipliers = png_dual_solve(J, grad_f, phi, qp_config)
                        direction = assemble_direction(J, grad_f, multipliers, phi=phi)
                elif mode == "mgd":
                    weighted = J.T @ result.weights
                    direction = Direction(
                        v=weighted,
                        grad_f_part=np.zeros(objectives.n),
                        weighted_loss_part=weighted,
                        multipliers=None,
                        phi=None,
                    )
                elif mode == "linear-scalarization":
                    weighted = J.T @ opt_config.scalarization_weights
                    direction = Direction(
                        v=weighted,
                        grad_f_part=np.zeros(objectives.n),
                        weighted_loss_part=weighted,
                        multipliers=None,
                        phi=None,
                    )
                else:  # gradient-descent-on-F
                    grad_f = J.T @ loss_grads[i]
                    direction = Direction(
                        v=grad_f,
                        grad_f_part=grad_f,
                        weighted_loss_part=np.zeros(objectives.n),
                        multipliers=None,
                        phi=None,
                    )
                directions.append(direction)

            for i in range(n_points):
                records.append(
                    TrajectoryRecord(
                        iteration=k,
                        point_id=i,
                        theta=thetas[i].copy(),
                        losses=losses[i].copy(),
                        g=g_values[i],
                        phi=directions[i].phi,
                        f_value=f_value,
                        v_norm=float(np.linalg.norm(directions[i].v)),
                    )
                )

            if k == opt_config.max_iters:
                break

            for i in range(n_points):
                new_theta = step(thetas[i], directions[i], opt_config.step_size)
                if objectives.clip is not None:
                    new_theta = objectives.clip(new_theta)
                thetas[i] = new_theta
    except (EvaluationError, SingularityError, InfeasibleDirectionError) as exc:
        raise RunAborted(records, f"{type(exc).__name__}: {exc}") from exc

    return records
