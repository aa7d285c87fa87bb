"""Built-in benchmark problems with analytic gradients and front oracles.

Both benchmarks have two objectives and a known Pareto front, which makes
them suitable for oracle-based convergence and metric tests:

* ``toy``: a pair of inverted Gaussian bumps centered at ``+eta`` and
  ``-eta`` with ``eta = n^{-1/2} * (1, ..., 1)`` so that ``||eta|| = 1``.
  The Pareto set is the segment ``t * eta`` for ``t`` in [-1, 1] and the
  front is concave, which defeats linear scalarization.
* ``zdt2``: the standard two-objective benchmark with a concave front
  ``f2 = 1 - f1^2`` on the box [0, 1]^n. Box feasibility is maintained by
  clipping after each step (a benchmark-only hook, not a projection
  inside the QPs).
"""

from __future__ import annotations

import numpy as np

from .core import ObjectiveSet

Array = np.ndarray

#: Default step sizes used by the run configuration when none is given.
DEFAULT_STEP_SIZES = {"toy": 0.05, "zdt2": 0.01}
DEFAULT_DIMENSIONS = {"toy": 10, "zdt2": 30}


def toy_problem(n: int = 10) -> ObjectiveSet:
    """Two inverted Gaussian bumps: ``l_i = 1 - exp(-||theta -+ eta||^2)``.

    Gradients: ``grad l_1 = 2 (theta - eta) exp(-||theta - eta||^2)`` and
    symmetrically for ``l_2`` with ``+eta``.
    """
    if n < 1:
        raise ValueError("dimension must be >= 1")
    eta = np.full(n, n ** (-0.5))

    def loss_minus(theta: Array) -> float:
        d = theta - eta
        return 1.0 - np.exp(-float(d @ d))

    def loss_plus(theta: Array) -> float:
        d = theta + eta
        return 1.0 - np.exp(-float(d @ d))

    def grad_minus(theta: Array) -> Array:
        d = theta - eta
        return 2.0 * d * np.exp(-float(d @ d))

    def grad_plus(theta: Array) -> Array:
        d = theta + eta
        return 2.0 * d * np.exp(-float(d @ d))

    return ObjectiveSet(
        n=n,
        losses=(loss_minus, loss_plus),
        gradients=(grad_minus, grad_plus),
        name="toy",
        front_sampler=toy_front,
    )


def toy_eta(n: int = 10) -> Array:
    """The toy problem's center offset vector (unit norm)."""
    return np.full(n, n ** (-0.5))


def toy_front(samples: int = 200) -> Array:
    """Sample the toy Pareto front by parametrizing the set ``t * eta``.

    ``t`` runs uniformly over [-1, 1]; the losses depend only on ``t``:
    ``l_1 = 1 - exp(-(t - 1)^2)`` and ``l_2 = 1 - exp(-(t + 1)^2)``.
    Returns a (samples, 2) array of mutually non-dominated loss vectors.
    """
    if samples < 2:
        raise ValueError("need at least two front samples")
    t = np.linspace(-1.0, 1.0, samples)
    f1 = 1.0 - np.exp(-((t - 1.0) ** 2))
    f2 = 1.0 - np.exp(-((t + 1.0) ** 2))
    return np.column_stack([f1, f2])


def toy_front_points(t_values, n: int = 10) -> Array:
    """Map front parameters ``t`` to parameter vectors ``t * eta``."""
    t = np.atleast_1d(np.asarray(t_values, dtype=float))
    return t[:, None] * toy_eta(n)[None, :]


def zdt2(n: int = 30) -> ObjectiveSet:
    """Standard ZDT2: ``f1 = x_1``, ``f2 = g (1 - (x_1/g)^2)`` with
    ``g = 1 + 9 sum_{j>=2} x_j / (n - 1)`` on the box [0, 1]^n.
    """
    if n < 2:
        raise ValueError("zdt2 needs dimension >= 2")
    scale = 9.0 / (n - 1)

    def f1(x: Array) -> float:
        return float(x[0])

    def f2(x: Array) -> float:
        g = 1.0 + scale * float(np.sum(x[1:]))
        return g - x[0] ** 2 / g

    def grad_f1(x: Array) -> Array:
        grad = np.zeros_like(x)
        grad[0] = 1.0
        return grad

    def grad_f2(x: Array) -> Array:
        g = 1.0 + scale * float(np.sum(x[1:]))
        grad = np.full_like(x, scale * (1.0 + x[0] ** 2 / g**2))
        grad[0] = -2.0 * x[0] / g
        return grad

    def clip_box(x: Array) -> Array:
        return np.clip(x, 0.0, 1.0)

    return ObjectiveSet(
        n=n,
        losses=(f1, f2),
        gradients=(grad_f1, grad_f2),
        name="zdt2",
        clip=clip_box,
        front_sampler=zdt2_front,
    )


def zdt2_front(samples: int = 200) -> Array:
    """Sample the ZDT2 front ``f2 = 1 - f1^2`` for ``f1`` in [0, 1]."""
    if samples < 2:
        raise ValueError("need at least two front samples")
    f1 = np.linspace(0.0, 1.0, samples)
    return np.column_stack([f1, 1.0 - f1**2])


PROBLEMS = {"toy": toy_problem, "zdt2": zdt2}


def get_problem(name: str, n: int | None = None) -> ObjectiveSet:
    """Look up a benchmark by name, with its default dimension if ``n`` is None."""
    if name not in PROBLEMS:
        raise KeyError(f"unknown problem {name!r}; available: {sorted(PROBLEMS)}")
    if n is None:
        n = DEFAULT_DIMENSIONS[name]
    return PROBLEMS[name](n)
