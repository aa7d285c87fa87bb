"""Independent brute-force oracles used by the test suite.

Each oracle solves the same problem as a library routine by a different
method (enumeration, grid search, bisection, Monte Carlo) so agreement is
meaningful. Nothing here is imported by the package.
"""

from __future__ import annotations

import itertools

import numpy as np


def project_simplex_bisection(x, iters: int = 200) -> np.ndarray:
    """Simplex projection via bisection on the water-filling shift.

    Finds tau with sum(max(x + tau, 0)) = 1; independent of the sort-based
    production algorithm.
    """
    x = np.asarray(x, dtype=float)
    # f(tau) = sum(max(x + tau, 0)) is nondecreasing; bracket f = 1:
    # at lo every entry is <= 1/m so f <= 1; at hi the largest entry
    # alone already contributes >= 1.
    lo = 1.0 / x.size - np.max(x)
    hi = 1.0 - np.min(x)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.sum(np.maximum(x + mid, 0.0)) > 1.0:
            hi = mid
        else:
            lo = mid
    tau = 0.5 * (lo + hi)
    return np.maximum(x + tau, 0.0)


def min_norm_g_grid_m2(J, step: float = 1e-4, refinements: int = 1) -> float:
    """Dense 1-D grid search for the min-norm g of a two-row Jacobian.

    Zooms 10x around the incumbent after the coarse pass so the quadratic
    grid error stays far below the comparison tolerance.
    """
    gram = J @ J.T

    def sweep(w1):
        g = (
            w1**2 * gram[0, 0]
            + 2.0 * w1 * (1.0 - w1) * gram[0, 1]
            + (1.0 - w1) ** 2 * gram[1, 1]
        )
        best = int(np.argmin(g))
        return float(g[best]), float(w1[best])

    current_step = step
    grid = np.clip(np.arange(0.0, 1.0 + current_step / 2, current_step), 0.0, 1.0)
    best_g, best_w = sweep(grid)
    for _ in range(refinements):
        current_step /= 10.0
        lo = max(0.0, best_w - 12 * current_step)
        hi = min(1.0, best_w + 12 * current_step)
        g, w = sweep(np.arange(lo, hi + current_step / 2, current_step))
        if g < best_g:
            best_g, best_w = g, w
    return best_g


def min_norm_g_grid_m3(J, step: float = 1e-4) -> float:
    """Grid search for the min-norm g of a three-row Jacobian.

    Scans the first barycentric coordinate on a dense grid; for each slab
    the objective is a 1-D quadratic in the second coordinate, minimized
    in closed form over its interval (endpoints included, so the simplex
    faces are handled exactly). A plain 2-D grid at a coarse step aliases
    along ill-conditioned valleys and cannot certify 1e-6 in g; this scan
    leaves only the quadratic-in-step error of the w1 discretization. The
    three one-row-dropped faces are also searched with the two-row oracle.
    """
    gram = J @ J.T
    w1 = np.arange(0.0, 1.0 + step / 2, step)
    w1 = np.clip(w1, 0.0, 1.0)

    # w = u + w2 * d with u = (w1, 0, 1 - w1), d = (0, 1, -1):
    # g = u'Gu + 2 w2 d'Gu + w2^2 d'Gd, to be minimized over [0, 1 - w1].
    e = np.array([0.0, 0.0, 1.0])
    f = np.array([1.0, 0.0, -1.0])
    d = np.array([0.0, 1.0, -1.0])
    u_gu = e @ gram @ e + 2.0 * w1 * (f @ gram @ e) + w1**2 * (f @ gram @ f)
    d_gu = d @ gram @ e + w1 * (d @ gram @ f)
    d_gd = float(d @ gram @ d)

    hi = 1.0 - w1
    candidates = [np.zeros_like(w1), hi]
    if d_gd > 0.0:
        candidates.append(np.clip(-d_gu / d_gd, 0.0, hi))
    g_best = np.inf
    for w2 in candidates:
        g = u_gu + 2.0 * w2 * d_gu + w2**2 * d_gd
        g_best = min(g_best, float(np.min(g)))

    for keep in ((0, 1), (0, 2), (1, 2)):
        g_best = min(g_best, min_norm_g_grid_m2(J[list(keep)]))
    return g_best


def min_norm_g_grid(J, **kwargs) -> float:
    J = np.asarray(J, dtype=float)
    if J.shape[0] == 1:
        return float(J[0] @ J[0])
    if J.shape[0] == 2:
        return min_norm_g_grid_m2(J, **kwargs)
    if J.shape[0] == 3:
        return min_norm_g_grid_m3(J, **kwargs)
    raise ValueError("grid oracle supports m <= 3")


def direction_active_set(J, grad_f, phi, tol: float = 1e-9):
    """Exact primal solve of the direction QP by active-set enumeration.

    min ||grad_f - v||^2 / 2  s.t.  J v >= phi  componentwise.

    Tries every subset of constraints as the active set (equality-tight),
    solves the equality-constrained problem in closed form, and keeps KKT-
    valid candidates; among ties the smallest active set wins. Returns
    (v, multipliers) or None when no subset validates (infeasible primal).
    """
    J = np.asarray(J, dtype=float)
    grad_f = np.asarray(grad_f, dtype=float)
    m = J.shape[0]
    best = None
    best_card = None
    for active in itertools.chain.from_iterable(
        itertools.combinations(range(m), k) for k in range(m + 1)
    ):
        active = list(active)
        lam = np.zeros(m)
        if active:
            J_a = J[active]
            gram = J_a @ J_a.T
            rhs = phi - J_a @ grad_f
            try:
                mu = np.linalg.solve(gram, rhs)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(mu)):
                continue
            lam[active] = mu
        v = grad_f + J.T @ lam
        if np.any(lam < -tol):
            continue
        if np.any(J @ v < phi - max(tol, tol * abs(phi))):
            continue
        card = len(active)
        if best is None or card < best_card:
            best = (v, np.maximum(lam, 0.0))
            best_card = card
    return best


def random_feasible_instance(rng, m_max: int = 3, n_max: int = 10):
    """Random Gaussian gradients plus a phi that keeps the primal feasible.

    Half the draws use phi <= 0 (always feasible); the rest scale the
    min-norm g, which the min-norm point certifies to be a feasible
    descent-rate floor.
    """
    m = int(rng.integers(1, m_max + 1))
    n = int(rng.integers(2, n_max + 1))
    J = rng.normal(size=(m, n))
    grad_f = rng.normal(size=n)
    draw = rng.random()
    scale = rng.uniform(0.0, 0.95)
    if draw < 0.5:
        phi = -float(np.abs(rng.normal()))
    else:
        # the min-norm point d satisfies J d >= ||d||^2 = g componentwise,
        # so any phi below g keeps the primal feasible; a vanishing g
        # leaves no feasible positive floor, so fall back to phi <= 0
        from paretonav import QpSolverConfig, min_norm_weights

        result = min_norm_weights(J, QpSolverConfig(max_iters=5000, tol=1e-14))
        phi = scale * result.g if result.g > 1e-10 else -scale
    return J, grad_f, phi


def mc_hypervolume(points, reference, n_samples: int, rng):
    """Monte Carlo estimate of the dominated area and its standard error."""
    points = np.asarray(points, dtype=float)
    ref = np.asarray(reference, dtype=float)
    lo = np.minimum(points.min(axis=0), ref)
    box_area = float(np.prod(ref - lo))
    if box_area == 0.0:
        return 0.0, 0.0
    samples = rng.uniform(lo, ref, size=(n_samples, 2))
    covered = np.zeros(n_samples, dtype=bool)
    for p in points:
        covered |= np.all(samples >= p, axis=1)
    frac = float(np.mean(covered))
    estimate = frac * box_area
    stderr = box_area * float(np.sqrt(max(frac * (1 - frac), 0.0) / n_samples))
    return estimate, stderr


def finite_difference_gradient(fn, x, h: float = 1e-6) -> np.ndarray:
    """Central finite differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.empty_like(x)
    for i in range(x.size):
        bump = np.zeros_like(x)
        bump[i] = h
        grad[i] = (fn(x + bump) - fn(x - bump)) / (2.0 * h)
    return grad
