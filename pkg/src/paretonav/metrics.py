"""Quality metrics for Pareto front approximations.

Provides the clipped-deficit inverted generational distance (IGD+), the
two-objective hypervolume with respect to a reference point, and a stable
dominance filter for pooling trajectory checkpoints.
"""

from __future__ import annotations

import numpy as np

from .core import Dominance, dominates

Array = np.ndarray


def _as_point_set(points, name: str) -> Array:
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] == 0:
        raise ValueError(f"{name} must be a nonempty (N, m) array, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValueError(f"{name} contains non-finite entries")
    return P


def igd_plus(reference_front: Array, approximation: Array) -> float:
    """Average clipped-deficit distance from reference points to the approximation.

    For each reference loss vector ``L`` the deficit to an approximation
    point ``L_hat`` is ``||max(L_hat - L, 0)||``: only the coordinates
    where the approximation is worse count. The score averages, over the
    reference samples, the smallest deficit; the base measure over the
    front is realized as a uniform counting measure over the supplied
    samples.

    Zero whenever every reference point is weakly dominated by some
    approximation point. Adding approximation points never increases it.
    """
    ref = _as_point_set(reference_front, "reference front")
    approx = _as_point_set(approximation, "approximation set")
    if ref.shape[1] != approx.shape[1]:
        raise ValueError(
            f"objective counts differ: reference has {ref.shape[1]}, "
            f"approximation has {approx.shape[1]}"
        )
    deficits = np.maximum(approx[None, :, :] - ref[:, None, :], 0.0)
    distances = np.sqrt(np.einsum("rak,rak->ra", deficits, deficits))
    return float(np.mean(np.min(distances, axis=1)))


def hypervolume_2d(approximation: Array, reference) -> float:
    """Area dominated by a two-objective approximation set up to a reference point.

    Computes the Lebesgue measure of the union of rectangles
    ``[l1_i, r1] x [l2_i, r2]`` by sorting on the first objective and
    sweeping. Points at or beyond the reference in either coordinate
    contribute nothing. Adding a point never decreases the result.
    """
    approx = _as_point_set(approximation, "approximation set")
    if approx.shape[1] != 2:
        raise ValueError("hypervolume_2d handles exactly two objectives")
    ref = np.asarray(reference, dtype=float)
    if ref.shape != (2,) or not np.all(np.isfinite(ref)):
        raise ValueError("reference point must be a finite pair")

    inside = (approx[:, 0] < ref[0]) & (approx[:, 1] < ref[1])
    pts = approx[inside]
    if pts.shape[0] == 0:
        return 0.0
    pts = nondominated_filter(pts)
    order = np.argsort(pts[:, 0], kind="stable")
    pts = pts[order]

    area = 0.0
    for i in range(pts.shape[0]):
        right = pts[i + 1, 0] if i + 1 < pts.shape[0] else ref[0]
        area += (right - pts[i, 0]) * (ref[1] - pts[i, 1])
    return float(area)


def nondominated_filter(points: Array) -> Array:
    """The maximal mutually-incomparable subset of ``points``, order preserved.

    A point is removed when some other point strictly dominates it, or
    when it duplicates an earlier point (first occurrence kept, making the
    output deterministic).
    """
    P = _as_point_set(points, "point set")
    n = P.shape[0]
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            relation = dominates(P[i], P[j])
            if relation is Dominance.STRICT or (
                relation is Dominance.WEAK_EQUAL and j < i
            ):
                keep[i] = False
                break
    return P[keep]
