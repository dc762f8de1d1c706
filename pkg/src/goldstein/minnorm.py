"""Shortest vectors in convex hulls and distances to polyhedra.

``min_norm_point`` is Wolfe's algorithm: it keeps a corral of affinely
independent points, alternating a major step (add the point most opposed
to the current iterate) with minor steps (move to the affine min-norm
point of the corral, dropping points whose weight would go negative).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoConvergence


@dataclass(frozen=True)
class ConvexCombination:
    weights: np.ndarray
    point: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.point))


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty list of points of equal dimension")
    if not np.all(np.isfinite(pts)):
        raise ValueError("point coordinates must be finite")
    return pts


def _affine_minimizer(pts):
    """Weights (summing to one) of the min-norm point of the affine hull.

    Solved as least squares in the offsets from the first point. Returns
    None if the corral is numerically affinely dependent.
    """
    k = pts.shape[0]
    if k == 1:
        return np.ones(1)
    base = pts[0]
    diffs = (pts[1:] - base).T
    mu, _, rank, sv = np.linalg.lstsq(diffs, -base, rcond=None)
    if rank < k - 1 or sv[-1] <= 1e-12 * max(sv[0], 1.0):
        return None
    return np.concatenate([[1.0 - mu.sum()], mu])


def min_norm_point(points, tol: float = 1e-10, max_iter: int | None = None) -> ConvexCombination:
    """Shortest vector in the convex hull of ``points`` (Wolfe's algorithm).

    On return ``<x, p - x> >= -tol * (1 + |x|)`` holds for every input point
    p, which certifies that x is the min-norm point up to ``tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    pts = _as_points(points)
    k = pts.shape[0]
    if max_iter is None:
        max_iter = 100 * k + 1000

    sq = np.einsum("ij,ij->i", pts, pts)
    first = int(np.argmin(sq))
    corral = [first]
    lam = np.ones(1)
    x = pts[first].copy()

    for _ in range(max_iter):
        # major cycle
        dots = pts @ x
        j = int(np.argmin(dots))
        xx = float(x @ x)
        if dots[j] - xx >= -tol * (1.0 + np.sqrt(xx)) or j in corral:
            break
        prev = (list(corral), lam.copy(), x)
        corral.append(j)
        lam = np.append(lam, 0.0)

        # minor cycles
        while True:
            v = _affine_minimizer(pts[corral])
            if v is None:
                # degenerate corral: drop the lightest point other than the newcomer
                drop = int(np.argmin(lam[:-1]))
                del corral[drop]
                lam = np.delete(lam, drop)
                if lam.sum() > 0:
                    lam = lam / lam.sum()
                else:
                    lam = np.full(len(corral), 1.0 / len(corral))
                continue
            if np.all(v > 1e-14):
                lam = v
                break
            neg = v <= 1e-14
            ratios = lam[neg] / (lam[neg] - v[neg])
            theta = min(max(float(np.min(ratios)), 0.0), 1.0)
            lam = lam + theta * (v - lam)
            keep = lam > 1e-14
            keep[np.argmax(lam)] = True
            corral = [c for c, kp in zip(corral, keep) if kp]
            lam = lam[keep]
            lam = lam / lam.sum()
        x = lam @ pts[corral]
        if float(x @ x) >= xx:
            # no progress in floating point; keep the better iterate
            corral, lam, x = prev
            break

    weights = np.zeros(k)
    weights[corral] = lam
    weights = np.clip(weights, 0.0, None)
    weights /= weights.sum()
    return ConvexCombination(weights=weights, point=weights @ pts)


def segment_min_norm(g, h) -> np.ndarray:
    """Shortest vector on the segment [g, h]."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if g.shape != h.shape:
        raise ValueError("segment endpoints must share a dimension")
    diff = g - h
    dd = float(diff @ diff)
    if dd == 0.0:
        return g.copy()
    t = min(max(float(g @ diff) / dd, 0.0), 1.0)
    return (1.0 - t) * g + t * h


@dataclass(frozen=True)
class Polyhedron:
    """The set {y : normals[j] . y >= offsets[j] for all j}."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.normals, dtype=float))
        b = np.asarray(self.offsets, dtype=float).reshape(-1)
        if a.shape[0] != b.shape[0]:
            raise ValueError("one offset per normal")
        object.__setattr__(self, "normals", a)
        object.__setattr__(self, "offsets", b)

    @property
    def dim(self) -> int:
        return self.normals.shape[1]

    def violation(self, y) -> float:
        if self.normals.shape[0] == 0:
            return 0.0
        return float(np.max(self.offsets - self.normals @ y, initial=0.0))


def is_feasible(poly: Polyhedron) -> bool:
    """Exact-arithmetic-free feasibility test by phase-1 LP."""
    from scipy.optimize import linprog

    a, b = poly.normals, poly.offsets
    if a.shape[0] == 0:
        return True
    res = linprog(np.zeros(poly.dim), A_ub=-a, b_ub=-b,
                  bounds=[(None, None)] * poly.dim, method="highs")
    if res.status == 2:
        return False
    if res.status == 0:
        return True
    raise NoConvergence(f"feasibility LP failed: {res.message}")


def _polish(a, b, x, lam, tol):
    """Exact projection assuming the constraints with positive multiplier are the active set."""
    active = lam > 0
    if not np.any(active):
        return None
    aj = a[active]
    mu, *_ = np.linalg.lstsq(aj @ aj.T, b[active] - aj @ x, rcond=None)
    if np.any(mu < -tol):
        return None
    y = x + aj.T @ mu
    if np.max(b - a @ y) > tol:
        return None
    return y


def polyhedron_distance(poly: Polyhedron, x, tol: float = 1e-10, max_sweeps: int = 20000) -> float:
    """Euclidean distance from ``x`` to ``poly``; ``inf`` if the polyhedron is empty.

    Hildreth's dual coordinate ascent, with an active-set polish after
    every sweep. If the ascent has not converged after ``10*m*d`` sweeps an
    LP decides feasibility.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != poly.dim:
        raise ValueError("point and polyhedron dimensions differ")
    a, b = poly.normals, poly.offsets
    m = a.shape[0]
    if poly.violation(x) <= 0.0:
        return 0.0
    row_sq = np.einsum("ij,ij->i", a, a)
    if np.any((row_sq == 0) & (b > 0)):
        return float("inf")

    lam = np.zeros(m)
    y = x.copy()
    stall_check = 10 * m * poly.dim
    checked = False
    lower = 0.0
    for sweep in range(1, max_sweeps + 1):
        for j in range(m):
            if row_sq[j] == 0:
                continue
            step = max(-lam[j], (b[j] - a[j] @ y) / row_sq[j])
            lam[j] += step
            y += step * a[j]

        exact = _polish(a, b, x, lam, tol)
        if exact is not None:
            return float(np.linalg.norm(exact - x))
        shift = y - x
        dual = -0.5 * float(shift @ shift) + float(lam @ (b - a @ x))
        lower = max(lower, np.sqrt(2.0 * max(dual, 0.0)))
        upper = float(np.linalg.norm(shift))
        if poly.violation(y) <= tol and upper - lower <= tol:
            return upper
        if sweep >= stall_check and not checked:
            checked = True
            if not is_feasible(poly):
                return float("inf")
    raise NoConvergence("polyhedral projection did not converge", lower=lower,
                        upper=float("inf") if poly.violation(y) > tol else upper)
