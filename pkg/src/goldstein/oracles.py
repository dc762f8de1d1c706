"""Goldstein subgradient oracles and the modulus bisection.

The Goldstein subgradient g_eps(x) is the shortest vector in the convex
hull of all Clarke subgradients over the ball x + eps*B. It is available
in closed form for the radial builtins and by enumerating eps-active
pieces for max-affine functions. ``sampled_goldstein`` is a brute-force
reference used only to check the exact oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .exceptions import NoConvergence
from .ledger import OracleLedger
from .minnorm import Polyhedron, min_norm_point, polyhedron_distance
from .objectives import (HalfSquaredNorm, MaxAffine, Objective, Quartic,
                         RadialObjective, ScaledNorm, as_point)

EXACT_CLOSED_FORM = "exact_closed_form"
EXACT_POLYHEDRAL = "exact_polyhedral"
SAMPLED = "sampled"


@dataclass(frozen=True)
class GoldsteinResult:
    g: np.ndarray
    eps: float
    source: str

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.g))


@dataclass(frozen=True)
class ModulusEstimate:
    eps: float
    oracle_calls: int
    critical: bool


def exact_goldstein_radial(f: RadialObjective, x, eps: float) -> GoldsteinResult:
    """Closed-form Goldstein subgradient of the three radial builtins."""
    if not isinstance(f, (HalfSquaredNorm, ScaledNorm, Quartic)):
        raise ValueError(f"no closed-form oracle for {f!r}")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x = as_point(x, f.dim)
    r = float(np.linalg.norm(x))
    zero = GoldsteinResult(np.zeros(f.dim), float(eps), EXACT_CLOSED_FORM)
    if r == 0.0:
        return zero
    u = x / r
    a = f.alpha
    if isinstance(f, HalfSquaredNorm):
        scale = a * max(r - eps, 0.0)
    elif isinstance(f, Quartic):
        scale = a * max(r - eps, 0.0) ** 3
    else:
        if eps >= r:
            return zero
        # shortest vector in the hull of the cap of unit directions seen from the ball
        scale = a if f.dim == 1 else a * math.sqrt(1.0 - (eps / r) ** 2)
    return GoldsteinResult(scale * u, float(eps), EXACT_CLOSED_FORM)


def radial_modulus(f: RadialObjective, x) -> float:
    """Closed-form Goldstein modulus of a radial builtin."""
    x = as_point(x, f.dim)
    r = float(np.linalg.norm(x))
    a = f.alpha
    if r == 0.0:
        return 0.0
    if isinstance(f, HalfSquaredNorm):
        return a * r / (1.0 + a)
    if isinstance(f, ScaledNorm):
        if f.dim == 1:
            return min(r, a)
        return a * r / math.hypot(r, a)
    if isinstance(f, Quartic):
        return brentq(lambda e: a * (r - e) ** 3 - e, 0.0, r, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    raise ValueError(f"no closed-form modulus for {f!r}")


def _piece_regions(f: MaxAffine):
    """P_i = {y : piece i attains the max at y}, as polyhedra."""
    a, b = f.slopes, f.intercepts
    m = a.shape[0]
    regions = []
    for i in range(m):
        others = [j for j in range(m) if j != i]
        regions.append(Polyhedron(a[i] - a[others], b[others] - b[i]))
    return regions


def eps_active_pieces(f: MaxAffine, x, eps: float, tol: float = 1e-9) -> list[int]:
    """Indices of pieces that attain the max somewhere in x + eps*B."""
    x = as_point(x, f.dim)
    vals = f.slopes @ x + f.intercepts
    top = np.max(vals)
    active = []
    for i, region in enumerate(_piece_regions(f)):
        if vals[i] == top or polyhedron_distance(region, x, tol=tol * 1e-2) <= eps + tol:
            active.append(i)
    return active


def exact_goldstein_max_affine(f: MaxAffine, x, eps: float, tol: float = 1e-9) -> GoldsteinResult:
    """Exact Goldstein subgradient of a max-affine function.

    The Goldstein subdifferential is the hull of the slopes of the
    eps-active pieces, so its shortest vector is a min-norm point.
    """
    if not isinstance(f, MaxAffine):
        raise ValueError("polyhedral oracle needs a max-affine objective")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    active = eps_active_pieces(f, x, eps, tol)
    if not active:
        raise RuntimeError("no eps-active piece; the piece active at x must always qualify")
    g = min_norm_point(f.slopes[active]).point
    return GoldsteinResult(g, float(eps), EXACT_POLYHEDRAL)


def sample_ball(rng: np.random.Generator, center, radius: float, n: int, surface: bool = False) -> np.ndarray:
    """Uniform points in (or, with ``surface``, on the boundary of) center + radius*B.

    Directions come from ``rng`` and radii from a child stream, so the
    first n points are the same for every larger n.
    """
    d = center.shape[0]
    dir_seed, rad_seed = rng.bit_generator.seed_seq.spawn(2)
    z = np.random.default_rng(dir_seed).standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    if surface:
        return center + radius * z
    r = radius * np.random.default_rng(rad_seed).uniform(size=(n, 1)) ** (1.0 / d)
    return center + r * z


def sampled_goldstein(f: Objective, x, eps: float, n_samples: int = 2000, rng_seed: int = 0,
                      refine_rounds: int = 8) -> GoldsteinResult:
    """Brute-force over-estimate of the Goldstein subgradient.

    Evaluates raw subgradients at ``n_samples`` uniform points of the ball,
    ``n_samples`` uniform points of its boundary sphere, x itself and the
    2d axis points x +- eps*e_i, then takes the min-norm point of their
    hull. Each refinement round perturbs the samples whose subgradients
    have the smallest inner product with the current g, projects them back
    into the ball and adds them, which fills in thin regions the uniform
    samples miss. Every point used lies in the ball, so the result is never
    shorter than the true g_eps. Reference only: never used by algorithms.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    x = as_point(x, f.dim)
    pts = [x[None, :]]
    if eps > 0:
        axes = np.eye(f.dim) * eps
        pts += [x + axes, x - axes]
        inner, outer, local = np.random.SeedSequence(rng_seed).spawn(3)
        pts.append(sample_ball(np.random.default_rng(inner), x, eps, n_samples))
        pts.append(sample_ball(np.random.default_rng(outer), x, eps, n_samples, surface=True))
    pts = np.vstack(pts)
    grads = f.raw_subgradients(pts)
    hull = np.unique(grads, axis=0)
    res = min_norm_point(hull)
    g = res.point
    if eps > 0 and refine_rounds > 0:
        rng = np.random.default_rng(local)
        step = 0.5 * eps
        # rounds work on the current support plus new samples; one full solve at the end
        support = hull[res.weights > 0]
        for _ in range(refine_rounds):
            if not np.any(g):
                break
            seeds = pts[np.argsort(grads @ g, kind="stable")[:16]]
            cand = (seeds[:, None, :] + step * rng.standard_normal((16, 16, f.dim))).reshape(-1, f.dim)
            off = cand - x
            norms = np.linalg.norm(off, axis=1, keepdims=True)
            cand = x + off * np.minimum(1.0, eps / np.maximum(norms, np.finfo(float).tiny))
            cand_grads = f.raw_subgradients(cand)
            pts = np.vstack([pts, cand])
            grads = np.vstack([grads, cand_grads])
            work = np.unique(np.vstack([support, cand_grads]), axis=0)
            res = min_norm_point(work)
            g = res.point
            support = work[res.weights > 0]
            step *= 0.5
        g = min_norm_point(np.unique(grads, axis=0)).point
    return GoldsteinResult(g, float(eps), SAMPLED)


class ExactOracle:
    """Counting Goldstein oracle g_eps(x) for an objective with an exact form."""

    def __init__(self, f: Objective, ledger: OracleLedger | None = None):
        if isinstance(f, MaxAffine):
            self._fn = exact_goldstein_max_affine
        elif isinstance(f, (HalfSquaredNorm, ScaledNorm, Quartic)):
            self._fn = exact_goldstein_radial
        else:
            raise ValueError(f"no exact Goldstein oracle for {f!r}")
        self.objective = f
        self.ledger = ledger if ledger is not None else OracleLedger()

    def __call__(self, x, eps: float) -> GoldsteinResult:
        self.ledger.goldstein_calls += 1
        return self._fn(self.objective, x, eps)


def modulus_bisection(oracle, x, L: float | None = None) -> ModulusEstimate:
    """Bracket the Goldstein modulus by halving from L/2.

    Returns eps in [Gamma/2, Gamma) for an exact oracle, or eps=0 with
    ``critical`` set when g_0(x) vanishes.
    """
    if L is None:
        L = oracle.objective.lipschitz
    if not L > 0:
        raise ValueError("L must be positive")
    calls = 1
    if not np.any(oracle(x, 0.0).g):
        return ModulusEstimate(0.0, calls, True)
    eps = 0.5 * L
    while True:
        calls += 1
        if oracle(x, eps).norm > eps:
            return ModulusEstimate(eps, calls, False)
        eps *= 0.5
        if eps < np.finfo(float).tiny:
            raise NoConvergence("bisection radius underflowed; x is numerically critical",
                                calls=calls)


def bisection_call_count(L: float, modulus: float) -> int:
    """Oracle calls the bisection makes at a non-critical point: 2 + floor(log2(L/Gamma))."""
    if modulus == 0:
        return 1
    return 2 + math.floor(math.log2(L) - math.log2(modulus))
