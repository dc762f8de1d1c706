"""Randomized approximate Goldstein subgradients and the descent heuristic.

An approximate Goldstein subgradient at (x, eps) is some g in the
Goldstein subdifferential that either is short (|g| < eps) or certifies a
decrease of eps*|g|/2 along -g. ``approx_goldstein`` finds one by
repeatedly merging g with a subgradient sampled on the segment of the
tentative step. ``estimate_modulus`` halves the radius until g and eps
balance; ``minimize_heuristic`` strings the two into a descent method.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import NoConvergence
from .ledger import CountedObjective, OracleLedger
from .trace import Trace, TraceRow

DESCENT_CERTIFIED = "descent_certified"
SMALL_NORM = "small_norm"


@dataclass(frozen=True)
class ApproxResult:
    g: np.ndarray
    eps: float
    subgrad_evals: int
    status: str
    # g == weights @ subgradients, each taken at a row of sample_points
    weights: np.ndarray
    sample_points: np.ndarray
    subgradients: np.ndarray

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.g))


def approx_goldstein(f, x, eps: float, rng: np.random.Generator, max_evals: int = 10**6) -> ApproxResult:
    if not eps > 0:
        raise ValueError("eps must be positive")
    x = np.asarray(x, dtype=float)
    g = np.asarray(f.raw_subgradient(x), dtype=float)
    evals = 1
    points, grads, weights = [x.copy()], [g.copy()], [1.0]
    gamma = float(np.linalg.norm(g))
    fx = None
    while gamma >= eps:
        y = x - (eps / gamma) * g
        if fx is None:
            fx = f.evaluate(x)
        if fx - f.evaluate(y) > 0.5 * eps * gamma:
            return _result(g, eps, evals, DESCENT_CERTIFIED, weights, points, grads)
        z = x + rng.uniform() * (y - x)
        if evals >= max_evals:
            raise NoConvergence("approximate Goldstein subgradient hit its evaluation cap",
                                g=g, subgrad_evals=evals)
        h = np.asarray(f.raw_subgradient(z), dtype=float)
        evals += 1
        diff = g - h
        dd = float(diff @ diff)
        t = 0.0 if dd == 0.0 else min(max(float(g @ diff) / dd, 0.0), 1.0)
        g = (1.0 - t) * g + t * h
        weights = [w * (1.0 - t) for w in weights] + [t]
        points.append(z)
        grads.append(h)
        gamma = float(np.linalg.norm(g))
    return _result(g, eps, evals, SMALL_NORM, weights, points, grads)


def _result(g, eps, evals, status, weights, points, grads):
    return ApproxResult(g=g, eps=float(eps), subgrad_evals=evals, status=status,
                        weights=np.array(weights), sample_points=np.array(points),
                        subgradients=np.array(grads))


class ApproxOracle:
    """Counting wrapper around ``approx_goldstein`` with reproducible randomness.

    Call number c (from 0) draws from PCG64 seeded with
    ``SeedSequence(seed, spawn_key=(c,))``, so a run's samples depend only
    on the seed and the order of calls.
    """

    def __init__(self, f, seed: int = 0, ledger: OracleLedger | None = None,
                 max_evals: int = 10**6):
        self.ledger = ledger if ledger is not None else OracleLedger()
        self.objective = f
        self.counted = CountedObjective(f, self.ledger)
        self.seed = int(seed)
        self.max_evals = max_evals

    def rng_for_call(self, c: int) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(c,))))

    def __call__(self, x, eps: float) -> ApproxResult:
        rng = self.rng_for_call(self.ledger.approx_calls)
        self.ledger.approx_calls += 1
        return approx_goldstein(self.counted, x, eps, rng, self.max_evals)


@dataclass(frozen=True)
class ModulusResult:
    eps: float
    g: np.ndarray | None
    stationary: bool
    approx: ApproxResult | None = None


def estimate_modulus(oracle: ApproxOracle, x, eps0: float, eps_bar: float) -> ModulusResult:
    """Halve the radius from eps0 until the approximate subgradient is at least as long.

    Reports ``stationary`` when a short subgradient turns up at a radius
    below ``eps_bar``.
    """
    if not eps0 > 0:
        raise ValueError("eps0 must be positive")
    if not isinstance(oracle, ApproxOracle):
        oracle = ApproxOracle(oracle)
    eps = float(eps0)
    while True:
        eps *= 0.5
        if eps < np.finfo(float).tiny:
            raise NoConvergence("modulus estimate underflowed", eps=eps)
        res = oracle(x, eps)
        gn = res.norm
        if gn < eps < eps_bar:
            return ModulusResult(eps, res.g, True, res)
        if gn >= eps:
            return ModulusResult(eps, res.g, False, res)


@dataclass(frozen=True)
class HeuristicConfig:
    L: float
    tol: float = 1e-10
    beta: float = 0.25
    n: int = 100
    seed: int = 0
    max_evals_per_call: int = 10**6

    def __post_init__(self):
        if not (self.L > 0 and self.tol > 0 and self.beta > 0):
            raise ValueError("L, tol and beta must be positive")
        if self.n < 1:
            raise ValueError("n must be >= 1")


def minimize_heuristic(f, x0, cfg: HeuristicConfig, ledger: OracleLedger | None = None):
    """Descent with radii set from approximate Goldstein modulus estimates.

    Each iteration estimates the modulus starting from L, rescales the
    estimate by 2*beta, re-runs the estimate from there (so its first probe
    is beta times the estimate) and steps by the resulting radius. Returns
    ``(x, trace)``; the trace stop reason is ``iterations``, ``stationary``
    or ``error: ...`` when a child routine gave up.
    """
    oracle = ApproxOracle(f, cfg.seed, ledger, cfg.max_evals_per_call)
    led = oracle.ledger
    x = np.array(x0, dtype=float)
    trace = Trace(initial_gap=f.gap(x), initial_dist=f.dist(x))
    k = 0
    last = (0, 0, 0)
    eps, gn = cfg.L, float("nan")
    reason = "iterations"

    for _ in range(cfg.n):
        try:
            first = estimate_modulus(oracle, x, cfg.L, cfg.tol)
            eps, gn = first.eps, _norm(first.g)
            if first.stationary:
                reason = "stationary"
                break
            second = estimate_modulus(oracle, x, 2.0 * cfg.beta * first.eps, cfg.tol)
            eps, gn = second.eps, _norm(second.g)
            if second.stationary:
                reason = "stationary"
                break
        except NoConvergence as exc:
            reason = f"error: {exc}"
            break
        x = x - eps * second.g / gn
        k += 1
        last = (led.goldstein_calls, led.approx_calls, led.subgrad_evals)
        trace.rows.append(TraceRow(k, *last, eps, gn, f.gap(x), f.dist(x)))

    now = (led.goldstein_calls, led.approx_calls, led.subgrad_evals)
    if now != last or not trace.rows:
        trace.rows.append(TraceRow(k, *now, eps, gn, f.gap(x), f.dist(x)))
    trace.stop_reason = reason
    return x, trace


def _norm(g):
    return float("nan") if g is None else float(np.linalg.norm(g))
