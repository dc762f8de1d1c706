"""Idealized Goldstein descent driven by an exact Goldstein oracle.

``minimize_bisection`` re-brackets the Goldstein modulus from L/2 before
every step and steps with the bracket radius. ``minimize_fast`` scales the
bracket by a multiplier beta before stepping. Both count every oracle call
against one budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ledger import OracleLedger
from .oracles import ExactOracle
from .trace import Trace, TraceRow


@dataclass(frozen=True)
class RunConfig:
    L: float
    max_oracle_calls: int = 500
    beta: float = 1.0
    stop_eps: float = 0.0

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.max_oracle_calls < 1:
            raise ValueError("max_oracle_calls must be >= 1")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must lie in (0, 1]")
        if self.stop_eps < 0:
            raise ValueError("stop_eps must be nonnegative")


def goldstein_update(x, g, eps: float) -> np.ndarray:
    """Step of length eps against the direction of g."""
    g = np.asarray(g, dtype=float)
    gn = float(np.linalg.norm(g))
    if gn == 0.0:
        raise ValueError("cannot step along a zero subgradient")
    if not eps > 0:
        raise ValueError("eps must be positive")
    return np.asarray(x, dtype=float) - eps * g / gn


class _Recorder:
    def __init__(self, f, x0, ledger: OracleLedger):
        self.f = f
        self.ledger = ledger
        self.trace = Trace(initial_gap=f.gap(x0), initial_dist=f.dist(x0))
        self.k = 0
        self._last = (0, 0, 0)

    def _counters(self):
        return (self.ledger.goldstein_calls, self.ledger.approx_calls, self.ledger.subgrad_evals)

    def step(self, x, eps, g_norm):
        self.k += 1
        self._append(x, eps, g_norm)

    def finish(self, x, eps, g_norm, reason):
        if self._counters() != self._last or not self.trace.rows:
            self._append(x, eps, g_norm)
        self.trace.stop_reason = reason
        return self.trace

    def _append(self, x, eps, g_norm):
        c = self._counters()
        self.trace.rows.append(TraceRow(self.k, c[0], c[1], c[2], float(eps), float(g_norm),
                                        self.f.gap(x), self.f.dist(x)))
        self._last = c


def _budget_exceeded(oracle, cfg):
    return oracle.ledger.goldstein_calls > cfg.max_oracle_calls


def minimize_bisection(f, x0, cfg: RunConfig, oracle=None):
    """Goldstein descent with the modulus re-bracketed before each step.

    Returns ``(x, trace)``. Runs until more than ``cfg.max_oracle_calls``
    oracle calls have been spent, or, if ``cfg.stop_eps`` is positive,
    until the bisection radius drops below it.
    """
    oracle = oracle if oracle is not None else ExactOracle(f)
    rec = _Recorder(f, x0, oracle.ledger)
    x = np.array(x0, dtype=float)
    while True:
        eps = 0.5 * cfg.L
        g = oracle(x, eps).g
        gn = float(np.linalg.norm(g))
        if _budget_exceeded(oracle, cfg):
            return x, rec.finish(x, eps, gn, "budget")
        while gn <= eps:
            eps *= 0.5
            g = oracle(x, eps).g
            gn = float(np.linalg.norm(g))
            if _budget_exceeded(oracle, cfg):
                return x, rec.finish(x, eps, gn, "budget")
            if eps < cfg.stop_eps:
                return x, rec.finish(x, eps, gn, "stop_eps")
        x = x - eps * g / gn
        rec.step(x, eps, gn)


def minimize_fast(f, x0, cfg: RunConfig, oracle=None):
    """Goldstein descent stepping with beta times the bisection bracket.

    Returns ``(x, trace)``. Stops on the shared oracle budget or when the
    bracket falls below ``cfg.stop_eps``.
    """
    oracle = oracle if oracle is not None else ExactOracle(f)
    rec = _Recorder(f, x0, oracle.ledger)
    x = np.array(x0, dtype=float)
    while True:
        eps = 0.5 * cfg.L
        gn = oracle(x, eps).norm
        while gn <= eps:
            if _budget_exceeded(oracle, cfg):
                return x, rec.finish(x, eps, gn, "budget")
            eps *= 0.5
            gn = oracle(x, eps).norm
        if _budget_exceeded(oracle, cfg):
            return x, rec.finish(x, eps, gn, "budget")
        if eps < cfg.stop_eps:
            return x, rec.finish(x, eps, gn, "stop_eps")
        eps *= cfg.beta
        g = oracle(x, eps).g
        gn = float(np.linalg.norm(g))
        # only an inexact oracle can return zero here; shrink and retry
        while gn == 0.0:
            if _budget_exceeded(oracle, cfg):
                return x, rec.finish(x, eps, gn, "budget")
            eps *= 0.5
            g = oracle(x, eps).g
            gn = float(np.linalg.norm(g))
        x = x - eps * g / gn
        rec.step(x, eps, gn)


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float


@dataclass(frozen=True)
class RateReport:
    rate_statistic: float
    sqrt_fit: LinearFit | None
    linear_fit: LinearFit | None
    descent_violations: int


def fit_line(t, y) -> LinearFit:
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(t, y, 1)
    resid = y - (slope * t + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(float(slope), float(intercept), r2)


def descent_violations(trace: Trace, factor: float = 1.0, atol: float = 1e-10) -> int:
    """Accepted steps whose decrease falls short of factor * eps * |g|."""
    bad = 0
    prev = trace.initial_gap
    for r in trace.steps:
        if r.gap > prev - factor * r.eps * r.g_norm + atol:
            bad += 1
        prev = r.gap
    return bad


def rate_diagnostics(trace: Trace, window: tuple[int, int] | None = None,
                     descent_factor: float = 1.0) -> RateReport:
    """Convergence-rate summary of a trace with known minimizer.

    ``rate_statistic`` is the largest gap * s / log2(s + 2) over the rows,
    with s the Goldstein oracle count (approximate-oracle count when no
    exact calls were made). The fits regress natural-log distance on sqrt(k)
    and on k over accepted steps, optionally restricted to ``window``.
    """
    rows = trace.rows
    if not rows:
        raise ValueError("empty trace")
    stat = 0.0
    for r in rows:
        s = r.s_goldstein if r.s_goldstein > 0 else r.s_approx
        if s > 0:
            stat = max(stat, r.gap * s / math.log2(s + 2))

    steps = trace.steps
    if window is not None:
        lo, hi = window
        steps = [r for r in steps if lo <= r.k <= hi]
    pts = [(r.k, math.log(r.dist)) for r in steps if r.dist > 0]
    sqrt_fit = linear_fit = None
    if len(pts) >= 2:
        k = np.array([p[0] for p in pts], dtype=float)
        ld = np.array([p[1] for p in pts])
        sqrt_fit = fit_line(np.sqrt(k), ld)
        linear_fit = fit_line(k, ld)
    return RateReport(stat, sqrt_fit, linear_fit, descent_violations(trace, descent_factor))
