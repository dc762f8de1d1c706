"""Quick built-in checks: exact vs sampled oracles and core invariants."""

from __future__ import annotations

import numpy as np

from .descent import RunConfig, descent_violations, minimize_bisection
from .minnorm import min_norm_point
from .objectives import InstanceSpec, MaxAffine, builtin, make_max_quadratics
from .oracles import (ExactOracle, bisection_call_count, modulus_bisection,
                      radial_modulus, sampled_goldstein)


def _oracle_agreement(n_pairs=20, n_samples=2000, tol=0.05):
    rng = np.random.default_rng(0)
    objectives = [builtin(name, 1.0, d) for name in ("half_sq_norm", "scaled_norm", "quartic")
                  for d in (1, 2)]
    objectives.append(MaxAffine([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0]], [0.0, 0.0, -0.5]))
    worst = 0.0
    for f in objectives:
        oracle = ExactOracle(f)
        for i in range(n_pairs):
            x = rng.uniform(-1, 1, f.dim)
            eps = rng.uniform(0, 1)
            exact = oracle(x, eps).norm
            sampled = sampled_goldstein(f, x, eps, n_samples, i).norm
            worst = max(worst, abs(exact - sampled))
    return worst <= tol, f"worst |exact - sampled| = {worst:.3g}"


def _bisection_count():
    ok = True
    for alpha in (0.5, 1.0, 2.0):
        f = builtin("half_sq_norm", alpha, 2)
        for r in (0.1, 1.0):
            x = np.array([r, 0.0])
            est = modulus_bisection(ExactOracle(f), x, alpha)
            gamma = radial_modulus(f, x)
            ok &= gamma / 2 <= est.eps < gamma
            ok &= est.oracle_calls == bisection_call_count(alpha, gamma)
    return ok, "bracket and call count on half_sq_norm"


def _descent():
    f = builtin("half_sq_norm", 1.0, 2)
    _, trace = minimize_bisection(f, [0.6, 0.8], RunConfig(L=1.0, max_oracle_calls=200))
    bad = descent_violations(trace)
    return bad == 0, f"{bad} descent violations over {len(trace.steps)} steps"


def _instance():
    f = make_max_quadratics(InstanceSpec(seed=1))
    ok = np.allclose(f.linear.sum(axis=0), 0, atol=1e-12)
    ok &= np.allclose(f.quadratic.sum(axis=0), np.eye(f.dim), atol=1e-12)
    ok &= min_norm_point(f.linear).norm <= 1e-9 and f.evaluate(np.zeros(f.dim)) == 0.0
    return bool(ok), "max-of-quadratics construction"


CHECKS = {
    "oracle_agreement": _oracle_agreement,
    "bisection_count": _bisection_count,
    "descent_certificate": _descent,
    "instance_construction": _instance,
}


def run_selftest(echo=print) -> bool:
    all_ok = True
    for name, check in CHECKS.items():
        ok, detail = check()
        all_ok &= bool(ok)
        echo(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok
