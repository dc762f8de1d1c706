import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldstein.exceptions import NoConvergence
from goldstein.objectives import MaxAffine, abs_value, builtin
from goldstein.oracles import (ExactOracle, bisection_call_count, eps_active_pieces,
                               exact_goldstein_max_affine, exact_goldstein_radial,
                               modulus_bisection, radial_modulus, sample_ball,
                               sampled_goldstein)

from conftest import max_affine_instances, radial_objectives


def test_closed_form_examples():
    g = exact_goldstein_radial(builtin("half_sq_norm", 1.0, 2), [1.0, 0.0], 0.25).g
    np.testing.assert_allclose(g, [0.75, 0.0])
    g = exact_goldstein_radial(builtin("quartic", 2.0, 1), [3.0], 1.0).g
    np.testing.assert_allclose(g, [16.0])
    assert exact_goldstein_radial(builtin("scaled_norm", 1.0, 2), [0.6, 0.8], 1.0).norm == 0.0
    g = exact_goldstein_radial(builtin("scaled_norm", 1.0, 2), [2.0, 0.0], 1.0).g
    np.testing.assert_allclose(g, [math.sqrt(0.75), 0.0])


def test_radial_at_origin_and_validation():
    f = builtin("half_sq_norm", 1.0, 3)
    assert exact_goldstein_radial(f, np.zeros(3), 0.5).norm == 0.0
    with pytest.raises(ValueError):
        exact_goldstein_radial(f, np.ones(3), -1.0)
    with pytest.raises(ValueError):
        exact_goldstein_radial(abs_value(), [1.0], 0.1)
    with pytest.raises(ValueError):
        ExactOracle(object())


def test_eps_zero_is_shortest_subgradient_at_x():
    f = builtin("scaled_norm", 1.0, 3)
    x = np.array([0.3, -0.4, 1.2])
    np.testing.assert_allclose(exact_goldstein_radial(f, x, 0.0).g, f.raw_subgradient(x))
    assert exact_goldstein_max_affine(abs_value(), [0.0], 0.0).norm == 0.0


def test_eps_active_pieces_abs():
    f = abs_value()
    assert eps_active_pieces(f, [0.5], 0.4) == [0]
    assert eps_active_pieces(f, [0.5], 0.6) == [0, 1]
    assert eps_active_pieces(f, [-0.5], 0.4) == [1]


def test_max_affine_example():
    f = MaxAffine([[1.0], [-1.0]], [0.0, 0.5])
    # kink at 0.25; from 0.1 the right piece is 0.15 away
    assert exact_goldstein_max_affine(f, [0.1], 0.1).norm == 1.0
    assert exact_goldstein_max_affine(f, [0.1], 0.2).norm == 0.0


def _cases(f, rng, n):
    z = rng.standard_normal((n, f.dim))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    xs = z * rng.uniform(size=(n, 1)) ** (1 / f.dim)
    return xs, rng.uniform(0, 1, n)


@pytest.mark.parametrize("f", radial_objectives(), ids=repr)
def test_radial_agrees_with_sampling(f):
    rng = np.random.default_rng(2024)
    xs, es = _cases(f, rng, 15)
    for x, e in zip(xs, es):
        exact = exact_goldstein_radial(f, x, e)
        ref = sampled_goldstein(f, x, e, n_samples=3000, rng_seed=1)
        # the sampled hull is a subset of the true one, so it can only be longer
        assert ref.norm >= exact.norm - 1e-9
        if f.name == "scaled_norm" and abs(e / np.linalg.norm(x) - 1) < 0.02:
            # sqrt(1 - eps^2/r^2) is infinitely steep at eps = r; sampling cannot resolve it
            continue
        assert np.linalg.norm(exact.g - ref.g) <= 0.05


@pytest.mark.parametrize("f", max_affine_instances(), ids=repr)
def test_max_affine_agrees_with_sampling(f):
    rng = np.random.default_rng(77)
    for _ in range(15):
        x = rng.uniform(-1, 1, f.dim)
        e = rng.uniform(0, 1)
        exact = exact_goldstein_max_affine(f, x, e)
        # regions that barely reach into the ball need dense sampling to be hit
        ref = sampled_goldstein(f, x, e, n_samples=30000, rng_seed=2)
        assert np.linalg.norm(exact.g - ref.g) <= 0.05


@pytest.mark.parametrize("f", radial_objectives() + max_affine_instances(), ids=repr)
def test_norm_nonincreasing_in_eps(f):
    oracle = ExactOracle(f)
    rng = np.random.default_rng(5)
    for _ in range(10):
        x = rng.uniform(-1, 1, f.dim)
        norms = [oracle(x, e).norm for e in np.linspace(0, 1.5, 16)]
        assert all(b <= a + 1e-9 for a, b in zip(norms, norms[1:]))


@pytest.mark.parametrize("f", radial_objectives() + max_affine_instances(), ids=repr)
def test_descent_certificate(f):
    # f(x - eps g/|g|) <= f(x) - eps |g| for the exact Goldstein subgradient
    oracle = ExactOracle(f)
    rng = np.random.default_rng(6)
    for _ in range(30):
        x = rng.uniform(-1, 1, f.dim)
        e = rng.uniform(0.01, 1)
        res = oracle(x, e)
        if res.norm < 1e-12:  # zero up to rounding; no direction to step along
            continue
        y = x - e * res.g / res.norm
        assert f(y) <= f(x) - e * res.norm + 1e-10


@pytest.mark.parametrize("f", radial_objectives(), ids=repr)
def test_modulus_definition(f):
    rng = np.random.default_rng(8)
    for _ in range(10):
        x = rng.uniform(-1, 1, f.dim)
        gam = radial_modulus(f, x)
        # Gamma = inf{eps : |g_eps| <= eps}; |g_eps| may jump at Gamma (|x| on the line)
        assert exact_goldstein_radial(f, x, gam).norm <= gam * (1 + 1e-9)
        assert exact_goldstein_radial(f, x, 0.99 * gam).norm > 0.99 * gam
        assert exact_goldstein_radial(f, x, 1.01 * gam).norm < 1.01 * gam


@pytest.mark.parametrize("alpha, r, L, expected, calls", [
    (1.0, 1.0, 1.0, 0.25, 3),
    (0.5, 1.0, 0.5, 0.25, 2),
    (2.0, 1.0, 2.0, 0.5, 3),
])
def test_bisection_examples(alpha, r, L, expected, calls):
    f = builtin("half_sq_norm", alpha, 2)
    est = modulus_bisection(ExactOracle(f), [r, 0.0], L)
    assert (est.eps, est.oracle_calls, est.critical) == (expected, calls, False)


def test_bisection_scaled_norm_line():
    est = modulus_bisection(ExactOracle(builtin("scaled_norm", 2.0, 1)), [3.0], 2.0)
    assert (est.eps, est.oracle_calls) == (1.0, 2)


def test_bisection_critical_point():
    oracle = ExactOracle(abs_value())
    est = modulus_bisection(oracle, [0.0])
    assert (est.eps, est.oracle_calls, est.critical) == (0.0, 1, True)
    assert oracle.ledger.goldstein_calls == 1


@settings(max_examples=80, deadline=None)
@given(st.sampled_from(["half_sq_norm", "scaled_norm", "quartic"]),
       st.floats(0.1, 4.0), st.floats(0.01, 1.0), st.integers(1, 4))
def test_bisection_bracket_property(name, alpha, r, d):
    f = builtin(name, alpha, d)
    x = np.zeros(d)
    x[0] = r
    gam = radial_modulus(f, x)
    est = modulus_bisection(ExactOracle(f), x, f.lipschitz)
    assert gam / 2 <= est.eps < gam
    assert est.oracle_calls == bisection_call_count(f.lipschitz, gam)


def test_bisection_underflow_raises():
    class Never:
        objective = abs_value()
        ledger = None

        def __call__(self, x, eps):
            from goldstein.oracles import GoldsteinResult
            return GoldsteinResult(np.array([1e-320 if eps > 0 else 1.0]), eps, "fake")

    with pytest.raises(NoConvergence):
        modulus_bisection(Never(), [1.0], 1.0)


def test_sample_ball_nested_and_inside():
    a = sample_ball(np.random.default_rng(3), np.zeros(3), 0.5, 50)
    b = sample_ball(np.random.default_rng(3), np.zeros(3), 0.5, 80)
    np.testing.assert_array_equal(a, b[:50])
    assert np.all(np.linalg.norm(b, axis=1) <= 0.5 + 1e-12)
    s = sample_ball(np.random.default_rng(3), np.ones(3), 0.5, 10, surface=True)
    np.testing.assert_allclose(np.linalg.norm(s - 1, axis=1), 0.5)
