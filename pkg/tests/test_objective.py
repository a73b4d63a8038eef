import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_opt import (ObjectiveDomainError, admissible_set, continuous_value, cumulant_exponent,
                      eval_g, eval_g_prime, log_triplet, make_model)

from conftest import valid_models


def interior_grid(model, n=9):
    iv = admissible_set(model.triplet, model.utility)
    lo = max(iv.lower, -3.0)
    hi = min(iv.upper, 3.0)
    pad = 1e-3 * (hi - lo)
    return np.linspace(lo + pad, hi - pad, n)


def test_g_merton(merton):
    assert eval_g(merton, 0.5).value == pytest.approx(0.01, abs=1e-16)


def test_g_two_atom_at_one(two_atom):
    # exact: 0.05 - 0.01 - 0.05 - 0.05
    assert eval_g(two_atom, 1.0).value == pytest.approx(-0.06, abs=1e-15)


@given(valid_models())
def test_g_zero_at_zero(model):
    v = eval_g(model, 0.0)
    assert v.value == 0.0 and v.finite


def test_g_prime_merton_stationary(merton):
    assert eval_g_prime(merton, 0.5) == pytest.approx(0.0, abs=1e-16)


@given(valid_models())
def test_g_prime_at_zero_is_drift(model):
    assert eval_g_prime(model, 0.0) == pytest.approx(model.triplet.b, abs=1e-15)


def test_g_prime_two_atom(two_atom):
    # mpmath differentiation of g: -0.0593827160493827...
    assert eval_g_prime(two_atom, 0.5) == pytest.approx(-0.05938271604938271605, rel=1e-13)


@given(valid_models())
def test_g_prime_matches_finite_differences(model):
    h = 1e-6
    for pi in interior_grid(model):
        d = eval_g_prime(model, pi)
        fd = (eval_g(model, pi + h).value - eval_g(model, pi - h).value) / (2 * h)
        assert abs(d - fd) <= 1e-6 * max(1.0, abs(d))


@given(valid_models())
def test_cumulant_identity(model):
    p = model.p
    for pi in interior_grid(model, 7):
        lt = log_triplet(model.triplet.scaled(pi))
        g = eval_g(model, pi).value
        if p == 1.0:
            expected = lt.b
        else:
            expected = cumulant_exponent(lt, 1.0 - p) / (1.0 - p)
        assert g == pytest.approx(expected, rel=1e-10, abs=1e-14)


@given(valid_models(), st.floats(0, 1), st.floats(0, 1), st.floats(0.01, 0.99))
def test_g_concave(model, a, b, t):
    iv = admissible_set(model.triplet, model.utility)
    lo, hi = max(iv.lower, -3.0), min(iv.upper, 3.0)
    # keep strictly inside so that p >= 1 endpoints stay finite
    x1 = lo + (hi - lo) * (0.001 + 0.998 * a)
    x2 = lo + (hi - lo) * (0.001 + 0.998 * b)
    g = lambda x: eval_g(model, x).value
    assert g(t * x1 + (1 - t) * x2) >= t * g(x1) + (1 - t) * g(x2) - 1e-12


def test_closed_endpoint_finite_limit_for_small_p():
    model = make_model(0.05, 0.01, [(-0.2, 1.0), (0.25, 1.0)], p=0.5)
    v = eval_g(model, 5.0)   # 1 + 5 * (-0.2) = 0
    assert v.finite
    term_zero = -1.0 / (1.0 - 0.5) - 5.0 * (-0.2)
    term_pos = ((1 + 5 * 0.25) ** 0.5 - 1) / 0.5 - 5 * 0.25
    assert v.value == pytest.approx(5 * 0.05 - 0.5 * 25 * 0.01 / 2 + term_zero + term_pos, rel=1e-14)
    assert eval_g_prime(model, 5.0) == -math.inf


def test_open_endpoint_is_minus_infinity_for_large_p(two_atom):
    v = eval_g(two_atom, 5.0)
    assert v.value == -math.inf and not v.finite
    with pytest.raises(ObjectiveDomainError):
        eval_g_prime(two_atom, 5.0)


def test_outside_closure_raises(two_atom):
    with pytest.raises(ObjectiveDomainError):
        eval_g(two_atom, 5.01)
    with pytest.raises(ObjectiveDomainError):
        eval_g(two_atom, -4.5)


def test_log_utility_branch():
    model = make_model(0.05, 0.01, [(-0.2, 1.0), (0.25, 1.0)], p=1.0)
    pi = 0.4
    expected = pi * 0.05 - pi ** 2 * 0.01 / 2 + math.log(1 - 0.08) + 0.08 + math.log(1.1) - 0.1
    assert eval_g(model, pi).value == pytest.approx(expected, rel=1e-14)


def test_continuous_value(merton):
    assert continuous_value(merton, 0.5) == pytest.approx(-math.exp(-0.01), rel=1e-15)
    log_model = merton.with_p(1.0)
    assert continuous_value(log_model, 0.5) == pytest.approx(eval_g(log_model, 0.5).value)
