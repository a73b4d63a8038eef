import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from levy_opt import (AdmissibleInterval, UnboundedProblemError, eval_g, eval_g_prime, make_model,
                      maximize_concave_1d, optimal_continuous)

from conftest import valid_models

REALS = AdmissibleInterval(-math.inf, math.inf, False, False)


def test_parabola():
    r = maximize_concave_1d(lambda x: -x * x, lambda x: -2 * x, REALS)
    assert r.pi == 0.0 and r.interior


@given(st.floats(-1e3, 1e3))
def test_shifted_parabola(center):
    r = maximize_concave_1d(lambda x: -(x - center) ** 2, lambda x: -2 * (x - center), REALS)
    assert r.pi == pytest.approx(center, abs=1e-9)


def test_merton_unconstrained(merton):
    r = optimal_continuous(merton)
    assert r.pi == pytest.approx(0.5, abs=1e-10)
    assert r.value == pytest.approx(0.01, abs=1e-12)
    assert r.interior and r.residual <= 1e-10


def test_merton_unit_interval_upper_boundary():
    model = make_model(0.12, 0.04, p=2.0)
    r = optimal_continuous(model, "unit")
    # grid search over [0, 1] with step 1e-4 picks 1.0
    assert (r.pi, r.boundary) == (1.0, "upper")
    assert eval_g_prime(model, 1.0) >= 0


def test_merton_unit_interval_lower_boundary():
    r = optimal_continuous(make_model(-0.02, 0.04, p=2.0), "unit")
    assert (r.pi, r.boundary) == (0.0, "lower")


def test_two_atom_unit_interval(two_atom):
    r = optimal_continuous(two_atom, "unit")
    # grid search (step 1e-5) argmax 0.22633, value 0.0056279613942
    assert r.interior
    assert r.pi == pytest.approx(0.22633, abs=1e-5)
    assert r.value == pytest.approx(0.0056279613942, abs=1e-11)
    assert r.residual <= 1e-10


def test_unbounded_problem_detected():
    with pytest.raises(UnboundedProblemError):
        maximize_concave_1d(lambda x: x, lambda x: 1.0, REALS)


def test_open_endpoint_never_evaluated():
    seen = []

    def fp(x):
        seen.append(x)
        return 5.0 - 1.0 / (1.0 - x)     # root at 0.8, -inf at the open end

    iv = AdmissibleInterval(-1.0, 1.0, False, False)
    r = maximize_concave_1d(lambda x: 5.0 * x + math.log(1.0 - x), fp, iv)
    assert r.pi == pytest.approx(0.8, abs=1e-9)
    assert all(-1.0 < x < 1.0 for x in seen)


@given(valid_models())
def test_interior_optimum_is_local_max(model):
    r = optimal_continuous(model)
    if r.interior:
        g = lambda x: eval_g(model, x).value
        assert r.value >= g(r.pi + 1e-6) - 1e-15 and r.value >= g(r.pi - 1e-6) - 1e-15


@given(valid_models())
def test_constrained_is_clipped_unconstrained(model):
    free = optimal_continuous(model).pi
    unit = optimal_continuous(model, "unit").pi
    # argmax error ~ derivative residual / curvature; flat objectives loosen it
    assert unit == pytest.approx(min(1.0, max(0.0, free)), abs=1e-7)


@given(valid_models(), st.floats(0.1, 100))
def test_argmax_independent_of_initial_wealth(model, x0):
    scaled = type(model)(model.triplet, model.T, x0, model.utility)
    assert optimal_continuous(scaled).pi == optimal_continuous(model).pi


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0, 4.0])
def test_merton_formula(p):
    r = optimal_continuous(make_model(0.04, 0.04, p=p))
    assert r.pi == pytest.approx(0.04 / (0.04 * p), abs=1e-9)


def test_grid_search_agrees_two_atom(two_atom):
    xs = np.linspace(-3.9, 4.9, 88001)
    vals = [eval_g(two_atom, x).value for x in xs]
    assert optimal_continuous(two_atom).pi == pytest.approx(xs[int(np.argmax(vals))], abs=2e-4)


@given(valid_models())
def test_interior_residual_certified(model):
    for constraint in ("none", "unit"):
        r = optimal_continuous(model, constraint)
        if r.interior:
            assert r.residual <= 1e-10
            assert abs(eval_g_prime(model, r.pi)) == r.residual
