from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from instab import charsolver as cs
from instab.report import Verdict
from instab.spaces import GridFunction1D, NormKind, norm


def _half_ramp_at_zero(t):
    # u0 = (1+x)/2: y = 1 + x0 solves c y^2 + y - 1 = 0 with c = (e^{3t}-1)/4
    c = math.expm1(3 * t) / 4
    y = 2 / (1 + math.sqrt(1 + 4 * c))
    return y - 1, math.exp(t) * y / 2


def test_initial_data_validation():
    with pytest.raises(ValueError):
        cs.MonotoneInitialData(GridFunction1D(-1.0, 0.0, [0.0, 1.0, 0.5]))
    with pytest.raises(ValueError):
        cs.MonotoneInitialData(GridFunction1D(-1.0, 0.0, [0.1, 1.0]))
    with pytest.raises(ValueError):
        cs.MonotoneInitialData(GridFunction1D(0.0, 1.0, [0.0, 1.0]))


def test_zero_data_stays_zero():
    u0 = cs.MonotoneInitialData.from_function(lambda x: 0 * x, 65)
    assert norm(cs.solve_at_time(u0, 2.0), NormKind.SUP) == 0.0


def test_solution_at_origin_matches_quadratic_oracle():
    u0 = cs.MonotoneInitialData.from_function(lambda x: (1 + x) / 2)
    x0, val = _half_ramp_at_zero(1.0)
    assert_allclose(cs.foot_points(u0, 1.0, np.array([0.0]))[0], x0, atol=1e-11)
    sol = cs.solve_at_time(u0, 1.0)
    assert_allclose(sol.values[-1], val, rtol=1e-10)
    assert_allclose(sol.values[-1], 0.4958839864100247, rtol=1e-12)


def test_characteristic_matches_rk4():
    u0 = cs.MonotoneInitialData.from_function(lambda x: (1 + x) ** 2)
    x0s = np.linspace(-1, 0, 17)
    exact = np.array([cs.characteristic_position(x, 1.5, u0).X for x in x0s])
    assert_allclose(cs.rk4_characteristics(x0s, 1.5, u0), exact, rtol=1e-10, atol=1e-12)


def test_linearized_growth_is_exact():
    for name, u0 in cs.cone_examples(1025):
        for t in (1.0, 3.0):
            lin = cs.linearized_at_time(u0, t)
            assert_allclose(norm(lin, NormKind.SUP), math.exp(t) * u0.sup, rtol=1e-14)


def test_solution_stays_monotone_and_support_shrinks():
    for name, u0 in cs.cone_examples(1025):
        sol = cs.solve_at_time(u0, 2.0)
        assert np.all(np.diff(sol.values) >= 0)
        assert np.all(sol.values[sol.x < -math.exp(-2.0)] == 0.0)


def test_decay_bound_constant():
    assert_allclose(cs.C_DECAY, 1 / math.sqrt(1 - math.exp(-3)))
    assert_allclose(cs.decay_bound(2.0, 1.0, 0.5), math.exp(2.0) * 0.5)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 1.0])
def test_decay_bound_half_ramp(alpha):
    u0 = cs.MonotoneInitialData.from_function(lambda x: (1 + x) / 2)
    rep = cs.decay_bound_check(u0, range(1, 11), alpha)
    assert rep.verdict is Verdict.PASS
    for c in rep.checks:
        assert_allclose(c.observed, _half_ramp_at_zero(c.index)[1], rtol=1e-9)


def test_decay_bound_rejects_small_t():
    u0 = cs.MonotoneInitialData.from_function(lambda x: (1 + x) / 2)
    with pytest.raises(ValueError):
        cs.decay_bound_check(u0, [0.5], 0.0)


def test_gateaux_quadratic_decay():
    u0 = cs.MonotoneInitialData.from_function(lambda x: (1 + x) / 2)
    tab = cs.gateaux_limit_experiment(u0, 1.0, [2.0 ** -k for k in range(3, 11)])
    assert np.all(np.diff(tab.errors) < 0)
    assert 1.8 <= tab.slope() <= 2.2
    assert tab.to_csv().startswith("lambda,sup_error\n")


def test_time_one_map_interface():
    spec = cs.TimeOneMap(1.0, 257)
    u = GridFunction1D.c00(lambda x: 0.01 * (1 + x), 257)
    assert norm(spec.apply(spec.zero()), NormKind.SUP) == 0.0
    assert_allclose(norm(spec.linearized_apply(u), NormKind.SUP), math.e * 0.01)
