from __future__ import annotations

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from instab.errors import DivergentAlpha
from instab.maps import ContractSupport, Jordan2D, ScalarAlpha, ShiftFn, ShiftKind, TranslateMult
from instab.dynamics import LinearPart
from instab.maps.translate_mult import sawtooth, unit
from instab.operators import DiagonalOperator, weights_sampling
from instab.report import Verdict
from instab.spaces import NormKind, PlanarPoint, norm
from instab.theory.alpha import (AlphaProfile, IntegralStatus, integral_alpha_over_s, integral_upto)
from instab.theory.cone import (BetaFn, ProductSystem, adversarial_system, beta_build,
                                cone_simulate, random_cone_seeds, verify_hineq)
from instab.theory.normal import InstabilityBudget, budget, eta_condition, sandwich_check
from instab.theory.remainder import gateaux_quotient, remainder_profile, xb_constant


# --- integrability -------------------------------------------------------------

@pytest.mark.parametrize("alpha,expect", [
    (AlphaProfile.power(1.0, 1.0), 1.0),
    (AlphaProfile.power(2.0, 0.5), 4.0),
    (AlphaProfile.log(2.0), 1.0),
    (AlphaProfile.log(1.5), 2.0),
    (AlphaProfile.log(3.0), 0.5),
])
def test_integral_matches_antiderivative(alpha, expect):
    res = integral_alpha_over_s(alpha)
    assert res.status is IntegralStatus.CONVERGENT
    assert_allclose(res.value, expect, rtol=1e-6)


@pytest.mark.parametrize("gamma", [1.0, 0.5])
def test_borderline_log_diverges(gamma):
    res = integral_alpha_over_s(AlphaProfile.log(gamma))
    assert res.status is IntegralStatus.DIVERGENT
    assert res.value == math.inf


def test_table_profile_numeric_integral():
    s = np.geomspace(1e-8, 1.0, 60)
    res = integral_alpha_over_s(AlphaProfile.table(s, s), a=1.0)
    assert res.status is IntegralStatus.CONVERGENT
    assert_allclose(res.value, 1.0, rtol=1e-6)


def test_table_with_flat_tail_diverges():
    tab = AlphaProfile.table([1e-6, 1e-5, 1e-1], [0.1, 0.1, 0.2])
    assert integral_alpha_over_s(tab).status is IntegralStatus.DIVERGENT


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_table_tail_continues_as_power_law():
    # a finite table of a borderline log profile is extrapolated by a power law, hence integrable
    s = np.geomspace(1e-30, math.exp(-1), 80)
    tab = AlphaProfile.table(s, 1.0 / np.abs(np.log(s)))
    assert integral_alpha_over_s(tab).status is IntegralStatus.CONVERGENT
    assert_allclose(tab(1e-40), tab(1e-30) * (1e-40 / 1e-30) ** tab._tail_power)


def test_zero_profile_integral():
    res = integral_alpha_over_s(AlphaProfile.zero())
    assert res.value == 0.0 and res.status is IntegralStatus.CONVERGENT


def test_integral_upto_closed_forms():
    assert_allclose(integral_upto(AlphaProfile.log(2.0), math.exp(-4)), 0.25)
    assert_allclose(integral_upto(AlphaProfile.power(1.0, 0.5), 0.04), 0.4)


def test_alpha_config_round_trip():
    for a in (AlphaProfile.power(1.0, 0.5), AlphaProfile.log(2.0),
              AlphaProfile.table([1e-3, 1e-2, 1e-1], [1e-3, 1e-2, 1e-1])):
        b = AlphaProfile.from_config(a.to_config())
        assert_allclose(b(np.array([1e-4, 1e-2])), a(np.array([1e-4, 1e-2])))


def test_alpha_is_nondecreasing_and_clamped():
    a = AlphaProfile.log(2.0)
    s = np.geomspace(1e-300, 10.0, 500)
    v = a(s)
    assert np.all(np.diff(v) >= 0)
    assert a(5.0) == a(math.exp(-1))


# --- budget and sandwich -----------------------------------------------------------

def test_budget_log2():
    b = budget(AlphaProfile.log(2.0), 2.0)
    assert_allclose(b.eta, math.exp(-4 / math.log(2)), rtol=1e-10)
    assert_allclose(eta_condition(AlphaProfile.log(2.0), 2.0, b.eta), 0.25, rtol=1e-9)
    assert b.N_of_delta(1e-4) == 3
    assert b.N_of_delta(1e-6) == 10


def test_budget_divergent_raises():
    with pytest.raises(DivergentAlpha):
        budget(AlphaProfile.log(1.0), 2.0)


@pytest.mark.parametrize("delta", [1e-3, 1e-5, 1e-9])
def test_N_of_delta_definition(delta):
    b = InstabilityBudget(0.01, 2.0)
    N = b.N_of_delta(delta)
    assert 2 * 2.0 ** N * delta <= 0.01 < 2 * 2.0 ** (N + 1) * delta
    assert_allclose(b.nu(delta), 2.0 / (4 * N))


def test_N_of_delta_needs_small_delta():
    with pytest.raises(ValueError):
        InstabilityBudget(0.01, 2.0).N_of_delta(0.01)


@pytest.mark.parametrize("gamma", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("delta", [1e-4, 1e-6])
def test_sandwich_passes_for_integrable_alpha(gamma, delta):
    alpha = AlphaProfile.log(gamma)
    op = weights_sampling(0.0, 2.0, 1000)
    eta = budget(alpha, 2.0).eta
    # the budget of gamma = 1.5 is about 1e-58, below both deltas; scale them by eta
    d = delta if 2 * 2.0 * delta <= eta else delta * eta
    rep = sandwich_check(op, alpha, d)
    assert rep.verdict is Verdict.PASS
    assert rep.extras["N"] >= 1


def test_sandwich_borderline_fails_lower_bound():
    op = weights_sampling(0.0, 2.0, 1000)
    eta = budget(AlphaProfile.log(2.0), 2.0).eta
    rep = sandwich_check(op, AlphaProfile.log(1.0), 1e-12, eta=eta)
    assert rep.verdict is Verdict.FAIL
    assert {c.label for c in rep.violations} <= {"lower", "final_size"}


# --- cone ------------------------------------------------------------------------

def test_beta_closed_form():
    beta = beta_build(AlphaProfile.power(1.0, 0.5), 2.0, 1.0)
    r = np.geomspace(1e-9, beta.r0, 50)
    assert_allclose(beta(r), 2 * r ** 1.5, rtol=1e-12)
    assert_allclose(beta.r0, 0.02497, rtol=2e-3)
    assert np.all(np.diff(beta(r)) >= 0) and np.all(beta(r) <= r)


def test_beta_zero_profile():
    beta = beta_build(AlphaProfile.zero(), 2.0, 1.0)
    assert beta(0.5) == 0.0
    assert verify_hineq(beta, AlphaProfile.zero(), 2.0, 1000).verdict is Verdict.PASS


def test_beta_errors():
    with pytest.raises(DivergentAlpha):
        beta_build(AlphaProfile.log(1.0), 2.0, 1.0)
    with pytest.raises(ValueError):
        beta_build(AlphaProfile.power(1.0, 0.5), 2.0, 0.5 / math.log(2))


@pytest.mark.parametrize("alpha", [AlphaProfile.power(1.0, 0.5), AlphaProfile.power(1.0, 1.0),
                                   AlphaProfile.log(2.0)])
def test_hineq_holds_on_built_r0(alpha):
    beta = beta_build(alpha, 2.0, 1.0)
    assert verify_hineq(beta, alpha, 2.0, 1000).verdict is Verdict.PASS


def test_hineq_flags_oversized_r0():
    alpha = AlphaProfile.power(1.0, 0.5)
    beta = beta_build(alpha, 2.0, 1.0)
    big = BetaFn(beta.C, 10 * beta.r0, alpha)
    rep = verify_hineq(big, alpha, 2.0, 1000)
    assert rep.verdict is Verdict.FAIL


def test_cone_linear_system():
    beta = beta_build(AlphaProfile.power(1.0, 0.5), 2.0, 1.0)
    zero = lambda v, w, n: 0.0
    sys = ProductSystem(2.0, 0.5, zero, zero, 2.0, beta, AlphaProfile.power(1.0, 0.5))
    res = cone_simulate(sys, [(1e-6, 0.0)])
    assert res.report.verdict is Verdict.PASS
    assert res.steps_in_cone[0] == math.ceil(math.log2(beta.r0 / 1e-6))


def test_cone_precondition_violation_reported():
    alpha = AlphaProfile.power(1.0, 0.5)
    beta = beta_build(alpha, 2.0, 1.0)
    sys = adversarial_system(alpha, 2.0, beta)
    v = 1e-4
    res = cone_simulate(sys, [(v, 2 * beta(v)), (v, 0.0)])
    assert res.precondition_failures == (0,)
    assert res.report.verdict is Verdict.PASS


def test_cone_adversarial_random():
    alpha = AlphaProfile.power(1.0, 0.5)
    beta = beta_build(alpha, 2.0, 1.0)
    res = cone_simulate(adversarial_system(alpha, 2.0, beta), random_cone_seeds(beta, 100))
    assert res.report.verdict is Verdict.PASS and not res.precondition_failures


def test_product_system_rejects_bad_split():
    beta = beta_build(AlphaProfile.zero(), 2.0, 1.0)
    zero = lambda v, w, n: 0.0
    with pytest.raises(ValueError):
        ProductSystem(1.5, 0.5, zero, zero, 2.0, beta, AlphaProfile.zero())
    with pytest.raises(ValueError):
        ProductSystem(DiagonalOperator(np.array([2.0, 3.0])), 2.5, zero, zero, 2.0, beta,
                      AlphaProfile.zero())


# --- remainder profiles --------------------------------------------------------------

def test_remainder_of_linear_map_is_zero():
    prof = remainder_profile(LinearPart(Jordan2D()), [1e-2, 1e-4],
                             {"axes": [PlanarPoint(1.0, 0.0), PlanarPoint(0.0, 1.0)]})
    assert np.all(prof.alpha_hat == 0.0)


def test_scalar_profile_reproduces_alpha():
    alpha = AlphaProfile.log(2.0)
    r = np.geomspace(1e-1, 1e-10, 10)
    prof = remainder_profile(ScalarAlpha(2.0, alpha), r, {"unit": [1.0]})
    assert_allclose(prof.alpha_hat, alpha(r), rtol=1e-14)
    env = prof.envelope()
    assert_allclose(env(r), alpha(r), rtol=1e-12)


def test_power_fit_of_jordan_remainder():
    prof = remainder_profile(Jordan2D(), np.geomspace(1e-1, 1e-4, 8), {"v": [PlanarPoint(1.0, 0.0)]})
    b, p = prof.power_fit()
    assert_allclose([b, p], [1.0, 2.0], rtol=1e-8)


def test_profile_rejects_non_unit_direction():
    with pytest.raises(ValueError):
        remainder_profile(Jordan2D(), [1e-2], {"bad": [PlanarPoint(2.0, 0.0)]})


def test_gateaux_translate_mult_power_shift():
    spec = TranslateMult(shift=ShiftFn(ShiftKind.POWER, q=1.0))
    u = unit(spec.grid().with_values(spec.chi()))
    q = gateaux_quotient(spec, u, [2.0 ** -k for k in range(1, 13)])
    assert np.all(np.diff(q) < 0)
    assert q[-1] < 1e-3


def test_gateaux_translate_mult_log_shift_is_slow():
    spec = TranslateMult()
    u = unit(spec.grid().with_values(spec.chi()))
    q = gateaux_quotient(spec, u, [2.0 ** -k for k in range(1, 13)])
    assert np.all(np.diff(q[1:]) < 0)
    assert q[-1] > 1e-1


def test_gateaux_contract_support_hat():
    spec = ContractSupport(4097)
    u = spec.state(lambda x: np.maximum(0.0, 1 - np.abs(x + 0.5) * 2))
    q = gateaux_quotient(spec, u, [2.0 ** -k for k in range(1, 11)])
    assert np.all(np.diff(q) <= 0) and q[-1] < 1e-3


def test_sawtooth_defect_does_not_vanish():
    spec = TranslateMult(shift=ShiftFn(ShiftKind.POWER, q=1.0))
    dirs = [unit(sawtooth(spec, hp, -0.25, 0.25)) for hp in (1, 2, 3, 5, 10, 20, 50)]
    prof = remainder_profile(spec, [1e-2, 1e-3, 1e-4], {"saw": dirs})
    assert np.all(prof.alpha_hat > 0.1)


def test_xb_constant_below_bump_times_C():
    spec = TranslateMult()
    u = unit(spec.grid().with_values(spec.chi()))
    xb = xb_constant(spec, [u * r for r in (1e-1, 1e-2, 1e-4)])
    assert np.all(xb <= spec.bump.b * spec.shift.C)
    with pytest.raises(ValueError):
        xb_constant(TranslateMult(shift=ShiftFn(ShiftKind.POWER, q=1.0)), [u * 0.1])
