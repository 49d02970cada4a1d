from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from instab.errors import TruncationOverflow, WindowEdgeError
from instab.maps import (BumpFn, ContractSupport, Discont2D, Jordan2D, MapTag, ScalarAlpha, ShiftFn,
                         ShiftKind, ShiftMult, TranslateMult, big_set_cardinality, gallun_shift_sums,
                         map_from_config)
from instab.maps.base import snap_up
from instab.maps.contract_support import support_bound
from instab.maps.discont2d import discont_decay_margins, in_region
from instab.maps.jordan2d import jordan_orbit_bounds
from instab.maps.scalar import closed_form
from instab.maps.shift_mult import overflow_guard, stability_threshold
from instab.maps.translate_mult import cardinality_bound, growth_bound, sawtooth, seed_states, unit
from instab.operators import WeightSeq
from instab.spaces import GridFunction1D, NormKind, PlanarPoint, SeqVector, norm, support_interval
from instab.theory.alpha import AlphaProfile

ALL_MAPS = [
    Jordan2D(), Discont2D(), ShiftMult(), TranslateMult(), TranslateMult(dilate=True),
    ContractSupport(), ScalarAlpha(2.0, AlphaProfile.log(2.0)),
]


@pytest.mark.parametrize("spec", ALL_MAPS, ids=lambda s: s.tag.value)
def test_zero_is_fixed(spec):
    z = spec.zero()
    assert spec.norm(spec.apply(z)) == 0.0


@pytest.mark.parametrize("spec", ALL_MAPS, ids=lambda s: s.tag.value)
def test_config_round_trip(spec):
    back = map_from_config(spec.to_config())
    assert back.to_config() == spec.to_config()


def test_map_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        map_from_config({"tag": "JORDAN2D", "p": 1})


def test_jordan_step_example():
    out = Jordan2D().apply(PlanarPoint(0.5, 0.125))
    assert (out.v, out.w) == (0.5, 0.123046875)


def test_jordan_remainder_is_cubic():
    spec = Jordan2D()
    r = spec.remainder(PlanarPoint(0.3, -0.2))
    assert_allclose([r.v, r.w], [-0.027, 0.008], rtol=1e-12)


def test_jordan_bounds_small_grid():
    v0, w0 = np.meshgrid(np.linspace(-0.5, 0.5, 5), np.linspace(-0.125, 0.125, 5))
    res = jordan_orbit_bounds(v0.ravel(), w0.ravel(), 2000)
    assert min(res["v_bound"], res["w_bound"], res["comparison"]) >= -1e-10


def test_discont_examples():
    spec = Discont2D()
    out = spec.apply(PlanarPoint(1.0, 0.5))     # inside 0 < |w| < v^2
    assert (out.v, out.w) == (0.0, 0.5)
    out = spec.apply(PlanarPoint(1.0, 0.0))     # w = 0 is outside
    assert (out.v, out.w) == (2.0, 0.25)


def test_discont_region_is_strict():
    assert not in_region(1.0, 1.0)
    assert not in_region(1.0, 0.0)
    assert in_region(1.0, -0.99)


def test_discont_gateaux_but_not_frechet():
    spec = Discont2D()
    # along the parabola w = v^2/2 the remainder is 2v, as large as u itself
    for v in (1e-2, 1e-4, 1e-6):
        u = PlanarPoint(v, v * v / 2)
        q = norm(spec.remainder(u)) / norm(u)
        assert q > 1.9
    # along any fixed direction the quotient vanishes
    d = PlanarPoint(0.6, 0.8)
    qs = [norm(spec.apply(d * lam) * (1 / lam) - spec.linearized_apply(d)) for lam in (1e-2, 1e-4)]
    assert qs[1] < qs[0] < 1e-1


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1).filter(lambda w: w != 0.0))
def test_discont_decay_property_off_axis(v0, w0):
    m = discont_decay_margins(np.array([v0]), np.array([w0]), 60)
    assert np.all(m >= -1e-10)


@pytest.mark.parametrize("v0", [1.0, 1e-3, -0.5])
def test_discont_decay_bound_breaks_on_axis_at_first_step(v0):
    # (v0, 0) -> (2 v0, v0^2/4): v1^2 + |w1| = 4.25 v0^2 > 4 v0^2; later steps obey the bound
    m = discont_decay_margins(np.array([v0]), np.array([0.0]), 40)
    assert_allclose(m[0], -1 / 16, rtol=1e-12)
    assert np.all(m[1:] >= 0)


def test_shift_mult_matches_definition():
    spec = ShiftMult(1.0)
    u = SeqVector([0.3, -0.1, 0.2, 0.0])
    r = norm(u)
    m = WeightSeq()(np.arange(4))
    expect = np.zeros(4)
    expect[1:] = (1 - r) * m[1:] * u.values[:-1]
    assert_allclose(spec.apply(u).values, expect, rtol=1e-15)
    assert_allclose(spec.remainder(u).values, -r * spec.linearized_apply(u).values, rtol=1e-14)


def test_shift_mult_truncation_guard():
    with pytest.raises(TruncationOverflow):
        overflow_guard(SeqVector([0.0, 1.0]))
    with pytest.raises(TruncationOverflow):
        ShiftMult().apply(SeqVector([0.0, 1.0]))


def test_band_norms_match_direct_iteration():
    spec = ShiftMult(1.0)
    seed = np.array([0.01, -0.02, 0.005])
    band = spec.band_norms(seed[None, :], 30)[0]
    u = SeqVector(np.concatenate([seed, np.zeros(40)]))
    direct = [norm(u)]
    for _ in range(30):
        u = spec.apply(u)
        direct.append(norm(u))
    assert_allclose(band, direct, rtol=1e-13)


def test_stability_threshold_definition():
    w = WeightSeq()
    for eps in (0.5, 0.54, 0.6):
        N, dmax = stability_threshold(1.0, w, eps)
        damp = 1 - eps / 2
        assert w(N) * damp < 1 <= w(N - 1) * damp
        assert_allclose(dmax, eps / (2 * np.prod(w(np.arange(1, N + 1)))), rtol=1e-12)
    assert stability_threshold(1.0, w, 0.54)[0] == 13


def test_log_shift_values():
    h = ShiftFn(ShiftKind.LOG, C=2.0)
    assert_allclose(h(math.exp(-4)), 0.5)
    assert h(1.0) == math.inf and h(0.0) == 0.0


def test_shift_table_interpolates_from_origin():
    h = ShiftFn(ShiftKind.TABLE, table_s=(1.0, 2.0), table_h=(0.5, 1.5))
    assert_allclose([h(0.5), h(1.5), h(3.0)], [0.25, 1.0, 2.5])


def test_bump_profile():
    chi = BumpFn(1.0, 2.0)
    assert chi(0.0) == 2.0 and chi(1.0) == 0.0 and chi(-1.5) == 0.0
    with pytest.raises(ValueError):
        BumpFn(1.0, 1.0)


def test_translate_mult_linear_part_is_multiplication():
    spec = TranslateMult()
    u = unit(spec.state(lambda x: np.exp(-x ** 2) * (np.abs(x) < 3)))
    assert_allclose(spec.linearized_apply(u).values, spec.chi() * u.values)


def test_translate_mult_shift_on_grid():
    spec = TranslateMult(shift=ShiftFn(ShiftKind.POWER, q=1.0), shift_mode="ceil")
    g = spec.grid()
    u = g.with_values(np.where(np.abs(g.x) < 0.5, 1e-3, 0.0))
    s = spec.shift_amount(u)
    k = int(round(s / g.dx))
    assert_allclose(s, k * g.dx, rtol=1e-12)
    moved = spec.apply(u).values
    expect = spec.chi() * np.concatenate([np.zeros(k), u.values[:-k]])
    assert_allclose(moved, expect, rtol=0, atol=0)


def test_translate_mult_window_edge():
    spec = TranslateMult()
    g = spec.grid()
    v = np.zeros(g.n)
    v[-1] = 1.0
    with pytest.raises(WindowEdgeError):
        spec.apply(g.with_values(v))


def test_large_norm_is_annihilated():
    spec = TranslateMult()
    u = unit(spec.state(lambda x: np.exp(-x ** 2) * (np.abs(x) < 3))) * 2.0
    assert norm(spec.apply(u)) == 0.0


def test_gallun_table_and_bounds():
    spec = TranslateMult()
    norms = [0.1, 0.05, 0.02]
    S = gallun_shift_sums(spec, norms)
    h = [2 / abs(math.log(r)) for r in norms[:2]]
    assert_allclose(S[0, 2], h[0] + h[1])
    assert S[1, 1] == 0.0 and np.isnan(S[2, 0])
    assert big_set_cardinality([1.0, 0.5, 0.1, 0.6], 0.5) == 2
    assert_allclose(cardinality_bound(spec, math.exp(-2)), 3.0)
    for d in (1e-2, 1e-4):
        assert_allclose(growth_bound(spec, d), 2 * d ** (1 - math.log(2)), rtol=1e-12)


def test_seed_states_unit_and_inside():
    spec = TranslateMult()
    seeds = seed_states(spec)
    assert len(seeds) == 3 + 1 + 3 + 16
    for s in seeds:
        assert_allclose(norm(s), 1.0, rtol=1e-12)
        lo, hi = support_interval(s)
        assert -1.0 <= lo and hi <= 1.0
    saw = sawtooth(spec, 1, -0.25, 0.25).values
    inside = saw[saw != 0]
    assert np.all(inside[1:] == -inside[:-1])


def test_contract_support_examples():
    spec = ContractSupport(4097)
    u = spec.state(lambda x: 1 + x)
    lin = spec.linearized_apply(u)
    lo, _ = support_interval(lin)
    assert_allclose(lo, -0.5 + u.dx)
    assert_allclose(norm(lin, NormKind.SUP), 2.0)
    # the nonlinear map shifts left by |u|^2 = 1: (F u)(x) = 2 (1 + 2x - 1) on [-1/2+..., 0]
    f = spec.apply(u)
    assert norm(f, NormKind.SUP) == 0.0
    small = u * 0.1
    fs = spec.apply(small)
    x = fs.x
    expect = np.where(2 * x - 0.01 >= -1, 0.2 * (1 + 2 * x - 0.01), 0.0)
    assert_allclose(fs.values, expect, atol=1e-15)
    assert support_bound(3) == -0.125


def test_contract_support_ceil_snaps():
    assert snap_up(0.3, 0.25) == 0.5
    assert snap_up(0.5, 0.25) == 0.5
    spec = ContractSupport(4097, "ceil")
    u = spec.state(lambda x: 0.1 * (1 + x))
    s = spec.shift_amount(u)
    assert s >= 0.01 and abs(s / u.dx - round(s / u.dx)) < 1e-9


def test_contract_support_rejects_nonzero_left_end():
    spec = ContractSupport(9)
    bad = GridFunction1D(-1.0, 0.0, np.ones(9))
    with pytest.raises(ValueError):
        spec.apply(bad)


def test_scalar_map_and_closed_form():
    spec = ScalarAlpha(2.0, AlphaProfile.log(2.0))
    u = 1e-3
    assert_allclose(spec.apply(u), 2e-3 - u / math.log(1e-3) ** 2, rtol=1e-15)
    orbit = [1e-6]
    for _ in range(12):
        orbit.append(spec.apply(orbit[-1]))
    assert_allclose(closed_form(spec, np.array(orbit)), orbit, rtol=1e-12)
