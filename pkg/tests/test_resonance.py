import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from spingp.core import NEUTRON
from spingp.geophase import ParityMismatch
from spingp.resonance import (
    ResonanceSpec,
    pair_for_ratio,
    physical_point,
    resonances_for_kl,
    resonances_in_range,
    spec_from_pair,
)
from spingp.scattering import channel_scattering


def kl_for_m(m):
    return math.pi * math.sqrt(m / 2)


def test_resonance_at_sqrt10_pi():
    found = resonances_for_kl(math.sqrt(10) * math.pi)
    assert [(s.n_plus, s.n_minus) for s in found] == [(2, 4)]
    assert found[0].epsilon_exact == Fraction(3, 5)
    assert abs(found[0].epsilon - 0.6) < 1e-12


def test_four_pi_is_trivial_only():
    assert resonances_for_kl(4 * math.pi) == []
    assert resonances_for_kl(4 * math.pi, include_trivial=True) == [ResonanceSpec(4, 4)]


def test_pi_is_empty():
    assert resonances_for_kl(math.pi) == []
    assert resonances_for_kl(math.pi, include_trivial=True) == [ResonanceSpec(1, 1)]


def test_near_miss_rejected():
    assert resonances_for_kl(math.sqrt(10) * math.pi * (1 + 1e-7)) == []


def test_kl_must_be_positive():
    with pytest.raises(ValueError):
        resonances_for_kl(0.0)


def test_spec_from_pair_examples():
    s = spec_from_pair(2, 4)
    assert (s.epsilon, s.xi, s.q) == (0.6, 1, 2.0)
    assert s.kl == pytest.approx(math.sqrt(10) * math.pi, rel=1e-15)
    s = spec_from_pair(3, 9)
    assert (s.xi, s.q, s.epsilon_exact) == (3, 3.0, Fraction(4, 5))


@pytest.mark.parametrize("pair", [(1, 2), (2, 5), (4, 7)])
def test_parity_mismatch(pair):
    with pytest.raises(ParityMismatch):
        spec_from_pair(*pair)


@pytest.mark.parametrize("pair", [(0, 2), (3, 3), (5, 1), (1.5, 3)])
def test_invalid_pairs(pair):
    with pytest.raises(ValueError):
        spec_from_pair(*pair)


@given(st.integers(1, 400), st.integers(1, 200))
def test_spec_params_hit_lattice(n_plus, half_gap):
    spec = spec_from_pair(n_plus, n_plus + 2 * half_gap)
    p = spec.params()
    assert math.sqrt(p.kplus_sq_l2) == pytest.approx(math.pi * spec.n_plus, abs=1e-12 * spec.n_minus)
    assert p.kminus_l == pytest.approx(math.pi * spec.n_minus, abs=1e-12 * spec.n_minus)
    assert p.kappa0_l == pytest.approx(spec.kappa0_l, rel=1e-12)
    assert 0 < spec.epsilon < 1


def _brute(bound):
    table = {}
    for a in range(1, bound + 1):
        for b in range(a + 2, bound + 1, 2):
            table.setdefault(a * a + b * b, []).append((a, b))
    return table


def test_enumeration_completeness():
    # n_- can reach sqrt(5000) ~ 70.7 on this range, so a bound of 50 alone
    # would not see every lattice point; check both views
    full, small = _brute(71), _brute(50)
    for m in range(2, 5001):
        got = [(s.n_plus, s.n_minus) for s in resonances_for_kl(kl_for_m(m))]
        assert got == full.get(m, []), m
        assert [p for p in got if p[1] <= 50] == small.get(m, []), m


def test_range_scan_matches_brute_force():
    found = [(s.n_plus, s.n_minus) for s in resonances_in_range(math.pi, 5 * math.pi)]
    expect = sorted(
        ((a, b) for a in range(1, 11) for b in range(a + 2, 11, 2) if 2 <= a * a + b * b <= 50),
        key=lambda p: (p[0] ** 2 + p[1] ** 2, p[0]),
    )
    assert found == expect


def test_round_trip_and_transparency():
    for m in range(2, 2001):
        for spec in resonances_for_kl(kl_for_m(m)):
            assert spec_from_pair(spec.n_plus, spec.n_minus) == spec
            p = spec.params()
            for ch in (1, -1):
                assert channel_scattering(p, ch).r < 1e-20


@pytest.mark.parametrize(
    "q, pair, exact",
    [(2, (2, 4), True), (3, (1, 3), True), ("1.2", (10, 12), True), (10, (2, 20), True),
     (Fraction(5, 3), (3, 5), True), (1.2, (10, 12), True),
     (math.sqrt(2), (985, 1393), False), (math.pi, (113, 355), False), (1.0000001, (20000, 20002), False)],
)
def test_pair_for_ratio(q, pair, exact):
    spec, was_exact = pair_for_ratio(q)
    assert was_exact is exact
    assert (spec.n_plus, spec.n_minus) == pair
    assert (spec.n_minus - spec.n_plus) % 2 == 0


def test_pair_for_ratio_rejects_small_q():
    for q in (1, 0.5, "3/4", math.nan):
        with pytest.raises(ValueError):
            pair_for_ratio(q)


@given(st.integers(1, 300), st.integers(1, 300))
def test_pair_for_ratio_recovers_float_rationals(b, extra):
    spec, exact = pair_for_ratio((b + extra) / b)
    frac = Fraction(b + extra, b)
    assert exact and Fraction(spec.n_minus, spec.n_plus) == frac
    assert spec.n_plus in (frac.denominator, 2 * frac.denominator)


@given(st.floats(1.001, 50.0))
def test_pair_for_ratio_nearest_bound(q):
    spec, _ = pair_for_ratio(q, cap=1000)
    assert abs(spec.q - q) <= 1 / 2000 + 1e-12
    assert (spec.n_minus - spec.n_plus) % 2 == 0


def test_physical_point_speed_scale():
    # kL ~ 10 over a micron
    spec = spec_from_pair(1, 3)
    v, _ = physical_point(spec, 1e-6)
    assert v == pytest.approx(0.63 * spec.kl / 10, rel=0.01)
    assert 0.1 < v < 10


def test_physical_point_q10_field():
    spec = spec_from_pair(2, 20)
    length = NEUTRON.hbar * spec.kl / NEUTRON.mass  # gives v = 1 m/s
    v, b0 = physical_point(spec, length)
    assert v == pytest.approx(1.0, rel=1e-12)
    assert b0 == pytest.approx(0.17, rel=0.01)


def test_physical_point_scaling():
    spec = spec_from_pair(2, 4)
    v1, b1 = physical_point(spec, 1e-6)
    v2, b2 = physical_point(spec, 2e-6)
    assert v2 == pytest.approx(v1 / 2, rel=1e-12)
    assert b2 == pytest.approx(b1 / 4, rel=1e-12)
    with pytest.raises(ValueError):
        physical_point(spec, 0.0)
