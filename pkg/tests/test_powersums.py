import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerroots.blackbox import deflated_oracle, oracle_from_coeffs, reversed_oracle
from powerroots.errors import CapError, DomainError, LowConfidence, NormalizationError, PoleError
from powerroots.polycore import Disc, Poly, from_roots, reverse
from powerroots.powersums import (CauchyParams, PowerSumSource, cauchy_error_bound, cauchy_sum,
                                  cauchy_sum_disc, cauchy_sums, choose_q, newton_power_sums,
                                  random_rotation, reciprocal_power_sums, root_count,
                                  scaled_params, subtract_zeros, zero_power_sums)


def _closed_form(roots, h, q, rotation=0.0):
    rot = np.exp(-1j * rotation)
    return sum(x ** h / (1 - (x * rot) ** q) for x in roots)


def _roots_avoiding_unity(rng, d):
    out = []
    while len(out) < d:
        r = rng.uniform(0.2, 3)
        if abs(r - 1) > 0.1:
            out.append(r * np.exp(2j * np.pi * rng.uniform()))
    return out


def test_newton_identities_examples():
    est = newton_power_sums([1, -3, 2], 1)
    assert [e.value for e in est] == [3, 5]
    assert est[0].source is PowerSumSource.NEWTON_IDENTITIES
    assert est[0].bound is None
    assert newton_power_sums([1, 0.25, 7], 0)[0].value == -0.25
    assert all(e.value == 0 for e in newton_power_sums([1, 0, 0], 5))


def test_newton_identities_need_normalization():
    with pytest.raises(NormalizationError):
        newton_power_sums([2, 1], 1)


def test_newton_identities_cover_both_orientations():
    roots = np.array([0.5, -2j, 3 + 1j])
    p = from_roots(roots)
    recip = [e.value for e in reciprocal_power_sums(p, 4)]
    direct = [e.value for e in zero_power_sums(p, 4)]
    for i in range(1, 6):
        assert recip[i - 1] == pytest.approx(np.sum(roots ** -i), rel=1e-12)
        assert direct[i - 1] == pytest.approx(np.sum(roots ** i), rel=1e-12)


def test_cauchy_sum_examples():
    assert cauchy_sum(oracle_from_coeffs(Poly([0, 1])), 0, 4) == pytest.approx(1, abs=1e-15)
    o = oracle_from_coeffs(from_roots([0.5, 0.25]))
    want = 0.5 / (1 - 0.5 ** 8) + 0.25 / (1 - 0.25 ** 8)
    assert abs(cauchy_sum(o, 1, 8) - want) < 1e-14
    with pytest.raises(PoleError):
        cauchy_sum(oracle_from_coeffs(Poly([-1, 0, 1])), 0, 4)


def test_cauchy_sum_domain():
    o = oracle_from_coeffs(Poly([1, 1]))
    with pytest.raises(DomainError):
        cauchy_sum(o, 4, 4)


@pytest.mark.parametrize("q", [3, 5, 8, 13])
def test_folded_fast_path_matches_direct(q):
    # q < d selects the folded transform on a coefficient oracle
    roots = [0.5, -0.3j, 2, 1.7 + 0.4j, -2.5, 0.9j, 3, -0.6 + 0.2j, 1.4j, -1.9, 2.2 - 2j,
             0.2, 4, -3j]
    o = oracle_from_coeffs(from_roots(roots))
    assert q < o.degree
    for rot in (0.0, 0.4):
        got = cauchy_sums(o, q, range(q), rot)
        before = o.eval_count
        direct = cauchy_sums(reversed_oracle(reversed_oracle(o)), q, range(q), rot)
        assert o.eval_count - before == q
        assert np.allclose(got, direct, rtol=1e-9, atol=1e-9)


def test_folded_path_counts_evaluations():
    o = oracle_from_coeffs(from_roots([0.5, 2, -3, 4]))
    cauchy_sum(o, 0, 3)
    assert o.eval_count == 3


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0, 2 * math.pi))
def test_rotation_closed_form(seed, rot):
    rng = np.random.default_rng(seed)
    roots = _roots_avoiding_unity(rng, int(rng.integers(1, 7)))
    o = oracle_from_coeffs(from_roots(roots))
    for q in (4, 9):
        for h in (0, 2):
            want = _closed_form(roots, h, q, rot)
            assert abs(cauchy_sum(o, h, q, rot) - want) <= 1e-9 * (1 + abs(want))


def test_rotation_within_twice_bound():
    roots = [0.3, -0.4j, 3, -2.5 + 1j]
    o = oracle_from_coeffs(from_roots(roots))
    theta = 2.0
    for q in (8, 16):
        b = cauchy_error_bound(4, theta, 1, q)
        assert abs(cauchy_sum(o, 1, q, 1.1) - cauchy_sum(o, 1, q)) <= 2 * b


def test_cauchy_sum_disc_examples():
    o = oracle_from_coeffs(from_roots([3, 10]))
    assert abs(cauchy_sum_disc(o, Disc(3, 2), 0, CauchyParams(16)).value - 1) < 1e-4
    est = cauchy_sum_disc(o, Disc(3, 2), 1, CauchyParams(32))
    assert abs(est.value) < 1e-9
    assert est.bound == cauchy_error_bound(2, 2.0, 1, 32)
    o2 = oracle_from_coeffs(from_roots([0.3, 4]))
    ident = cauchy_sum_disc(o2, Disc(0, 1), 2, CauchyParams(16))
    assert ident.value == cauchy_sum(o2, 2, 16)


def test_cauchy_sums_disc_power_sums_of_scaled_zeros():
    roots = [2 + 0.1j, 2.5, 9]
    o = oracle_from_coeffs(from_roots(roots))
    disc = Disc(2, 1)
    for h in (0, 1, 2):
        est = cauchy_sum_disc(o, disc, h, CauchyParams(64))
        want = sum(((x - 2) / 1) ** h for x in roots[:2])
        # truncation bound plus rounding in the q-point sum
        assert abs(est.value - want) <= est.bound + 64 * 2.0 ** -52 * 4


def test_newton_cauchy_cross_check():
    roots = np.array([0.8, 1.5j, -2.0, 2.5 + 0.5j])
    p = from_roots(roots)
    newton = [e.value for e in reciprocal_power_sums(p, 4)]
    o = reversed_oracle(oracle_from_coeffs(p))
    rho = 2.0 / min(abs(roots))
    params = CauchyParams(q=64, theta=1.5, rho=rho)
    for h in range(1, 6):
        est = cauchy_sum_disc(o, Disc(0, rho), h, params)
        assert abs(est.value * rho ** h - newton[h - 1]) <= est.bound * rho ** h + 1e-9


def test_error_bound_examples():
    assert cauchy_error_bound(4, 2, 0, 10) == 4 / 1023
    assert cauchy_error_bound(4, 2, 3, 10) == pytest.approx(2 ** 3 * cauchy_error_bound(4, 2, 0, 10))
    with pytest.raises(DomainError):
        cauchy_error_bound(4, 1.0, 0, 10)
    # stays finite past the double range of theta**q
    big = cauchy_error_bound(4, 2, 1000, 1500)
    assert big == pytest.approx(4 * 2.0 ** -500)


def test_choose_q_minimal():
    q = choose_q(4, 2, 0, 10)
    assert q == 13
    assert cauchy_error_bound(4, 2, 0, q) <= 2 ** -10
    assert cauchy_error_bound(4, 2, 0, q - 1) > 2 ** -10


@given(st.integers(1, 30), st.floats(1.05, 8), st.integers(0, 20), st.integers(1, 40),
       st.floats(0.1, 10))
def test_choose_q_minimality_property(d, theta, h, b0, rho):
    q = choose_q(d, theta, h, b0, rho)
    dd = d * max(rho, 1.0)
    assert q >= h + 1
    assert cauchy_error_bound(dd, theta, h, q) <= 2.0 ** -b0
    if q > h + 1:
        assert cauchy_error_bound(dd, theta, h, q - 1) > 2.0 ** -b0


def test_choose_q_translation_in_h():
    base = choose_q(4, 2, 0, 10)
    assert choose_q(4, 2, 5, 10) == base + 5


def test_choose_q_cap():
    with pytest.raises(CapError, match="rescale"):
        choose_q(8, 1.000001, 0, 30)
    with pytest.raises(CapError):
        choose_q(4, 1.0001, 0, 30, q_cap=2 ** 16)
    with pytest.raises(DomainError):
        choose_q(4, 1.0, 0, 10)


def test_scaled_params_examples():
    p = scaled_params(8, 4, 10)
    assert p.theta == pytest.approx(2 ** (1 / 8))
    assert p.q == 105
    assert scaled_params(1, 4, 10).theta == 2.0
    assert cauchy_error_bound(4, p.theta, 8, p.q) <= 2 ** -10


@given(st.integers(1, 40), st.integers(1, 20), st.integers(1, 50))
def test_scaled_params_bound_property(h, d, b0):
    p = scaled_params(h, d, b0)
    assert cauchy_error_bound(d, p.theta, h, p.q) <= 2.0 ** -b0 * (1 + 1e-12)


def test_params_validation():
    with pytest.raises(DomainError):
        CauchyParams(0)
    with pytest.raises(DomainError):
        CauchyParams(8, theta=1.0)
    with pytest.raises(DomainError):
        CauchyParams(8, rho=0)


def test_root_count_examples():
    o = oracle_from_coeffs(from_roots([3, 10]))
    assert root_count(o, Disc(0, 5), 32) == 1
    assert root_count(o, Disc(20, 2)) == 0
    roots = [0.5, -1j, 2 + 2j, -3, 4j]
    o = oracle_from_coeffs(from_roots(roots))
    assert root_count(o, Disc(0, 100)) == 5


def test_root_count_rotation_invariant():
    o = oracle_from_coeffs(from_roots([0.5, -1j, 2 + 2j, -3, 4j]))
    for r, want in ((0.7, 1), (1.5, 2), (3.5, 4), (6, 5)):
        for rot in (0, 0.3, random_rotation(7)):
            assert root_count(o, Disc(0, r), 64, rotation=rot) == want


def test_root_count_low_confidence():
    o = oracle_from_coeffs(from_roots([1.0001, 5]))
    with pytest.warns(LowConfidence):
        root_count(o, Disc(0, 1), 8)


def test_random_rotation_seeded():
    assert random_rotation(3) == random_rotation(3)
    assert 0 <= random_rotation(3) < 2 * math.pi


def test_subtract_zeros_matches_deflated_sums():
    roots = [0.3, 0.5j, -0.7, 2]
    o = oracle_from_coeffs(from_roots(roots))
    hs = [2, 3]
    full = cauchy_sums(o, 16, hs, 0.3)
    got = subtract_zeros(full, hs, [0.5j, 2], 16, 0.3)
    want = cauchy_sums(deflated_oracle(o, [0.5j, 2]), 16, hs, 0.3)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-14)


def test_threaded_stage_one_is_deterministic():
    o = oracle_from_coeffs(from_roots([0.5, -1j, 2 + 2j]))
    t = reversed_oracle(reversed_oracle(o))
    a = cauchy_sums(t, 256, [0, 1, 5], threads=1)
    b = cauchy_sums(t, 256, [0, 1, 5], threads=4)
    assert np.array_equal(a, b)
