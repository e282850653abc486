import cmath
import math
import warnings

import numpy as np
import pytest

from powerroots.blackbox import companion_matrix, matrix_oracle, oracle_from_coeffs
from powerroots.errors import DegenerateCenter, DomainError, PowerRootsError, SeparationError
from powerroots.polycore import Poly, from_roots
from powerroots.reference import multiset_distance, reference_roots
from powerroots.solver import (Pipeline, SolverConfig, largest_root, lehmer_newton, newton_refine,
                               root_sequence, roots_near, smallest_root)

CFG = SolverConfig(eps_bits=20, b0=24, seed=1)
BOUND = 2.0 ** -20 + 2.0 ** -24


def _oracle(roots):
    return oracle_from_coeffs(from_roots(roots))


def _separated(rng, d, ratio=0.5):
    # |x_d| / |x_{d-1}| <= ratio
    xd = rng.uniform(0.2, 2) * cmath.exp(2j * math.pi * rng.uniform())
    rest = abs(xd) / ratio * rng.uniform(1, 3, d - 1) * np.exp(
        2j * np.pi * rng.uniform(0, 1, d - 1))
    return xd, [xd, *rest]


def test_config_defaults_and_validation():
    cfg = SolverConfig()
    assert cfg.q_cap == 2 ** 20 and cfg.max_rounds == 64 and cfg.refine
    assert cfg.samples(4) == 32 and cfg.samples(20) == 80
    assert SolverConfig(sample_q=7).samples(100) == 7
    assert cfg.eps == 2.0 ** -20
    for bad in ({"eps_bits": 0}, {"q_cap": -1}, {"sample_q": 0}):
        with pytest.raises(DomainError):
            SolverConfig(**bad)


def test_newton_refine_sqrt2():
    out = newton_refine(oracle_from_coeffs(Poly([-2, 0, 1])), 1.5, tol=1e-13)
    assert abs(out.z - math.sqrt(2)) < 1e-12
    assert out.eval_count <= 6
    assert out.converged


def test_newton_refine_at_zero():
    out = newton_refine(oracle_from_coeffs(Poly([-2, 1])), 2)
    assert out.z == 2 and out.residual == 0 and out.converged


def test_newton_refine_double_root_halves():
    out = newton_refine(oracle_from_coeffs(Poly([0, 0, 1])), 1, tol=1e-300, maxit=30)
    assert not out.converged
    assert out.z == pytest.approx(2.0 ** -30)


def test_lehmer_zero_at_origin():
    out = lehmer_newton(_oracle([0, 2]), CFG)
    assert out.z == 0 and out.residual == 0


def test_lehmer_three_roots():
    out = lehmer_newton(_oracle([0.3, 2, -1.5]), CFG)
    assert out.converged
    assert out.residual <= CFG.eps
    assert abs(out.z - 0.3) <= CFG.eps


def test_lehmer_degenerate_center():
    with pytest.warns(DegenerateCenter):
        out = lehmer_newton(oracle_from_coeffs(Poly([1, 0, 1])), CFG)
    assert out.converged
    assert min(abs(out.z - 1j), abs(out.z + 1j)) <= CFG.eps


def test_lehmer_not_converged_flag():
    out = lehmer_newton(_oracle([0.3, 2, -1.5]), SolverConfig(eps_bits=60, max_rounds=1,
                                                             refine=False))
    assert not out.converged
    assert out.residual > 2.0 ** -60


def test_lehmer_soundness():
    rng = np.random.default_rng(40)
    for _ in range(15):
        d = int(rng.integers(1, 9))
        _, roots = _separated(rng, d, 1 / 1.3)
        out = lehmer_newton(_oracle(roots), CFG)
        if out.converged:
            assert out.residual <= CFG.eps
            assert min(abs(np.array(roots) - out.z)) <= out.residual * (1 + 1e-9)


def test_smallest_examples():
    out = smallest_root(_oracle([0.1, 0.9]), CFG)
    assert out.pipeline is Pipeline.EXTREMAL_SMALL
    assert abs(out.estimate - 0.1) <= BOUND
    assert out.error_bound <= BOUND
    assert abs(out.z - 0.1) < 1e-14
    a = 1.5 - 2j
    out = smallest_root(oracle_from_coeffs(Poly([-a, 1])), CFG)
    assert abs(out.z - a) < 1e-12
    with pytest.raises(SeparationError):
        smallest_root(_oracle([1, -1]), CFG)


def test_smallest_zero_root():
    out = smallest_root(_oracle([0, 3]), CFG)
    assert out.z == 0


def test_largest_examples():
    out = largest_root(_oracle([2, 3]), CFG)
    assert out.pipeline is Pipeline.EXTREMAL_LARGE
    assert abs(out.estimate - 3) <= out.error_bound
    assert abs(out.z - 3) < 1e-12
    out = largest_root(oracle_from_coeffs(Poly([4j, 1])), CFG)
    assert abs(out.z + 4j) < 1e-12
    with pytest.raises(SeparationError):
        largest_root(_oracle([2e3, 2e3 * cmath.exp(1j * math.pi / 3)]), CFG)


def test_smallest_bound_holds_before_refinement():
    rng = np.random.default_rng(41)
    for _ in range(20):
        d = int(rng.integers(1, 9))
        xd, roots = _separated(rng, d)
        out = smallest_root(_oracle(roots), CFG)
        assert abs(out.estimate - xd) <= BOUND
        assert abs(out.estimate - xd) <= out.error_bound
        assert abs(out.z - xd) <= 1e-12 * max(1, abs(xd))


def test_eval_count_matches_counter():
    o = _oracle([0.4, -2, 3j])
    for fn in (smallest_root, largest_root, lehmer_newton):
        before = o.eval_count
        out = fn(o, CFG)
        assert out.eval_count == o.eval_count - before > 0


def test_deterministic():
    a = smallest_root(_oracle([0.4, -2, 3j]), CFG)
    b = smallest_root(_oracle([0.4, -2, 3j]), CFG)
    assert a == b


def test_thread_count_does_not_change_results():
    roots = [0.4, -2, 3j, 1.7 + 1.7j]
    a = smallest_root(_oracle(roots), SolverConfig(seed=2, threads=1))
    b = smallest_root(_oracle(roots), SolverConfig(seed=2, threads=4))
    assert a.z == b.z and a.error_bound == b.error_bound


def test_root_sequence_examples():
    out = root_sequence(_oracle([0.2, 0.5, 3]), 2, CFG)
    assert [r.z for r in out] == pytest.approx([0.2, 0.5], abs=1e-12)
    assert root_sequence(_oracle([0.2, 0.5, 3]), 0, CFG) == []
    with pytest.raises(SeparationError) as info:
        root_sequence(_oracle([0.2, 0.2 * cmath.exp(1j)]), 2, CFG)
    assert info.value.index == 1 and info.value.partial == []
    with pytest.raises(DomainError):
        root_sequence(_oracle([1, 2]), 3, CFG)


def test_root_sequence_partial_results():
    # 2 and -2 tie once 0.5 is removed
    with pytest.raises(SeparationError) as info:
        root_sequence(_oracle([0.5, 2, -2]), 3, CFG)
    assert info.value.index == 2
    assert [r.z for r in info.value.partial] == pytest.approx([0.5], abs=1e-12)


def test_root_sequence_full_deflation_matches_reference():
    rng = np.random.default_rng(42)
    for _ in range(10):
        d = int(rng.integers(1, 9))
        mods = np.cumprod(rng.uniform(1.4, 2.0, d)) * 0.3
        roots = mods * np.exp(2j * np.pi * rng.uniform(0, 1, d))
        p = from_roots(roots)
        out = root_sequence(oracle_from_coeffs(p), d, CFG)
        tol = max(max(r.error_bound for r in out), 1e-6)
        assert multiset_distance([r.z for r in out], reference_roots(p)) <= tol


def test_roots_near_examples():
    o = _oracle([1, 5])
    a, b = roots_near(o, [0.9, 5.2], CFG)
    assert abs(a.z - 1) < 1e-12 and abs(b.z - 5) < 1e-12
    exact = roots_near(o, [5], CFG)[0]
    assert exact.z == 5 and exact.residual == 0
    tie, ok = roots_near(o, [3, 0.5], CFG)
    assert isinstance(tie, SeparationError)
    assert abs(ok.z - 1) < 1e-12


def test_roots_near_threads_keep_order():
    o = _oracle([1, 5, -3j])
    centers = [4.8, 0.1, -2.5j, 1.2]
    seq = roots_near(o, centers, SolverConfig(seed=3))
    par = roots_near(o, centers, SolverConfig(seed=3, threads=4))
    assert [r.z for r in seq] == [r.z for r in par]
    assert [r.z for r in seq] == pytest.approx([5, 1, -3j, 1], abs=1e-12)


def test_roots_near_eval_counts_sum_to_total():
    o = _oracle([1, 5, -3j])
    before = o.eval_count
    out = roots_near(o, [4.8, 0.1], CFG)
    assert sum(r.eval_count for r in out) == o.eval_count - before


def test_matrix_oracle_pipelines():
    rng = np.random.default_rng(43)
    eig = np.array([0.3, 1.0 + 0.5j, -1.4, 2.5j, 4.0])
    S = rng.normal(size=(5, 5))
    T = S @ np.diag(eig) @ np.linalg.inv(S)
    o = matrix_oracle(T)
    assert abs(smallest_root(o, CFG).z - 0.3) < 1e-6
    assert abs(largest_root(o, CFG).z - 4.0) < 1e-6


def test_companion_matrix_oracle_agrees_with_coeffs():
    p = from_roots([0.3, 1.5j, -2.5])
    a = smallest_root(matrix_oracle(companion_matrix(p)), CFG)
    b = smallest_root(oracle_from_coeffs(p), CFG)
    assert abs(a.z - b.z) < 1e-10


def test_failures_are_library_errors():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(PowerRootsError):
            smallest_root(_oracle([1, 1j, -1]), CFG)
