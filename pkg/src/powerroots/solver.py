"""Root-finding pipelines built on the Newton-ratio oracle.

* :func:`lehmer_newton` samples the ratio on a circle through the nearest
  zero and recenters until ``d/|R(z)|`` falls below the tolerance.
* :func:`smallest_root` and :func:`largest_root` take a ratio of two
  consecutive power sums computed by Cauchy sums on a rescaled circle.
* :func:`root_sequence` peels off smallest zeros through implicit deflation.
* :func:`roots_near` finds the zero nearest each of several centers.
"""

from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .blackbox import NewtonOracle, deflated_oracle, reversed_oracle, shifted_oracle
from .errors import (CapError, DegenerateCenter, DomainError, PoleError, PowerRootsError,
                     SeparationError, StallError)
from .extremal import choose_k, estimate_largest, estimate_smallest
from .polycore import unity_nodes
from .powersums import (PowerSumEstimate, PowerSumSource, cauchy_error_bound, cauchy_sums,
                        random_rotation, scaled_params, subtract_zeros)
from .radii import bisect_interval, count_at, find_bracket, newton_smallest_bound

RADIUS_TOL_BITS = 5
SEPARATION_LIMIT = 0.95
CLUSTER_FACTOR = 1.05
MAX_RETRIES = 3
STALL_LIMIT = 5


class Pipeline(str, Enum):
    LEHMER_NEWTON = "lehmer_newton"
    EXTREMAL_SMALL = "extremal_small"
    EXTREMAL_LARGE = "extremal_large"
    DESCEND_DLG = "descend_dlg"


@dataclass(frozen=True)
class SolverConfig:
    eps_bits: int = 20
    b0: int = 24
    q_cap: int = 2 ** 20
    sample_q: int | None = None
    max_rounds: int = 64
    refine: bool = True
    seed: int | None = None
    threads: int | None = None

    def __post_init__(self):
        for name in ("eps_bits", "b0", "q_cap", "max_rounds"):
            if getattr(self, name) < 1:
                raise DomainError(f"{name} must be positive")
        if self.sample_q is not None and self.sample_q < 1:
            raise DomainError("sample_q must be positive")

    @property
    def eps(self) -> float:
        return 2.0 ** (-self.eps_bits)

    @property
    def eps0(self) -> float:
        return 2.0 ** (-self.b0)

    def samples(self, d: int) -> int:
        return self.sample_q if self.sample_q is not None else max(32, 4 * d)

    @property
    def rotation(self) -> float:
        return 0.0 if self.seed is None else random_rotation(self.seed)


@dataclass(frozen=True)
class RootApproximation:
    z: complex
    residual: float
    error_bound: float | None
    pipeline: Pipeline
    eval_count: int
    estimate: complex | None = None
    converged: bool = True


def _residual(oracle: NewtonOracle, z: complex) -> float:
    try:
        r = oracle.evaluate(z)
    except PoleError:
        return 0.0
    return math.inf if r == 0 else oracle.degree / abs(r)


# --------------------------------------------------------------------------
# Newton refinement

def newton_refine(oracle: NewtonOracle, z0: complex, tol: float = 1e-14, maxit: int = 100,
                  pipeline: Pipeline = Pipeline.LEHMER_NEWTON) -> RootApproximation:
    """Newton steps ``z <- z - 1/R(z)`` until ``|1/R(z)| <= tol``.

    Raises :class:`StallError` carrying the best iterate when the step size
    fails to decrease five times in a row.
    """
    start = oracle.eval_count
    d = oracle.degree
    z = complex(z0)
    best = (math.inf, z)
    prev = math.inf
    stalls = 0
    for _ in range(maxit):
        try:
            r = oracle.evaluate(z)
        except PoleError:
            return RootApproximation(z, 0.0, None, pipeline, oracle.eval_count - start)
        if r == 0:
            raise StallError("Newton ratio vanished (critical point)",
                             best=_approx(oracle, best[1], pipeline, start, False))
        step = 1 / r
        res = d * abs(step)
        if res < best[0]:
            best = (res, z)
        if abs(step) <= tol:
            return RootApproximation(z, res, None, pipeline, oracle.eval_count - start)
        stalls = stalls + 1 if abs(step) >= prev else 0
        if stalls >= STALL_LIMIT:
            raise StallError(f"Newton step stopped decreasing near {z!r}",
                             best=_approx(oracle, best[1], pipeline, start, False))
        prev = abs(step)
        z = z - step
    res = _residual(oracle, z)
    return RootApproximation(z, res, None, pipeline, oracle.eval_count - start, converged=False)


def _approx(oracle, z, pipeline, start, converged) -> RootApproximation:
    return RootApproximation(z, _residual(oracle, z), None, pipeline,
                             oracle.eval_count - start, converged=converged)


def _polish(oracle: NewtonOracle, z: complex, radius: float, pipeline: Pipeline) -> complex:
    """Newton from ``z``; keeps the result only if it stays within ``radius``."""
    tol = 1e-15 * max(1.0, abs(z))
    try:
        out = newton_refine(oracle, z, tol, 60, pipeline)
    except StallError as e:
        out = e.best
    if abs(out.z - z) <= radius:
        return out.z
    return z


# --------------------------------------------------------------------------
# Lehmer-Newton search

def lehmer_newton(oracle: NewtonOracle, config: SolverConfig = SolverConfig()) -> RootApproximation:
    """Approximate the zero nearest the origin within ``config.eps``.

    Each round bounds the distance to the nearest zero, samples the ratio on
    the circle of that radius, optionally polishes the best sample by Newton
    steps and accepts once ``d/|R(c)| <= eps``.  Otherwise the best point
    becomes the new center.
    """
    d = oracle.degree
    if d < 1:
        raise DomainError("degree must be >= 1")
    start = oracle.eval_count
    eps = config.eps
    c = 0j
    radius = 1.0
    best = (math.inf, c)

    def done(z, res, converged=True):
        return RootApproximation(z, res, None, Pipeline.LEHMER_NEWTON,
                                 oracle.eval_count - start, converged=converged)

    for rnd in range(config.max_rounds):
        # stage 1
        try:
            r = oracle.evaluate(c)
        except PoleError:
            return done(c, 0.0)
        if r == 0:
            warnings.warn(DegenerateCenter(f"R({c:.6g}) = 0; moving the center"),
                          stacklevel=2)
            c = c + 0.37 * radius * cmath.exp(0.7j * rnd)
            continue
        res = d / abs(r)
        if res < best[0]:
            best = (res, c)
        if res <= eps:
            return done(c, res)
        # stage 2
        try:
            lo, _ = find_bracket(oracle, c, 1, res, threads=config.threads)
            lo, hi = bisect_interval(oracle, c, 1, lo, res * 1.01, 6, threads=config.threads)
        except PowerRootsError:
            hi = res
        if hi <= eps:
            return done(c, res)
        radius = hi
        # stage 3
        cand, cres = _sample_circle(oracle, c, hi, config.samples(d))
        if cres >= res:
            cand, cres = _sample_circle(oracle, c, hi, 2 * config.samples(d))
        if cres == 0:
            return done(cand, 0.0)
        if config.refine:
            try:
                ref = newton_refine(oracle, cand, eps / (2 * d), 50)
                if ref.residual < cres:
                    cand, cres = ref.z, ref.residual
            except StallError as e:
                if e.best is not None and e.best.residual < cres:
                    cand, cres = e.best.z, e.best.residual
        if cres < best[0]:
            best = (cres, cand)
        # stage 4
        if cres <= eps:
            return done(cand, cres)
        c = cand
    return done(best[1], best[0], converged=False)


def _sample_circle(oracle: NewtonOracle, c: complex, r: float, q: int) -> tuple[complex, float]:
    """Node of ``C(c, r)`` with the smallest ``d/|R|``."""
    nodes = c + r * unity_nodes(q)
    try:
        vals = oracle.evaluate_many(nodes)
    except PoleError:
        for z in nodes:
            try:
                oracle.evaluate(z)
            except PoleError:
                return complex(z), 0.0
        raise
    i = int(np.argmax(np.abs(vals)))
    if vals[i] == 0:
        return c, math.inf
    return complex(nodes[i]), oracle.degree / abs(vals[i])


# --------------------------------------------------------------------------
# extremal pipelines

@dataclass
class _SumCache:
    """Cauchy sums of the last call and the zeros removed since."""

    key: tuple | None = None
    sums: np.ndarray | None = None
    removed: list = field(default_factory=list)


def _extremal(oracle: NewtonOracle, config: SolverConfig, smallest: bool,
              cache: _SumCache | None = None) -> RootApproximation:
    d = oracle.degree
    if d < 1:
        raise DomainError("degree must be >= 1")
    start = oracle.eval_count
    pipeline = Pipeline.EXTREMAL_SMALL if smallest else Pipeline.EXTREMAL_LARGE
    threads = config.threads
    tol = RADIUS_TOL_BITS

    if smallest:
        try:
            r0 = oracle.evaluate(0)
        except PoleError:
            return RootApproximation(0j, 0.0, 0.0, pipeline, oracle.eval_count - start, 0j)
        # the bound is exact for d = 1; start off the zero's circle
        guess = 1.37 * d / abs(r0) if r0 != 0 else 1.0
    else:
        guess = 1.0

    j1 = 1 if smallest else d
    lo, hi = find_bracket(oracle, 0, j1, guess, threads=threads)
    r_lo, r_hi = bisect_interval(oracle, 0, j1, lo, hi, tol, threads=threads)

    # separation of the extremal radius from its neighbour
    if d == 1:
        delta = 0.0
    elif smallest:
        probe = CLUSTER_FACTOR * r_hi
        if count_at(oracle, 0, probe, threads=threads) >= 2:
            raise SeparationError(
                f"two zeros within {probe:.6g} of the origin: smallest radius not isolated; "
                "recenter and retry")
        lo2, hi2 = find_bracket(oracle, 0, 2, probe * CLUSTER_FACTOR, threads=threads)
        lo2, _ = bisect_interval(oracle, 0, 2, max(lo2, probe), hi2, tol, threads=threads)
        delta = r_hi / lo2
    else:
        probe = r_lo / CLUSTER_FACTOR
        if count_at(oracle, 0, probe, threads=threads) <= d - 2:
            raise SeparationError(
                f"two zeros beyond radius {probe:.6g}: largest radius not isolated")
        lo2, hi2 = find_bracket(oracle, 0, d - 1, probe / CLUSTER_FACTOR, threads=threads)
        _, hi2 = bisect_interval(oracle, 0, d - 1, lo2, min(hi2, probe), tol, threads=threads)
        delta = hi2 / r_lo
    if delta >= SEPARATION_LIMIT:
        raise SeparationError(f"separation ratio {delta:.4g} >= {SEPARATION_LIMIT}; recenter")

    b, b0 = config.eps_bits, config.b0
    # absolute targets relative to the size of the zero sought
    size = r_hi
    b_rel = max(0, math.ceil(b + math.log2(size))) + 1
    k = 1 if delta == 0 else choose_k(delta, b_rel, spread=d - 1)
    extra = 0
    rotation = config.rotation
    for attempt in range(MAX_RETRIES + 1):
        params = scaled_params(k + 1, d, max(1, b0 + 3 + extra + math.ceil(math.log2(size))))
        theta, q = params.theta, params.q
        if q > config.q_cap:
            raise CapError(f"need q = {q} Cauchy nodes, above the cap {config.q_cap}")
        if smallest:
            rho_c = theta / (r_hi * (1 - 2.0 ** (-tol)))
            t = shifted_oracle(reversed_oracle(oracle), 0, rho_c)
        else:
            rho_c = theta * r_hi
            t = shifted_oracle(oracle, 0, rho_c)
        hs = [k, k + 1]
        key = (rho_c, theta, q, rotation, k, smallest)
        if cache is not None and cache.key == key and cache.sums is not None:
            # the previous node set: remove the deflated zeros in closed form
            ws = [1 / (rho_c * z) if smallest else z / rho_c for z in cache.removed]
            vals = subtract_zeros(cache.sums, hs, ws, q, rotation)
        else:
            vals = cauchy_sums(t, q, hs, rotation, threads)
        if cache is not None:
            cache.key, cache.sums, cache.removed = key, vals, []
        ests = [PowerSumEstimate(h, complex(v), cauchy_error_bound(d, theta, h, q), params,
                                 PowerSumSource.CAUCHY_SUM) for h, v in zip(hs, vals)]
        if smallest:
            ex = estimate_smallest(ests[0], ests[1], delta=delta, w=d)
            z, err = ex.value / rho_c, ex.total_error / rho_c
        else:
            ex = estimate_largest(ests[0], ests[1], delta=delta, w=d)
            z, err = ex.value * rho_c, ex.total_error * rho_c
        if err <= config.eps + config.eps0:
            break
        k += 2
        extra += 4
    else:
        raise CapError(f"error bound {err:.3g} above target after {MAX_RETRIES} retries")

    est = z
    if config.refine:
        z = _polish(oracle, z, 2 * err + 1e-12 * max(1.0, abs(z)), pipeline)
    return RootApproximation(z, _residual(oracle, z), err, pipeline,
                             oracle.eval_count - start, est)


def smallest_root(oracle: NewtonOracle, config: SolverConfig = SolverConfig()) -> RootApproximation:
    """Absolutely smallest zero from reciprocal power sums.

    The reciprocal zeros are scaled into the disc of radius ``1/theta`` with
    ``theta**(k+1) = 2``; ``sigma_k / sigma_{k+1}`` of the scaled reciprocal
    zeros is then ``rho_c x_d`` up to the separation and Cauchy-sum errors.
    """
    return _extremal(oracle, config, smallest=True)


def largest_root(oracle: NewtonOracle, config: SolverConfig = SolverConfig()) -> RootApproximation:
    """Absolutely largest zero; mirror of :func:`smallest_root` on ``p`` itself."""
    return _extremal(oracle, config, smallest=False)


# --------------------------------------------------------------------------
# deflation and multiple centers

def root_sequence(oracle: NewtonOracle, n: int,
                  config: SolverConfig = SolverConfig()) -> list[RootApproximation]:
    """The ``n`` zeros found by repeated smallest-root search and deflation.

    On failure the error is re-raised with ``partial`` (roots found so far)
    and ``index`` (1-based position of the failing root) attached.
    """
    if not 0 <= n <= oracle.degree:
        raise DomainError(f"need 0 <= n <= {oracle.degree}")
    out: list[RootApproximation] = []
    found: list[complex] = []
    cache = _SumCache()
    cur = oracle
    for i in range(n):
        before = oracle.eval_count
        try:
            a = _extremal(cur, config, smallest=True, cache=cache)
        except PowerRootsError as e:
            e.partial = out
            e.index = i + 1
            raise
        z = a.z
        if config.refine:
            z = _polish(oracle, z, 2 * (a.error_bound or 0) + 1e-12 * max(1.0, abs(z)),
                        Pipeline.EXTREMAL_SMALL)
        out.append(RootApproximation(z, _residual(oracle, z), a.error_bound, a.pipeline,
                                     oracle.eval_count - before, a.estimate))
        found.append(z)
        cache.removed.append(z)
        cur = deflated_oracle(oracle, found)
    return out


def roots_near(oracle: NewtonOracle, centers: Sequence[complex],
               config: SolverConfig = SolverConfig()) -> list[RootApproximation | PowerRootsError]:
    """Zero nearest each center; failures are returned in place of results."""

    def one(c: complex):
        c = complex(c)
        t = shifted_oracle(oracle, c, 1.0)
        try:
            a = smallest_root(t, config)
        except PowerRootsError as e:
            return e
        return RootApproximation(a.z + c, a.residual, a.error_bound, a.pipeline,
                                 t.eval_count, None if a.estimate is None else a.estimate + c,
                                 a.converged)

    workers = max(1, config.threads or 1)
    if workers == 1 or len(centers) < 2:
        return [one(c) for c in centers]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, centers))
