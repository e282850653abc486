"""Bounds on the extremal root radii.

Coefficient bounds and DLG-sharpened bounds need coefficients.  The
Newton-ratio bound and Cauchy-count bisection need only the oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .blackbox import NewtonOracle
from .errors import (BracketError, CountUnstable, DivByZeroError, DomainError,
                     PoleError)
from .polycore import Disc, Poly
from .powersums import count_zeros, default_count_q
from .squaring import ScaledPoly, run_dlg

MAX_DLG_STEPS = 12
COUNT_Q_CAP = 2 ** 16


class Target(str, Enum):
    SMALLEST = "smallest"
    LARGEST = "largest"


class Method(str, Enum):
    COEFF = "coeff"
    NEWTON_RATIO = "newton_ratio"
    DLG_SHARPENED = "dlg_sharpened"
    CAUCHY_BISECT = "cauchy_bisect"


@dataclass(frozen=True)
class RadiusBounds:
    lower: float
    upper: float
    target: Target
    method: Method

    def __post_init__(self):
        if not 0 <= self.lower <= self.upper:
            raise DomainError(f"invalid radius interval [{self.lower}, {self.upper}]")

    def contains(self, r: float, rtol: float = 0.0) -> bool:
        return self.lower * (1 - rtol) <= r <= self.upper * (1 + rtol)


def _log2_extremes(log2abs, d: int) -> tuple[float, float]:
    """``log2 r_-`` and ``log2 r_+`` from ``log2 |p_i|`` (``-inf`` for zeros)."""
    l0, ld = log2abs(0), log2abs(d)
    lo = min((l0 - log2abs(i)) / i for i in range(1, d + 1) if log2abs(i) > -math.inf)
    hi_terms = [(log2abs(d - i) - ld) / i for i in range(1, d + 1) if log2abs(d - i) > -math.inf]
    hi = max(hi_terms) if hi_terms else -math.inf
    return lo, hi


def _exp2(x: float) -> float:
    if x == -math.inf:
        return 0.0
    try:
        return 2.0 ** x
    except OverflowError:
        return math.inf


def coeff_radii_bounds(p: Poly) -> tuple[RadiusBounds, RadiusBounds]:
    """``(smallest, largest)`` radius intervals from the coefficients.

    ``r_- = min_i |p_0/p_i|^{1/i}`` gives ``r_-/2 <= |x_d| <= d r_-`` and
    ``r_+ = max_i |p_{d-i}/p_d|^{1/i}`` gives ``r_+/d <= |x_1| <= 2 r_+``.
    """
    d = p.degree
    if d < 1:
        raise DomainError("degree must be >= 1")

    def log2abs(i: int) -> float:
        c = abs(p.coeffs[i])
        return math.log2(c) if c > 0 else -math.inf

    lo, hi = _log2_extremes(log2abs, d)
    if p.coeffs[0] == 0:
        small = RadiusBounds(0.0, 0.0, Target.SMALLEST, Method.COEFF)
    else:
        small = RadiusBounds(_exp2(lo - 1), _exp2(lo + math.log2(d)),
                             Target.SMALLEST, Method.COEFF)
    large = RadiusBounds(_exp2(hi - math.log2(d)), _exp2(hi + 1),
                         Target.LARGEST, Method.COEFF)
    return small, large


def newton_smallest_bound(oracle: NewtonOracle, c: complex = 0j) -> RadiusBounds:
    """Distance from ``c`` to the nearest zero is at most ``d/|R(c)|``.

    The upper bound is infinite when ``R(c) = 0``; it is 0 when ``c`` is
    itself a zero.
    """
    try:
        r = oracle.evaluate(c)
    except PoleError:
        return RadiusBounds(0.0, 0.0, Target.SMALLEST, Method.NEWTON_RATIO)
    upper = math.inf if r == 0 else oracle.degree / abs(r)
    return RadiusBounds(0.0, upper, Target.SMALLEST, Method.NEWTON_RATIO)


def dlg_sharpened_bounds(p: Poly, k: int) -> tuple[RadiusBounds, RadiusBounds]:
    """Bounds from ``k`` normalized root-squaring steps.

    With ``P = p_k``, ``|x_d|^{2^k} <= d |P_0/P_1|`` and
    ``|x_1|^{2^k} >= |P_{d-1}/P_d| / d``; the opposite sides come from the
    coefficient bounds of ``P``.  All arithmetic is on ``log2`` magnitudes.
    """
    if not 0 <= k <= MAX_DLG_STEPS:
        raise DomainError(f"k must lie in [0, {MAX_DLG_STEPS}]")
    d = p.degree
    if d < 1:
        raise DomainError("degree must be >= 1")
    P: ScaledPoly = run_dlg(p, k, normalize=True)[-1].p
    scale = 2.0 ** (-k)
    lo, hi = _log2_extremes(P.log2abs, d)
    log2d = math.log2(d)
    if P.is_zero_coeff(0):
        small = RadiusBounds(0.0, 0.0, Target.SMALLEST, Method.DLG_SHARPENED)
    else:
        if P.is_zero_coeff(1):
            raise DivByZeroError(
                f"coefficient 1 of the level-{k} polynomial vanishes: the Newton "
                "ratio at the origin is 0 (equal root moduli)")
        up = (log2d + P.log2abs(0) - P.log2abs(1)) * scale
        small = RadiusBounds(min(_exp2((lo - 1) * scale), _exp2(up)), _exp2(up),
                             Target.SMALLEST, Method.DLG_SHARPENED)
    low = (P.log2abs(d - 1) - P.log2abs(d) - log2d) * scale
    large = RadiusBounds(_exp2(low), max(_exp2(low), _exp2((hi + 1) * scale)),
                         Target.LARGEST, Method.DLG_SHARPENED)
    return small, large


def _count(oracle: NewtonOracle, c: complex, r: float, q_cap: int,
           threads: int | None) -> int:
    """Zeros in ``D(c, r)``.

    ``q`` doubles until two consecutive sums are both near the same integer;
    a single near-integer sum can be off by one when a zero is close to the
    probe circle.
    """
    q = default_count_q(oracle.degree, r)
    prev = None
    while True:
        try:
            n, s0, low = count_zeros(oracle, Disc(c, r), q, threads=threads)
        except PoleError:
            raise CountUnstable(f"a zero lies on the probe circle |x - c| = {r:.6g}") from None
        if not low and n == prev:
            return n
        prev = None if low else n
        if 2 * q > q_cap:
            raise CountUnstable(
                f"count on |x - c| = {r:.6g} is unstable (s_0 = {s0:.4g}); "
                "a zero lies near the probe circle")
        q *= 2


def count_at(oracle: NewtonOracle, c: complex, r: float, q_cap: int = COUNT_Q_CAP,
             threads: int | None = None, nudge: float = 1.01) -> int:
    """Stable count in ``D(c, r)``; on instability retries once at radius ``nudge * r``."""
    try:
        return _count(oracle, c, r, q_cap, threads)
    except CountUnstable:
        return _count(oracle, c, r * nudge, q_cap, threads)


def radius_bisect(oracle: NewtonOracle, c: complex, j: int, lo: float, hi: float,
                  tol_bits: int = 20, q_cap: int = COUNT_Q_CAP,
                  threads: int | None = None) -> float:
    """``j``-th smallest distance from ``c`` to the zeros, by log-radius bisection.

    Requires ``count(D(c, lo)) < j <= count(D(c, hi))``.  Returns ``r`` with
    at least ``j`` zeros in ``D(c, r)`` and fewer in ``D(c, r (1 - 2**-tol_bits))``.
    Counts resolve radii only to about ``16/q_cap`` relative, so finer
    tolerances stop at that floor.
    """
    return bisect_interval(oracle, c, j, lo, hi, tol_bits, q_cap, threads)[1]


def bisect_interval(oracle: NewtonOracle, c: complex, j: int, lo: float, hi: float,
                    tol_bits: int = 20, q_cap: int = COUNT_Q_CAP,
                    threads: int | None = None) -> tuple[float, float]:
    """Final ``(lo, hi)`` of :func:`radius_bisect`: the ``j``-th radius lies in ``(lo, hi]``."""
    if not 0 < lo < hi:
        raise DomainError("need 0 < lo < hi")
    if not 1 <= j <= oracle.degree:
        raise DomainError(f"j must lie in [1, {oracle.degree}]")
    if count_at(oracle, c, lo, q_cap, threads, nudge=0.99) >= j:
        raise BracketError(f"D(c, {lo:.6g}) already holds >= {j} zeros")
    if count_at(oracle, c, hi, q_cap, threads, nudge=1.01) < j:
        raise BracketError(f"D(c, {hi:.6g}) holds fewer than {j} zeros")
    log_target = max(-math.log1p(-(2.0 ** (-tol_bits))), 16.0 / q_cap)
    while math.log(hi / lo) > log_target:
        span = math.log(hi / lo)
        for t in (0.5, 0.25, 0.75):
            mid = lo * math.exp(t * span)
            try:
                n = _count(oracle, c, mid, q_cap, threads)
                break
            except CountUnstable:
                continue
        else:
            raise CountUnstable(f"no stable probe radius in [{lo:.9g}, {hi:.9g}]")
        if n >= j:
            hi = mid
        else:
            lo = mid
    return lo, hi


def find_bracket(oracle: NewtonOracle, c: complex, j: int, start: float,
                 q_cap: int = COUNT_Q_CAP, threads: int | None = None,
                 max_steps: int = 200) -> tuple[float, float]:
    """``(lo, hi)`` with ``count(lo) < j <= count(hi)`` by geometric search from ``start``."""
    if not start > 0 or not math.isfinite(start):
        start = 1.0
    n = count_at(oracle, c, start, q_cap, threads)
    r = start
    if n >= j:
        for _ in range(max_steps):
            r2 = r / 2
            if count_at(oracle, c, r2, q_cap, threads) < j:
                return r2, r
            r = r2
    else:
        for _ in range(max_steps):
            r2 = r * 2
            if count_at(oracle, c, r2, q_cap, threads) >= j:
                return r, r2
            r = r2
    raise BracketError(f"no bracket for the {j}-th radius found from {start:.6g}")


def bisect_bounds(oracle: NewtonOracle, c: complex, j: int, tol_bits: int = 20,
                  start: float | None = None, threads: int | None = None) -> RadiusBounds:
    """Bracket then bisect: the ``j``-th distance from ``c`` to the zeros lies in the result."""
    if start is None:
        start = newton_smallest_bound(oracle, c).upper
        if start == 0:
            return RadiusBounds(0.0, 0.0, Target.SMALLEST, Method.CAUCHY_BISECT)
    lo, hi = find_bracket(oracle, c, j, start, threads=threads)
    lo, hi = bisect_interval(oracle, c, j, lo, hi, tol_bits, threads=threads)
    target = Target.LARGEST if j == oracle.degree and j > 1 else Target.SMALLEST
    return RadiusBounds(lo, hi, target, Method.CAUCHY_BISECT)
