"""Extremal zeros from ratios of consecutive power sums.

If ``x_d`` is the unique absolutely smallest zero, ``x_d**-k`` dominates
``sigma_k = sum x_j**-k`` and ``sigma_k / sigma_{k+1}`` tends to ``x_d``.
The relative error is ``gamma``, bounded through the separation ratio
``delta = |x_d / x_{d-1}|`` (or ``|x_2 / x_1|`` for the largest zero).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

from .errors import DivByZeroError, DomainError, SeparationUnknown
from .powersums import PowerSumEstimate


class Side(str, Enum):
    SMALLEST = "smallest"
    LARGEST = "largest"


@dataclass(frozen=True)
class ExtremalEstimate:
    value: complex
    side: Side
    k: int
    m: int = 1
    delta: float | None = None
    gamma_bound: float | None = None
    total_error: float | None = None


def gamma_bound(delta: float, k: int, spread: float = 1.0) -> float:
    """``2 s delta^k / (1 - s delta^k)`` with ``s = spread`` (1 by default).

    ``spread`` is the count ratio ``(w - m)/m`` of non-extremal to extremal
    zeros.  Returns ``inf`` when ``s delta^k >= 1``.
    """
    if not 0 <= delta < 1:
        raise DomainError(f"separation ratio must lie in [0, 1), got {delta}")
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k == 0:
        return math.inf
    t = spread * delta ** k
    if t >= 1:
        return math.inf
    return 2 * t / (1 - t)


def choose_k(delta: float, b: int, spread: float = 1.0) -> int:
    """Smallest verified ``k`` with ``gamma_bound(delta, k, spread) <= 2**-b``."""
    if not 0 < delta < 1:
        raise DomainError(f"separation ratio must lie in (0, 1), got {delta}")
    eps = 2.0 ** (-b)
    lg = math.log(1 / delta)
    k = max(1, math.ceil((b + 2 + math.log2(max(spread, 1.0))) * math.log(2) / lg))
    while gamma_bound(delta, k, spread) > eps:
        k += 1
    return k


def total_error(gamma_err: float, powersum_err: float) -> float:
    """Certified error radius: separation error plus power-sum error."""
    if gamma_err < 0 or powersum_err < 0:
        raise DomainError("error contributions must be nonnegative")
    return gamma_err + powersum_err


def ratio_error(num: PowerSumEstimate, den: PowerSumEstimate) -> float:
    """Bound on ``|a/b - a'/b'|`` from the power-sum bounds of ``a'`` and ``b'``."""
    ea = num.bound or 0.0
    eb = den.bound or 0.0
    if ea == 0 and eb == 0:
        return 0.0
    r = abs(num.value / den.value)
    slack = abs(den.value) - eb
    if slack <= 0:
        return math.inf
    return (ea + r * eb) / slack


def _estimate(num: PowerSumEstimate, den: PowerSumEstimate, side: Side, k: int,
              delta: float | None, m: int, w: int | None) -> ExtremalEstimate:
    if den.value == 0:
        raise DivByZeroError(
            "denominator power sum vanishes; extremal moduli are probably not separated")
    value = num.value / den.value
    if delta is None:
        warnings.warn(SeparationUnknown("no separation ratio given; error bound omitted"),
                      stacklevel=3)
        return ExtremalEstimate(value, side, k, m)
    spread = (w - m) / m if w is not None else 1.0
    g = gamma_bound(delta, k, spread)
    if g >= 1:
        gerr = math.inf
    else:
        # |v| = |1 + gamma| |x| >= (1 - gamma) |x|
        gerr = g * abs(value) / (1 - g)
    return ExtremalEstimate(value, side, k, m, delta, g,
                            total_error(gerr, ratio_error(num, den)))


def estimate_smallest(sigma_k: PowerSumEstimate, sigma_k1: PowerSumEstimate,
                      delta: float | None = None, m: int = 1,
                      w: int | None = None) -> ExtremalEstimate:
    """``sigma_k / sigma_{k+1}`` from reciprocal power sums.

    With ``delta`` given, ``gamma_bound`` and ``total_error`` are filled in.
    ``w`` is the number of zeros the sums run over; it scales the bound by
    ``(w - m)/m``.  Without ``w`` the bare ``2 delta^k/(1 - delta^k)`` is used.
    """
    if sigma_k1.h != sigma_k.h + 1:
        raise DomainError("need consecutive power indices")
    return _estimate(sigma_k, sigma_k1, Side.SMALLEST, sigma_k.h, delta, m, w)


def estimate_largest(s_k: PowerSumEstimate, s_k1: PowerSumEstimate,
                     delta: float | None = None, m: int = 1,
                     w: int | None = None) -> ExtremalEstimate:
    """``s_{k+1} / s_k``; mirror of :func:`estimate_smallest`."""
    if s_k1.h != s_k.h + 1:
        raise DomainError("need consecutive power indices")
    return _estimate(s_k1, s_k, Side.LARGEST, s_k.h, delta, m, w)
