"""Power sums of polynomial zeros.

Two routes are provided: Newton's identities on a prefix of the trailing
coefficients, and Cauchy sums, which need only a Newton-ratio oracle.  The
Cauchy sum with ``q`` nodes,

    s_{h,q} = (1/q) sum_g zeta^{(h+1)g} R(zeta^g),

equals ``sum_j x_j**h / (1 - x_j**q)`` exactly, so it approximates the
power sum of the zeros inside the unit circle when that circle is isolated.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .blackbox import NewtonOracle, POLE_THRESHOLD, shifted_oracle
from .errors import CapError, DomainError, LowConfidence, NormalizationError, PoleError
from .polycore import Disc, Poly, derivative, mod_cyclotomic, unity_nodes

Q_CAP = 2 ** 24


class PowerSumSource(str, Enum):
    NEWTON_IDENTITIES = "newton_identities"
    CAUCHY_SUM = "cauchy_sum"


@dataclass(frozen=True)
class CauchyParams:
    q: int
    theta: float = 2.0
    rho: float = 1.0
    rotation: float = 0.0
    eps0_bits: int = 24

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("q must be >= 1")
        if not self.theta > 1:
            raise DomainError("theta must exceed 1")
        if not self.rho > 0:
            raise DomainError("rho must be positive")
        if self.eps0_bits < 1:
            raise DomainError("eps0_bits must be >= 1")


@dataclass(frozen=True)
class PowerSumEstimate:
    h: int
    value: complex
    bound: float | None = None
    params: CauchyParams | None = None
    source: PowerSumSource = PowerSumSource.CAUCHY_SUM


# --------------------------------------------------------------------------
# Newton's identities

def newton_power_sums(trailing: Sequence, k: int) -> list[PowerSumEstimate]:
    """Power sums ``s'_1 .. s'_{k+1}`` of the zeros of the reverse polynomial.

    ``trailing`` holds ``p_0 = 1, p_1, ..., p_{k+1}``; missing entries are
    taken as zero.  Back substitution of

        s'_i + sum_{j<i} p_j s'_{i-j} = -i p_i

    costs ``O(k^2)`` operations.  The results are the power sums of the
    reciprocals of the zeros of ``p``.
    """
    if k < 0:
        raise DomainError("k must be nonnegative")
    c = [complex(t) for t in trailing]
    if not c or abs(c[0] - 1) > 1e-12:
        raise NormalizationError("trailing[0] must equal 1; divide through by p_0 first")
    c += [0j] * (k + 2 - len(c))
    s: list[complex] = [0j]  # s[0] unused
    for i in range(1, k + 2):
        acc = -i * c[i]
        for j in range(1, i):
            acc -= c[j] * s[i - j]
        s.append(acc)
    return [PowerSumEstimate(i, s[i], None, None, PowerSumSource.NEWTON_IDENTITIES)
            for i in range(1, k + 2)]


def reciprocal_power_sums(p: Poly, k: int) -> list[PowerSumEstimate]:
    """``sum x_j**(-i)`` for ``i = 1..k+1`` from the trailing coefficients of ``p``."""
    p0 = p.coeffs[0]
    if p0 == 0:
        raise DomainError("p(0) = 0: reciprocal power sums are undefined")
    return newton_power_sums([c / p0 for c in p.coeffs[: k + 2]], k)


def zero_power_sums(p: Poly, k: int) -> list[PowerSumEstimate]:
    """``sum x_j**i`` for ``i = 1..k+1`` from the leading coefficients of ``p``.

    Same code path as :func:`reciprocal_power_sums`, applied to the reverse.
    """
    lead = p.leading
    rev = list(reversed(p.coeffs))
    return newton_power_sums([c / lead for c in rev[: k + 2]], k)


# --------------------------------------------------------------------------
# Cauchy sums

def _threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("ROOTS_THREADS", "1") or 1)
    return max(1, threads)


def node_ratios(oracle: NewtonOracle, q: int, rotation: float = 0.0,
                threads: int | None = None) -> np.ndarray:
    """Stage 1: ``R`` at the rotated unity nodes ``exp(i*rotation) zeta^g``.

    Coefficient-backed oracles with ``q < d`` use the folded DFT: ``p`` and
    ``p'`` are reduced modulo ``x^q - 1`` and transformed.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    if oracle.poly is not None and q < oracle.degree:
        return _folded_ratios(oracle, q, rotation)
    nodes = unity_nodes(q, rotation)
    nthreads = _threads(threads)
    if nthreads == 1 or q < 2 * nthreads:
        return oracle.evaluate_many(nodes)
    chunks = np.array_split(nodes, nthreads)
    with ThreadPoolExecutor(max_workers=nthreads) as pool:
        parts = list(pool.map(oracle.evaluate_many, chunks))
    return np.concatenate(parts)


def _folded_ratios(oracle: NewtonOracle, q: int, rotation: float) -> np.ndarray:
    p = oracle.poly
    if rotation:
        rot = np.exp(1j * rotation * np.arange(len(p.coeffs)))
        p = Poly(np.array(p.coeffs) * rot)
    dp = derivative(p)
    vals = np.zeros(q, dtype=complex)
    ders = np.zeros(q, dtype=complex)
    fp, fd = mod_cyclotomic(p, q), mod_cyclotomic(dp, q)
    vals[: len(fp)] = fp.coeffs
    ders[: len(fd)] = fd.coeffs
    vals = np.fft.ifft(vals) * q
    ders = np.fft.ifft(ders) * q
    oracle.add_evals(q)
    if np.any(np.abs(vals) < POLE_THRESHOLD):
        raise PoleError("a Cauchy node is a zero of p")
    if rotation:
        # d/dx p(e^{i phi} y) = e^{i phi} p'(e^{i phi} y); undo the inner factor
        ders = ders * np.exp(-1j * rotation)
    return ders / vals


def _weights(q: int, h: int, rotation: float) -> np.ndarray:
    g = np.arange(q)
    return np.exp(1j * (2 * np.pi * (((h + 1) * g) % q) / q + (h + 1) * rotation))


def cauchy_sums_from_ratios(ratios: np.ndarray, hs: Sequence[int],
                            rotation: float = 0.0) -> np.ndarray:
    """Stage 2 for several powers at once, summing in ascending node order."""
    q = len(ratios)
    out = np.empty(len(hs), dtype=complex)
    for i, h in enumerate(hs):
        if not 0 <= h < q:
            raise DomainError(f"need 0 <= h < q, got h={h}, q={q}")
        terms = _weights(q, h, rotation) * ratios
        out[i] = np.cumsum(terms)[-1] / q
    return out


def cauchy_sums(oracle: NewtonOracle, q: int, hs: Sequence[int] | None = None,
                rotation: float = 0.0, threads: int | None = None) -> np.ndarray:
    """Cauchy sums ``s_{h,q}`` for every ``h`` in ``hs`` (default ``0..q-1``)."""
    if hs is None:
        hs = range(q)
    ratios = node_ratios(oracle, q, rotation, threads)
    return cauchy_sums_from_ratios(ratios, list(hs), rotation)


def cauchy_sum(oracle: NewtonOracle, h: int, q: int, rotation: float = 0.0,
               threads: int | None = None) -> complex:
    """Cauchy sum ``s_{h,q}`` over the unit circle rotated by ``rotation``."""
    if not 0 <= h < q:
        raise DomainError(f"need 0 <= h < q, got h={h}, q={q}")
    return complex(cauchy_sums(oracle, q, [h], rotation, threads)[0])


def subtract_zeros(sums: Sequence[complex], hs: Sequence[int], zeros: Sequence[complex],
                   q: int, rotation: float = 0.0) -> np.ndarray:
    """Cauchy sums after removing ``zeros`` from the polynomial.

    Each zero ``w`` contributes exactly ``w^h / (1 - (w e^{-i rotation})^q)``,
    so sums computed before a deflation can be reused on the same nodes.
    """
    out = np.array(sums, dtype=complex)
    rot = np.exp(-1j * rotation)
    for w in zeros:
        w = complex(w)
        den = 1 - (w * rot) ** q
        if den == 0:
            raise PoleError("a removed zero lies on a Cauchy node")
        for i, h in enumerate(hs):
            out[i] -= w ** h / den
    return out


def cauchy_error_bound(d: int, theta: float, h: int, q: int) -> float:
    """``d theta^h / (theta^q - 1)``: error of ``s_{h,q}`` on an isolated circle."""
    if not theta > 1:
        raise DomainError("isolation theta must exceed 1")
    if not 0 <= h < q:
        raise DomainError(f"need 0 <= h < q, got h={h}, q={q}")
    try:
        return d * theta ** h / (theta ** q - 1)
    except OverflowError:
        # same quantity, rearranged to stay in range
        return d * theta ** (h - q) / (1 - theta ** (-q))


def choose_q(d: int, theta: float, h: int, b0: int, rho: float = 1.0,
             q_cap: int = Q_CAP) -> int:
    """Smallest ``q`` with ``cauchy_error_bound(d*max(rho,1), theta, h, q) <= 2**-b0``."""
    if not theta > 1:
        raise DomainError("isolation theta must exceed 1")
    dd = d * max(rho, 1.0)
    eps0 = 2.0 ** (-b0)
    guess = h + math.ceil(math.log1p(dd / eps0) / math.log(theta))
    if guess > q_cap:
        raise CapError(
            f"q={guess} exceeds cap {q_cap}; rescale the variable so the isolation "
            "theta^h is about 2 (see scaled_params)")
    q = max(h + 1, guess - 2)
    while cauchy_error_bound(dd, theta, h, q) > eps0:
        q += 1
    while q > h + 1 and cauchy_error_bound(dd, theta, h, q - 1) <= eps0:
        q -= 1
    if q > q_cap:
        raise CapError(f"q={q} exceeds cap {q_cap}; rescale the variable (see scaled_params)")
    return q


def scaled_params(h: int, d: int, b0: int, rho: float = 1.0) -> CauchyParams:
    """Parameters with ``theta**h = 2`` and ``q = ceil(h log2(1 + d 2**(b0+1)))``.

    The caller must scale the variable so the zeros of interest lie within
    radius ``1/theta`` and none lie in the annulus up to ``theta``.
    """
    if h < 1:
        raise DomainError("h must be >= 1")
    theta = 2.0 ** (1.0 / h)
    q = math.ceil(h * math.log2(1 + d * 2.0 ** (b0 + 1)))
    return CauchyParams(q=q, theta=theta, rho=rho, rotation=0.0, eps0_bits=b0)


def cauchy_sum_disc(oracle: NewtonOracle, disc: Disc, h: int, params: CauchyParams,
                    threads: int | None = None) -> PowerSumEstimate:
    """Cauchy sum of ``t(y) = p(c + rho y)`` on the unit circle.

    Estimates the ``h``-th power sum of ``(x_j - c)/rho`` over the zeros
    ``x_j`` in ``D(c, rho)``.
    """
    t = shifted_oracle(oracle, disc.center, disc.radius)
    val = cauchy_sum(t, h, params.q, params.rotation, threads)
    bound = cauchy_error_bound(oracle.degree, params.theta, h, params.q)
    return PowerSumEstimate(h, val, bound, params, PowerSumSource.CAUCHY_SUM)


def cauchy_sums_disc(oracle: NewtonOracle, disc: Disc, hs: Sequence[int],
                     params: CauchyParams, threads: int | None = None) -> list[PowerSumEstimate]:
    """Like :func:`cauchy_sum_disc` for several powers sharing one node set."""
    t = shifted_oracle(oracle, disc.center, disc.radius)
    vals = cauchy_sums(t, params.q, hs, params.rotation, threads)
    return [PowerSumEstimate(h, complex(v), cauchy_error_bound(oracle.degree, params.theta, h, params.q),
                             params, PowerSumSource.CAUCHY_SUM)
            for h, v in zip(hs, vals)]


def default_count_q(d: int, rho: float) -> int:
    return choose_q(d, 1.2, 0, 3, rho)


def count_zeros(oracle: NewtonOracle, disc: Disc, q: int | None = None,
                rotation: float = 0.0, threads: int | None = None) -> tuple[int, complex, bool]:
    """``(count, s_{0,q}, low_confidence)`` for the zeros in ``disc``."""
    if q is None:
        q = default_count_q(oracle.degree, disc.radius)
    t = shifted_oracle(oracle, disc.center, disc.radius)
    s0 = complex(cauchy_sums(t, q, [0], rotation, threads)[0])
    n = int(round(s0.real))
    low = abs(s0 - n) > 0.25 or not 0 <= n <= oracle.degree
    return n, s0, low


def root_count(oracle: NewtonOracle, disc: Disc, q: int | None = None,
               rotation: float = 0.0, threads: int | None = None) -> int:
    """Number of zeros in ``disc``, rounded from ``Re s_{0,q}``.

    Issues :class:`LowConfidence` when ``s_{0,q}`` is more than 0.25 away
    from the returned integer or the integer lies outside ``[0, d]``.
    """
    n, s0, low = count_zeros(oracle, disc, q, rotation, threads)
    if low:
        warnings.warn(LowConfidence(f"s_0,q = {s0:.4g} is not close to an integer"),
                      stacklevel=2)
    return n


def random_rotation(seed: int | None) -> float:
    """Seeded phase in ``[0, 2pi)`` for the rotated-node heuristic."""
    rng = np.random.default_rng(seed)
    return float(rng.uniform(0.0, 2 * np.pi))
