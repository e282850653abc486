"""Root-squaring at coefficient level and for black-box ratios.

``dlg_step`` maps ``p_h`` to ``p_{h+1}`` whose zeros are the squares of the
zeros of ``p_h``.  Without normalization the coefficients are plain complex
doubles and overflow is reported as :class:`RangeError`.  With
normalization each coefficient carries its own binary exponent (see
:class:`ScaledPoly`), which keeps the iteration alive far longer.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace
from typing import Sequence

from .blackbox import NewtonOracle
from .errors import (AmbiguityWarning, DepthError, DivByZeroError, DomainError,
                     PoleError, RangeError)
from .polycore import Poly, derivative, eval_poly, is_finite

MAX_RATIO_DEPTH = 20


def _ldexp(z: complex, n: int) -> complex:
    return complex(math.ldexp(z.real, n), math.ldexp(z.imag, n))


def _split_exp(z: complex) -> tuple[complex, int]:
    """Write ``z = m * 2**e`` with ``max(|re m|, |im m|)`` in ``[0.5, 1)``."""
    if z == 0:
        return 0j, 0
    _, e = math.frexp(max(abs(z.real), abs(z.imag)))
    return _ldexp(z, -e), e


@dataclass(frozen=True)
class ScaledPoly:
    """Coefficients ``mant[i] * 2**exp[i]`` with unbounded integer exponents."""

    mant: tuple[complex, ...]
    exp: tuple[int, ...]

    @classmethod
    def from_poly(cls, p: Poly) -> "ScaledPoly":
        pairs = [_split_exp(c) for c in p.coeffs]
        return cls(tuple(m for m, _ in pairs), tuple(e for _, e in pairs))

    @property
    def degree(self) -> int:
        return len(self.mant) - 1

    def is_zero_coeff(self, i: int) -> bool:
        return self.mant[i] == 0

    def log2abs(self, i: int) -> float:
        m = self.mant[i]
        if m == 0:
            return -math.inf
        return math.log2(abs(m)) + self.exp[i]

    def ratio(self, i: int, j: int, other: "ScaledPoly | None" = None) -> complex:
        """``coeff_i / coeff_j`` (of ``other`` for the denominator if given)."""
        den = self if other is None else other
        if den.mant[j] == 0:
            raise DivByZeroError(f"coefficient {j} vanishes")
        m = self.mant[i] / den.mant[j]
        try:
            v = _ldexp(m, self.exp[i] - den.exp[j])
        except OverflowError:
            raise RangeError("coefficient ratio overflows double range") from None
        if not is_finite(v):
            raise RangeError("coefficient ratio overflows double range")
        return v

    def to_poly(self) -> Poly:
        try:
            cs = [_ldexp(m, e) for m, e in zip(self.mant, self.exp)]
        except OverflowError:
            raise RangeError("coefficients exceed double range") from None
        if not all(is_finite(c) for c in cs):
            raise RangeError("coefficients exceed double range")
        return Poly(cs)

    def shifted(self, de: int) -> "ScaledPoly":
        return ScaledPoly(self.mant, tuple(e + de for e in self.exp))

    def max_exp(self) -> int:
        return max(e for m, e in zip(self.mant, self.exp) if m != 0)


def _sconv(am, ae, bm, be) -> tuple[list[complex], list[int]]:
    """Convolution of two exponent-carrying coefficient lists."""
    n = len(am) + len(bm) - 1
    terms: list[list[tuple[complex, int]]] = [[] for _ in range(n)]
    for i, (x, xe) in enumerate(zip(am, ae)):
        if x == 0:
            continue
        for j, (y, ye) in enumerate(zip(bm, be)):
            if y != 0:
                terms[i + j].append((x * y, xe + ye))
    return _sum_terms(terms)


def _sum_terms(terms) -> tuple[list[complex], list[int]]:
    mant, exps = [], []
    for ts in terms:
        if not ts:
            mant.append(0j)
            exps.append(0)
            continue
        top = max(e for _, e in ts)
        acc = 0j
        for m, e in ts:
            acc += _ldexp(m, e - top) if e - top > -1100 else 0j
        m, e = _split_exp(acc)
        mant.append(m)
        exps.append(e + top if m != 0 else 0)
    return mant, exps


def _ssub(a, b):
    """``a - b`` for (mant, exp) lists, padded to equal length."""
    (am, ae), (bm, be) = a, b
    n = max(len(am), len(bm))
    am = list(am) + [0j] * (n - len(am))
    ae = list(ae) + [0] * (n - len(ae))
    bm = list(bm) + [0j] * (n - len(bm))
    be = list(be) + [0] * (n - len(be))
    terms = []
    for i in range(n):
        ts = []
        if am[i] != 0:
            ts.append((am[i], ae[i]))
        if bm[i] != 0:
            ts.append((-bm[i], be[i]))
        terms.append(ts)
    return _sum_terms(terms)


def _conv(a: Sequence[complex], b: Sequence[complex]) -> list[complex]:
    out = [0j] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _sub(a: Sequence[complex], b: Sequence[complex]) -> list[complex]:
    n = max(len(a), len(b))
    a = list(a) + [0j] * (n - len(a))
    b = list(b) + [0j] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


@dataclass(frozen=True)
class SquaringState:
    """Level ``h`` of the DLG (and optionally FG) iteration.

    ``p`` and ``q`` are :class:`Poly` in plain mode and :class:`ScaledPoly`
    when ``normalized``.  ``log2_scale`` records the total power of two
    divided out of both ``p`` and ``q`` by normalization.
    """

    h: int
    p: Poly | ScaledPoly
    q: Poly | ScaledPoly | None = None
    normalized: bool = False
    log2_scale: int = 0

    @property
    def degree(self) -> int:
        return self.p.degree


def initial_state(p: Poly, fg: bool = False, normalize: bool = False) -> SquaringState:
    """Level-0 state; ``fg`` adds ``q_0(x) = x p'(x)``."""
    if p.is_zero():
        raise DomainError("zero polynomial")
    q = None
    if fg:
        q = Poly([0j] + list(derivative(p).coeffs)) if p.degree > 0 else Poly([0])
    if normalize:
        ps = ScaledPoly.from_poly(p)
        qs = ScaledPoly.from_poly(q) if q is not None else None
        return _renormalize(SquaringState(0, ps, qs, True, 0))
    return SquaringState(0, p, q, False, 0)


def _renormalize(state: SquaringState) -> SquaringState:
    top = state.p.max_exp()
    p = state.p.shifted(-top)
    q = state.q.shifted(-top) if state.q is not None else None
    return replace(state, p=p, q=q, log2_scale=state.log2_scale + top)


def _pad(cs, n, zero):
    return list(cs) + [zero] * (n - len(cs))


def _plain_step(p: Sequence[complex], q: Sequence[complex] | None, d: int):
    sign = -1 if d % 2 else 1
    e, o = p[0::2], p[1::2]
    e2 = _conv(e, e)
    o2 = _conv(o, o) if o else [0j]
    p_new = _sub(e2, [0j] + o2)[: d + 1]
    p_new = [sign * c for c in _pad(p_new, d + 1, 0j)]
    q_new = None
    if q is not None:
        qa, qb = q[0::2], q[1::2]
        be = _conv(qb, e) if qb else [0j]
        ao = _conv(qa, o) if o else [0j]
        q_new = [sign * c for c in _pad(_sub(be, ao)[: d + 1], d + 1, 0j)]
    return p_new, q_new


def _scaled_step(p: ScaledPoly, q: ScaledPoly | None, d: int):
    sign = -1 if d % 2 else 1
    em, ee = p.mant[0::2], p.exp[0::2]
    om, oe = p.mant[1::2], p.exp[1::2]
    e2 = _sconv(em, ee, em, ee)
    if om:
        om2, oe2 = _sconv(om, oe, om, oe)
        xo2 = ([0j] + om2, [0] + oe2)
    else:
        xo2 = ([0j], [0])
    pm, pe = _ssub(e2, xo2)
    pm = _pad(pm[: d + 1], d + 1, 0j)
    pe = _pad(pe[: d + 1], d + 1, 0)
    p_new = ScaledPoly(tuple(sign * m for m in pm), tuple(pe))
    q_new = None
    if q is not None:
        am, ae = q.mant[0::2], q.exp[0::2]
        bm, be = q.mant[1::2], q.exp[1::2]
        bxe = _sconv(bm, be, em, ee) if bm else ([0j], [0])
        axo = _sconv(am, ae, om, oe) if om else ([0j], [0])
        qm, qe = _ssub(bxe, axo)
        qm = _pad(qm[: d + 1], d + 1, 0j)
        qe = _pad(qe[: d + 1], d + 1, 0)
        q_new = ScaledPoly(tuple(sign * m for m in qm), tuple(qe))
    return p_new, q_new


def _advance(state: SquaringState, with_q: bool) -> SquaringState:
    d = state.degree
    if state.normalized:
        p_new, q_new = _scaled_step(state.p, state.q if with_q else None, d)
        if p_new.mant[d] == 0:
            raise RangeError("leading coefficient vanished")
        # squaring doubles the power of two already divided out
        nxt = SquaringState(state.h + 1, p_new, q_new, True, 2 * state.log2_scale)
        return _renormalize(nxt)
    p = list(state.p.coeffs) + [0j] * (d + 1 - len(state.p.coeffs))
    q = None
    if with_q:
        q = _pad(state.q.coeffs, d + 1, 0j)
    p_new, q_new = _plain_step(p, q, d)
    lead = state.p.leading
    p_new[d] = lead * lead
    for c in p_new + (q_new or []):
        if not is_finite(c):
            raise RangeError(f"coefficient overflow at DLG step {state.h + 1}")
    if p_new[d] == 0:
        raise RangeError(f"leading coefficient underflowed at DLG step {state.h + 1}")
    if state.p.coeffs[0] != 0 and p_new[0] == 0:
        raise RangeError(f"trailing coefficient underflowed at DLG step {state.h + 1}")
    qp = Poly(q_new) if q_new is not None else None
    return SquaringState(state.h + 1, Poly(p_new), qp, False, 0)


def dlg_step(state: SquaringState) -> SquaringState:
    """One root-squaring step ``p_{h+1}(x) = (-1)^d (e(x)^2 - x o(x)^2)``.

    ``e`` and ``o`` are the even and odd parts, ``p_h(y) = e(y^2) + y o(y^2)``.
    Any FG companion ``q`` is dropped; use :func:`fg_step` to carry it.
    """
    return _advance(replace(state, q=None), with_q=False)


def fg_step(state: SquaringState) -> SquaringState:
    """Advance ``p`` by DLG and ``q`` by ``q_{h+1} = (-1)^d (b e - a o)``.

    Here ``q_h(y) = a(y^2) + y b(y^2)``.  The ``(-1)^d`` factor matches the
    sign normalization of ``p_{h+1}`` so that ``q_h(0)/p_h'(0)`` is
    unaffected by it.
    """
    if state.q is None:
        raise DomainError("FG step needs q; build the state with fg=True")
    return _advance(state, with_q=True)


def run_dlg(p: Poly, steps: int, normalize: bool = False, fg: bool = False) -> list[SquaringState]:
    """States ``[level 0, ..., level steps]``."""
    st = initial_state(p, fg=fg, normalize=normalize)
    out = [st]
    for _ in range(steps):
        st = fg_step(st) if fg else dlg_step(st)
        out.append(st)
    return out


def _coeff_ratio(poly, i: int, j: int) -> complex:
    if isinstance(poly, ScaledPoly):
        return poly.ratio(i, j)
    den = poly.coeffs[j] if j < len(poly.coeffs) else 0j
    if den == 0:
        raise DivByZeroError(f"coefficient {j} vanishes")
    num = poly.coeffs[i] if i < len(poly.coeffs) else 0j
    return num / den


def gemignani_estimate(state: SquaringState) -> complex:
    """``q_h(0) / p_h'(0)``, which tends to the absolutely smallest zero."""
    if state.q is None:
        raise DomainError("gemignani_estimate needs an FG state")
    try:
        if isinstance(state.p, ScaledPoly):
            return state.q.ratio(0, 1, state.p)
        return _coeff_ratio_pair(state.q, state.p)
    except DivByZeroError:
        raise DivByZeroError(
            "p_h'(0) = 0: the smallest root radius is not unique "
            "(coincident moduli make the estimate undefined)") from None


def _coeff_ratio_pair(q: Poly, p: Poly) -> complex:
    den = p.coeffs[1] if len(p.coeffs) > 1 else 0j
    if den == 0:
        raise DivByZeroError("p_h'(0) vanishes")
    return q.coeffs[0] / den


def extremal_power_ratios(state: SquaringState) -> tuple[complex, complex]:
    """``(-p_1/p_0, -p_{d-1}/p_d)`` at level ``h``.

    These equal ``sum x_j**(-2**h)`` and ``sum x_j**(2**h)``: the first is
    dominated by the smallest zero, the second by the largest.
    """
    d = state.degree
    if d < 1:
        raise DomainError("degree must be >= 1")
    small = -_coeff_ratio(state.p, 1, 0)
    large = -_coeff_ratio(state.p, d - 1, d)
    return small, large


def descend(p_levels: Sequence[Poly], y, h: int | None = None) -> complex:
    """Recover a zero of ``p_levels[0]`` from a zero ``y`` of ``p_levels[h]``.

    At each level the square root with the smaller residual is kept, so
    ``2h`` evaluations are made.  Near-ties (residuals within 10%) raise an
    :class:`AmbiguityWarning` and are broken by smaller ``|imag|``, then by
    nonnegative real part.
    """
    if h is None:
        h = len(p_levels) - 1
    if h > len(p_levels) - 1:
        raise DomainError("need levels 0..h")
    z = complex(y)
    for i in range(h - 1, -1, -1):
        s = cmath.sqrt(z)
        cands = (s, -s)
        res = [abs(eval_poly(p_levels[i], c)) for c in cands]
        hi, lo = max(res), min(res)
        if hi == 0 or (hi - lo) < 0.1 * hi:
            warnings.warn(AmbiguityWarning(
                f"level {i}: candidates {cands[0]:.6g} and {cands[1]:.6g} fit equally"),
                stacklevel=2)
            z = min(cands, key=lambda c: (abs(c.imag), c.real < 0))
        else:
            z = cands[0] if res[0] <= res[1] else cands[1]
    return z


def ratio_squaring_eval(oracle: NewtonOracle, x, h: int) -> complex:
    """``p_h'(x)/p_h(x)`` of the implicit ``h``-times squared polynomial.

    Uses ``R_{h+1}(x) = (R_h(sqrt x) - R_h(-sqrt x)) / (2 sqrt x)`` with
    principal square roots; costs ``2**h`` oracle calls.
    """
    if h < 0:
        raise DomainError("h must be nonnegative")
    if h > MAX_RATIO_DEPTH:
        raise DepthError(f"h={h} exceeds the 2**{MAX_RATIO_DEPTH} evaluation guard")
    return _ratio_rec(oracle, complex(x), h)


def _ratio_rec(oracle: NewtonOracle, x: complex, h: int) -> complex:
    if h == 0:
        return oracle.evaluate(x)
    if x == 0:
        raise PoleError("squared-ratio recursion has a pole at x = 0")
    s = cmath.sqrt(x)
    return (_ratio_rec(oracle, s, h - 1) - _ratio_rec(oracle, -s, h - 1)) / (2 * s)
