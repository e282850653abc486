"""Dense univariate polynomials over complex doubles.

Coefficients are stored lowest degree first, so ``coeffs[i]`` multiplies
``x**i``.  All loops run in a fixed order so results are bit-reproducible.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, RangeError


def as_complex(z) -> complex:
    """Coerce a scalar to ``complex`` and reject NaN/inf components."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise RangeError(f"non-finite scalar {z!r}")
    return z


def is_finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class Poly:
    """Polynomial ``sum(coeffs[i] * x**i)`` with trailing zeros trimmed.

    The zero polynomial is stored as a single zero coefficient of degree 0.
    ``degree_dropped`` is metadata set by :func:`reverse` when ``p(0) == 0``.
    """

    coeffs: tuple[complex, ...]
    degree_dropped: bool = field(default=False, compare=False)

    def __init__(self, coeffs: Iterable, degree_dropped: bool = False):
        cs = [as_complex(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [0j]
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "degree_dropped", degree_dropped)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, x) -> complex:
        return eval_poly(self, x)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> complex:
        return self.coeffs[i]

    def __mul__(self, other: "Poly") -> "Poly":
        return Poly(_convolve(self.coeffs, other.coeffs))

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self), len(other))
        a = self.coeffs + (0j,) * (n - len(self))
        b = other.coeffs + (0j,) * (n - len(other))
        return Poly(x + y for x, y in zip(a, b))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + Poly(-c for c in other.coeffs)

    def scale(self, s) -> "Poly":
        return Poly(c * s for c in self.coeffs)

    def monic(self) -> "Poly":
        if self.is_zero():
            raise DomainError("zero polynomial has no leading coefficient")
        return self.scale(1 / self.leading)

    def to_numpy(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)


@dataclass(frozen=True)
class Disc:
    """Closed disc ``D(center, radius)``."""

    center: complex
    radius: float

    def __init__(self, center, radius: float):
        radius = float(radius)
        if not (radius > 0 and math.isfinite(radius)):
            raise DomainError(f"disc radius must be positive and finite, got {radius}")
        object.__setattr__(self, "center", as_complex(center))
        object.__setattr__(self, "radius", radius)

    def contains(self, z) -> bool:
        return abs(complex(z) - self.center) <= self.radius


def _convolve(a: Sequence[complex], b: Sequence[complex]) -> list[complex]:
    out = [0j] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def eval_poly(p: Poly, x) -> complex:
    """Horner evaluation of ``p`` at ``x``."""
    x = complex(x)
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * x + c
    if not is_finite(acc):
        raise RangeError(f"polynomial value overflowed at x={x!r}")
    return acc


def eval_with_derivative(p: Poly, x) -> tuple[complex, complex]:
    """Return ``(p(x), p'(x))`` from a single Horner sweep."""
    x = complex(x)
    val = 0j
    der = 0j
    for c in reversed(p.coeffs):
        der = der * x + val
        val = val * x + c
    if not (is_finite(val) and is_finite(der)):
        raise RangeError(f"polynomial value overflowed at x={x!r}")
    return val, der


def derivative(p: Poly) -> Poly:
    if p.degree == 0:
        return Poly([0])
    return Poly(i * c for i, c in enumerate(p.coeffs) if i > 0)


def reverse(p: Poly) -> Poly:
    """Return ``x**d * p(1/x)``; sets ``degree_dropped`` when ``p(0) == 0``."""
    return Poly(reversed(p.coeffs), degree_dropped=p.coeffs[0] == 0)


def shift_scale(p: Poly, c, rho: float) -> Poly:
    """Coefficients of ``t(y) = p(c + rho*y)``.

    Taylor shift by repeated synthetic division, then scaling of the
    ``i``-th coefficient by ``rho**i``.
    """
    rho = float(rho)
    if not rho > 0:
        raise DomainError("rho must be positive")
    c = as_complex(c)
    a = list(p.coeffs)
    n = len(a)
    # after pass k, a[k] holds the k-th Taylor coefficient of p at c
    for k in range(n - 1):
        for i in range(n - 2, k - 1, -1):
            a[i] += c * a[i + 1]
    scale = 1.0
    out = []
    for coef in a:
        v = coef * scale
        if not is_finite(v):
            raise RangeError("coefficient overflow in shift_scale")
        out.append(v)
        scale *= rho
    return Poly(out)


def mod_cyclotomic(p: Poly, q: int) -> Poly:
    """Reduce ``p`` modulo ``x**q - 1`` by folding exponents."""
    if q < 1:
        raise DomainError("q must be >= 1")
    out = [0j] * min(q, len(p))
    for i, c in enumerate(p.coeffs):
        out[i % q] += c
    return Poly(out)


def unity_nodes(q: int, rotation: float = 0.0) -> np.ndarray:
    """``exp(i*rotation) * zeta_q**g`` for ``g = 0..q-1``."""
    g = np.arange(q)
    return np.exp(1j * (2 * np.pi * g / q + rotation))


def eval_at_unity(p: Poly, q: int) -> list[complex]:
    """Values of ``p`` at the ``q``-th roots of unity ``zeta_q**g``.

    Power-of-two ``q`` goes through a radix-2 FFT of the folded
    coefficients; other ``q`` use Horner at each node.
    """
    if q < 1:
        raise DomainError("q must be >= 1")
    if q & (q - 1) == 0:
        folded = np.zeros(q, dtype=complex)
        folded[: len(mod_cyclotomic(p, q))] = mod_cyclotomic(p, q).coeffs
        # numpy's inverse transform uses exp(+2*pi*i*g*k/q), matching zeta_q
        vals = np.fft.ifft(folded) * q
        return [complex(v) for v in vals]
    return [eval_poly(p, complex(z)) for z in unity_nodes(q)]


def from_roots(roots: Iterable) -> Poly:
    """Monic polynomial with the given multiset of zeros."""
    coeffs = [1 + 0j]
    for r in roots:
        r = as_complex(r)
        nxt = [0j] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i + 1] += c
            nxt[i] -= r * c
        coeffs = nxt
    return Poly(coeffs)


def polyval_many(p: Poly, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized Horner: values and derivatives of ``p`` at an array of points."""
    xs = np.asarray(xs, dtype=complex)
    val = np.zeros_like(xs)
    der = np.zeros_like(xs)
    for c in reversed(p.coeffs):
        der = der * xs + val
        val = val * xs + c
    return val, der


def root_of_unity(q: int, power: int = 1) -> complex:
    return cmath.exp(2j * math.pi * (power % q) / q)
