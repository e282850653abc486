"""Newton-ratio oracles ``R(x) = p'(x)/p(x)`` and their adapters.

Every oracle returns ``+p'/p``.  Consumers that need Newton's inverse ratio
``-p'/p`` negate at the call site.  Oracles are pure functions of ``x``
apart from an evaluation counter, which is lock-protected so adapters can
be shared between threads.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import DivByZeroError, DomainError, ParseError, PoleError
from .polycore import Poly, as_complex, derivative, eval_with_derivative, polyval_many

POLE_THRESHOLD = 1e-300
MATRIX_PIVOT_RTOL = 1e-13


class NewtonOracle:
    """Black box for ``R(x) = p'(x)/p(x)`` of a degree-``d`` polynomial.

    ``fn`` maps one complex point to the ratio; ``batch_fn``, when given,
    maps a numpy array of points to an array of ratios and is used by
    :meth:`evaluate_many`.  Both may raise :class:`PoleError`.  ``poly``
    is set only for coefficient-backed oracles and enables the folded-DFT
    fast path of the Cauchy sums.
    """

    def __init__(self, degree: int, fn: Callable[[complex], complex],
                 batch_fn: Callable[[np.ndarray], np.ndarray] | None = None,
                 poly: Poly | None = None, name: str = "oracle"):
        if degree < 0:
            raise DomainError("degree must be nonnegative")
        self.degree = int(degree)
        self._fn = fn
        self._batch_fn = batch_fn
        self.poly = poly
        self.name = name
        self._count = 0
        self._lock = threading.Lock()

    def __repr__(self):
        return f"<NewtonOracle {self.name} d={self.degree} evals={self.eval_count}>"

    @property
    def eval_count(self) -> int:
        return self._count

    def add_evals(self, n: int) -> None:
        with self._lock:
            self._count += n

    def evaluate(self, x) -> complex:
        x = complex(x)
        self.add_evals(1)
        r = self._fn(x)
        if not (math.isfinite(r.real) and math.isfinite(r.imag)):
            raise PoleError(f"non-finite Newton ratio at x={x!r}")
        return r

    __call__ = evaluate

    def evaluate_many(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=complex).ravel()
        if self._batch_fn is None:
            # delegate to evaluate() so the counter is bumped per point
            return np.array([self.evaluate(x) for x in xs], dtype=complex)
        self.add_evals(len(xs))
        r = np.asarray(self._batch_fn(xs), dtype=complex)
        if not np.all(np.isfinite(r)):
            bad = xs[~np.isfinite(r)][0]
            raise PoleError(f"non-finite Newton ratio at x={complex(bad)!r}")
        return r


def _check_poles(vals: np.ndarray, xs: np.ndarray) -> None:
    small = np.abs(vals) < POLE_THRESHOLD
    if np.any(small):
        raise PoleError(f"evaluation at a zero of p: x={complex(xs[small][0])!r}")


def oracle_from_coeffs(p: Poly) -> NewtonOracle:
    """Oracle backed by Horner evaluation of ``p`` and ``p'``."""
    if p.degree < 1:
        raise DomainError("oracle needs a polynomial of degree >= 1")

    def fn(x: complex) -> complex:
        val, der = eval_with_derivative(p, x)
        if abs(val) < POLE_THRESHOLD:
            raise PoleError(f"evaluation at a zero of p: x={x!r}")
        return der / val

    def batch(xs: np.ndarray) -> np.ndarray:
        val, der = polyval_many(p, xs)
        _check_poles(val, xs)
        return der / val

    return NewtonOracle(p.degree, fn, batch, poly=p, name="coeffs")


# --------------------------------------------------------------------------
# straight-line programs

@dataclass(frozen=True)
class DualValue:
    """Pair ``(f(x), f'(x))`` propagated by the chain rule."""

    value: complex
    deriv: complex

    def __add__(self, o: "DualValue") -> "DualValue":
        return DualValue(self.value + o.value, self.deriv + o.deriv)

    def __sub__(self, o: "DualValue") -> "DualValue":
        return DualValue(self.value - o.value, self.deriv - o.deriv)

    def __mul__(self, o: "DualValue") -> "DualValue":
        return DualValue(self.value * o.value, self.value * o.deriv + self.deriv * o.value)

    def __truediv__(self, o: "DualValue") -> "DualValue":
        if np.any(o.value == 0):
            raise DivByZeroError("division by zero inside straight-line program")
        v = self.value / o.value
        return DualValue(v, (self.deriv - v * o.deriv) / o.value)

    def smul(self, s: complex) -> "DualValue":
        return DualValue(s * self.value, s * self.deriv)


_BINARY = {"add", "sub", "mul", "div"}


@dataclass(frozen=True)
class Instruction:
    op: str
    operands: tuple[int, ...] = ()
    scalar: complex = 0j


class StraightLineProgram:
    """Branch-free program in one input variable.

    Instruction ``k`` defines value ``k``; operands must refer to earlier
    values.  The last instruction's value is the program's output ``f(x)``.
    """

    def __init__(self, instructions: Sequence[Instruction]):
        if not instructions:
            raise ParseError("empty straight-line program")
        for k, ins in enumerate(instructions):
            if ins.op in _BINARY:
                want = 2
            elif ins.op == "smul":
                want = 1
            elif ins.op in ("in", "const"):
                want = 0
            else:
                raise ParseError(f"unknown op {ins.op!r} at instruction {k}")
            if len(ins.operands) != want:
                raise ParseError(f"instruction {k} ({ins.op}) needs {want} operands")
            if any(not 0 <= a < k for a in ins.operands):
                raise ParseError(f"instruction {k} uses an operand not defined before it")
        self.instructions = tuple(instructions)

    def __len__(self):
        return len(self.instructions)

    def run(self, x):
        """Execute with ``x`` of any type supporting the arithmetic used."""
        vals = []
        for ins in self.instructions:
            op = ins.op
            if op == "in":
                v = x
            elif op == "const":
                v = ins.scalar
            elif op == "smul":
                v = vals[ins.operands[0]] * ins.scalar
            else:
                a, b = (vals[i] for i in ins.operands)
                if op == "add":
                    v = a + b
                elif op == "sub":
                    v = a - b
                elif op == "mul":
                    v = a * b
                else:
                    v = a / b
            vals.append(v)
        return vals[-1]

    def run_dual(self, x) -> DualValue:
        """Value and derivative at ``x`` (scalar or numpy array)."""
        vals: list[DualValue] = []
        one = np.ones_like(x) if isinstance(x, np.ndarray) else 1 + 0j
        zero = one * 0
        for ins in self.instructions:
            op = ins.op
            if op == "in":
                v = DualValue(x, one)
            elif op == "const":
                v = DualValue(ins.scalar * one, zero)
            elif op == "smul":
                v = vals[ins.operands[0]].smul(ins.scalar)
            else:
                a, b = (vals[i] for i in ins.operands)
                v = {"add": a.__add__, "sub": a.__sub__,
                     "mul": a.__mul__, "div": a.__truediv__}[op](b)
            vals.append(v)
        return vals[-1]

    def degree_bound(self) -> int | None:
        """Upper bound on the polynomial degree, or None if ``div`` occurs."""
        degs: list[int] = []
        for ins in self.instructions:
            if ins.op == "in":
                degs.append(1)
            elif ins.op == "const":
                degs.append(0)
            elif ins.op == "smul":
                degs.append(degs[ins.operands[0]])
            elif ins.op in ("add", "sub"):
                degs.append(max(degs[i] for i in ins.operands))
            elif ins.op == "mul":
                degs.append(sum(degs[i] for i in ins.operands))
            else:
                return None
        return degs[-1]


def slp_from_poly(p: Poly) -> StraightLineProgram:
    """Horner scheme for ``p`` written as a straight-line program."""
    ins = [Instruction("in"), Instruction("const", scalar=p.leading)]
    acc = 1
    for c in reversed(p.coeffs[:-1]):
        ins.append(Instruction("mul", (acc, 0)))
        ins.append(Instruction("const", scalar=c))
        ins.append(Instruction("add", (len(ins) - 2, len(ins) - 1)))
        acc = len(ins) - 1
    return StraightLineProgram(ins)


def mandelbrot_slp(depth: int) -> StraightLineProgram:
    """Program for ``z_0 = x``, ``z_{k+1} = z_k**2 + x``; degree ``2**depth``."""
    ins = [Instruction("in")]
    cur = 0
    for _ in range(depth):
        ins.append(Instruction("mul", (cur, cur)))
        ins.append(Instruction("add", (len(ins) - 1, 0)))
        cur = len(ins) - 1
    return StraightLineProgram(ins)


def oracle_from_slp(prog: StraightLineProgram, degree: int | None = None) -> NewtonOracle:
    """Oracle computing ``f'/f`` by forward propagation of dual values."""
    if degree is None:
        degree = prog.degree_bound()
        if degree is None:
            raise DomainError("program uses division; pass the degree explicitly")

    def fn(x: complex) -> complex:
        dv = prog.run_dual(x)
        if abs(dv.value) < POLE_THRESHOLD:
            raise PoleError(f"evaluation at a zero of f: x={x!r}")
        return complex(dv.deriv / dv.value)

    def batch(xs: np.ndarray) -> np.ndarray:
        dv = prog.run_dual(xs)
        val = np.asarray(dv.value, dtype=complex) * np.ones_like(xs)
        der = np.asarray(dv.deriv, dtype=complex) * np.ones_like(xs)
        _check_poles(val, xs)
        return der / val

    return NewtonOracle(degree, fn, batch, name="slp")


# --------------------------------------------------------------------------
# adapters

def deflated_oracle(base: NewtonOracle, zeros: Iterable) -> NewtonOracle:
    """Ratio of ``p(x) / prod(x - z_j)``: subtracts ``sum 1/(x - z_j)``."""
    zs = [as_complex(z) for z in zeros]
    if len(zs) > base.degree:
        raise DomainError("cannot deflate more zeros than the degree")
    zarr = np.array(zs, dtype=complex)

    def fn(x: complex) -> complex:
        r = base.evaluate(x)
        for z in zs:
            if x == z:
                raise PoleError(f"evaluation at deflated zero {z!r}")
            r -= 1 / (x - z)
        return r

    def batch(xs: np.ndarray) -> np.ndarray:
        r = base.evaluate_many(xs)
        for z in zarr:
            diff = xs - z
            if np.any(diff == 0):
                raise PoleError(f"evaluation at deflated zero {complex(z)!r}")
            r = r - 1 / diff
        return r

    return NewtonOracle(base.degree - len(zs), fn, batch, name=f"deflated({base.name})")


def reversed_oracle(base: NewtonOracle) -> NewtonOracle:
    """Ratio of ``x**d p(1/x)``: ``d/x - R(1/x)/x**2``."""
    d = base.degree

    def fn(x: complex) -> complex:
        if x == 0:
            raise PoleError("reversed oracle has a pole at x = 0")
        return d / x - base.evaluate(1 / x) / (x * x)

    def batch(xs: np.ndarray) -> np.ndarray:
        if np.any(xs == 0):
            raise PoleError("reversed oracle has a pole at x = 0")
        return d / xs - base.evaluate_many(1 / xs) / (xs * xs)

    return NewtonOracle(d, fn, batch, name=f"reversed({base.name})")


def shifted_oracle(base: NewtonOracle, c, rho: float) -> NewtonOracle:
    """Ratio of ``t(y) = p(c + rho*y)``: ``rho * R(c + rho*y)``."""
    rho = float(rho)
    if not rho > 0:
        raise DomainError("rho must be positive")
    c = as_complex(c)
    if c == 0 and rho == 1:
        fn = base.evaluate
        batch = base.evaluate_many
    else:
        def fn(y: complex) -> complex:
            return rho * base.evaluate(c + rho * y)

        def batch(ys: np.ndarray) -> np.ndarray:
            return rho * base.evaluate_many(c + rho * ys)

    return NewtonOracle(base.degree, fn, batch, name=f"shifted({base.name})")


def matrix_oracle(T) -> NewtonOracle:
    """Ratio of ``det(xI - T)``, i.e. ``trace((xI - T)^-1)`` by dense LU."""
    T = np.array(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise DomainError("matrix_oracle needs a nonempty square matrix")
    n = T.shape[0]
    eye = np.eye(n, dtype=complex)
    thresh = MATRIX_PIVOT_RTOL * np.linalg.norm(T, np.inf)

    def fn(x: complex) -> complex:
        A = x * eye - T
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
        if np.min(np.abs(np.diag(lu))) <= thresh:
            raise PoleError(f"xI - T is singular to working precision at x={x!r}")
        inv = scipy.linalg.lu_solve((lu, piv), eye, check_finite=False)
        return complex(np.trace(inv))

    def batch(xs: np.ndarray) -> np.ndarray:
        A = xs[:, None, None] * eye - T
        try:
            inv = np.linalg.solve(A, np.broadcast_to(eye, A.shape))
        except np.linalg.LinAlgError:
            raise PoleError("xI - T is singular at a batch node") from None
        # an inverse entry above 1/thresh counts as a pivot below thresh
        big = np.max(np.abs(inv), axis=(1, 2)) * thresh >= 1
        if np.any(big):
            raise PoleError(f"xI - T is singular to working precision at x={complex(xs[big][0])!r}")
        return np.trace(inv, axis1=1, axis2=2)

    return NewtonOracle(n, fn, batch, name="matrix")


def companion_matrix(p: Poly) -> np.ndarray:
    """Frobenius companion matrix whose characteristic polynomial is monic ``p``."""
    m = p.monic().coeffs
    d = p.degree
    C = np.zeros((d, d), dtype=complex)
    C[1:, :-1] = np.eye(d - 1)
    C[:, -1] = [-c for c in m[:-1]]
    return C


__all__ = [
    "NewtonOracle", "DualValue", "Instruction", "StraightLineProgram",
    "oracle_from_coeffs", "oracle_from_slp", "slp_from_poly", "mandelbrot_slp",
    "deflated_oracle", "reversed_oracle", "shifted_oracle", "matrix_oracle",
    "companion_matrix", "derivative",
]
