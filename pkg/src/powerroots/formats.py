"""Plain-text input formats.

Everything after ``#`` on a line is ignored, as are blank lines.

polynomial::

    d
    re im        # coefficient of x**0
    ...          # d + 1 lines, lowest degree first

matrix::

    n
    re,im re,im ...   # n rows of n entries

straight-line program, one instruction per line, indices counting from 0::

    idx in
    idx const re im
    idx add|sub|mul|div a b
    idx smul a re im

centers: one ``re im`` pair per line.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .blackbox import Instruction, StraightLineProgram
from .errors import ParseError
from .polycore import Poly


def _lines(text: str) -> list[tuple[int, list[str]]]:
    out = []
    for no, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append((no, body.split()))
    return out


def _num(tok: str, no: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"line {no}: {tok!r} is not a number") from None


def _int(tok: str, no: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"line {no}: {tok!r} is not an integer") from None


def parse_poly(text: str) -> Poly:
    rows = _lines(text)
    if not rows:
        raise ParseError("empty polynomial file")
    no, head = rows[0]
    if len(head) != 1:
        raise ParseError(f"line {no}: expected the degree alone")
    d = _int(head[0], no)
    if d < 1:
        raise ParseError(f"line {no}: degree must be >= 1")
    body = rows[1:]
    if len(body) != d + 1:
        raise ParseError(f"expected {d + 1} coefficient lines, found {len(body)}")
    coeffs = []
    for no, toks in body:
        if len(toks) not in (1, 2):
            raise ParseError(f"line {no}: expected 're im'")
        re = _num(toks[0], no)
        im = _num(toks[1], no) if len(toks) == 2 else 0.0
        coeffs.append(complex(re, im))
    if coeffs[-1] == 0:
        raise ParseError("leading coefficient is zero")
    return Poly(coeffs)


def format_poly(p: Poly) -> str:
    lines = [str(p.degree)]
    lines += [f"{c.real:.17g} {c.imag:.17g}" for c in p.coeffs]
    return "\n".join(lines) + "\n"


def _entry(tok: str, no: int) -> complex:
    parts = tok.split(",")
    if len(parts) == 1:
        return complex(_num(parts[0], no), 0.0)
    if len(parts) == 2:
        return complex(_num(parts[0], no), _num(parts[1], no))
    raise ParseError(f"line {no}: matrix entry {tok!r} is not 're,im'")


def parse_matrix(text: str) -> np.ndarray:
    rows = _lines(text)
    if not rows:
        raise ParseError("empty matrix file")
    no, head = rows[0]
    if len(head) != 1:
        raise ParseError(f"line {no}: expected the dimension alone")
    n = _int(head[0], no)
    if n < 1:
        raise ParseError(f"line {no}: dimension must be >= 1")
    body = rows[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} matrix rows, found {len(body)}")
    T = np.zeros((n, n), dtype=complex)
    for i, (no, toks) in enumerate(body):
        if len(toks) != n:
            raise ParseError(f"line {no}: expected {n} entries, found {len(toks)}")
        T[i] = [_entry(t, no) for t in toks]
    return T


def parse_slp(text: str) -> StraightLineProgram:
    ins = []
    for no, toks in _lines(text):
        idx = _int(toks[0], no)
        if idx != len(ins):
            raise ParseError(f"line {no}: instruction index {idx}, expected {len(ins)}")
        if len(toks) < 2:
            raise ParseError(f"line {no}: missing op")
        op, args = toks[1], toks[2:]
        if op == "in" and not args:
            ins.append(Instruction("in"))
        elif op == "const" and len(args) == 2:
            ins.append(Instruction("const", scalar=complex(_num(args[0], no), _num(args[1], no))))
        elif op in ("add", "sub", "mul", "div") and len(args) == 2:
            ins.append(Instruction(op, (_int(args[0], no), _int(args[1], no))))
        elif op == "smul" and len(args) == 3:
            ins.append(Instruction("smul", (_int(args[0], no),),
                                   complex(_num(args[1], no), _num(args[2], no))))
        else:
            raise ParseError(f"line {no}: bad instruction {' '.join(toks[1:])!r}")
    return StraightLineProgram(ins)


def format_slp(prog: StraightLineProgram) -> str:
    lines = []
    for k, ins in enumerate(prog.instructions):
        if ins.op == "in":
            lines.append(f"{k} in")
        elif ins.op == "const":
            lines.append(f"{k} const {ins.scalar.real:.17g} {ins.scalar.imag:.17g}")
        elif ins.op == "smul":
            lines.append(f"{k} smul {ins.operands[0]} {ins.scalar.real:.17g} {ins.scalar.imag:.17g}")
        else:
            lines.append(f"{k} {ins.op} {ins.operands[0]} {ins.operands[1]}")
    return "\n".join(lines) + "\n"


def parse_centers(text: str) -> list[complex]:
    out = []
    for no, toks in _lines(text):
        if len(toks) != 2:
            raise ParseError(f"line {no}: expected 're im'")
        out.append(complex(_num(toks[0], no), _num(toks[1], no)))
    return out


def read_text(path: str | Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}") from None
