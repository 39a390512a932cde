"""Exact linear algebra over the rationals.

Rationals are :class:`fractions.Fraction`.  Elimination is delegated to an
integer fraction-free kernel (compiled when available, see ``KERNEL``); rows
are scaled to integers first, which leaves row spaces and therefore RREFs
unchanged.
"""

from __future__ import annotations

import os
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from bundlelab import _kernel_py

if os.environ.get("BUNDLELAB_PURE"):
    _kernel = _kernel_py
    KERNEL = "python"
else:
    try:
        from bundlelab import _kernel  # type: ignore[attr-defined]

        KERNEL = "compiled"
    except ImportError:
        _kernel = _kernel_py
        KERNEL = "python"

Rational = Fraction

__all__ = [
    "KERNEL",
    "Matrix",
    "Rational",
    "kernel_basis",
    "rank",
    "rank_rows",
    "rref",
    "rref_rows",
]


def _integer_row(row: Sequence) -> list[int]:
    den = 1
    for x in row:
        if type(x) is not int:
            d = x.denominator
            if d != 1:
                den = lcm(den, d)
    if den == 1:
        return [int(x) for x in row]
    return [int(x * den) for x in row]


def rref_rows(rows: Iterable[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """RREF of a list of rational rows; returns nonzero rows and pivot columns."""
    irows = [_integer_row(r) for r in rows]
    ech, pivots = _kernel.echelon(irows, ncols, True)
    out = []
    zero = Fraction(0)
    for row, c in zip(ech, pivots):
        pv = row[c]
        out.append([Fraction(x, pv) if x else zero for x in row])
    return out, pivots


def rank_rows(rows: Iterable[Sequence], ncols: int) -> int:
    irows = [_integer_row(r) for r in rows]
    if not irows or ncols == 0:
        return 0
    return _kernel.rank(irows, ncols)


class Matrix:
    """Dense immutable rational matrix, stored row-major."""

    __slots__ = ("nrows", "ncols", "entries")

    def __init__(self, entries: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(Fraction(x) for x in r) for r in entries)
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix with no rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix rows")
        self.nrows = len(rows)
        self.ncols = ncols
        self.entries = rows

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> Matrix:
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> Matrix:
        return Matrix([self.column(j) for j in range(self.ncols)], self.nrows)

    @property
    def T(self) -> Matrix:
        return self.transpose()

    def __matmul__(self, other: Matrix) -> Matrix:
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = [other.column(j) for j in range(other.ncols)]
        return Matrix(
            [[sum((a * b for a, b in zip(r, c) if a and b), Fraction(0)) for c in cols]
             for r in self.entries],
            other.ncols,
        )

    def apply(self, v: Sequence) -> list[Fraction]:
        return [sum((a * b for a, b in zip(r, v) if a and b), Fraction(0)) for r in self.entries]

    def __add__(self, other: Matrix) -> Matrix:
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            self.ncols,
        )

    def hstack(self, other: Matrix) -> Matrix:
        if self.nrows != other.nrows:
            raise ValueError("row count mismatch")
        return Matrix([r + s for r, s in zip(self.entries, other.entries)],
                      self.ncols + other.ncols)

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.entries))

    def __repr__(self) -> str:
        return f"Matrix({[[str(x) for x in r] for r in self.entries]!r}, ncols={self.ncols})"

    def tolist(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self.entries]


def rref(m: Matrix) -> tuple[Matrix, int, list[int]]:
    """Reduced row echelon form; zero rows are kept at the bottom."""
    rows, pivots = rref_rows(m.entries, m.ncols)
    rk = len(pivots)
    rows += [[Fraction(0)] * m.ncols for _ in range(m.nrows - rk)]
    return Matrix(rows, m.ncols), rk, pivots


def rank(m: Matrix) -> int:
    return rank_rows(m.entries, m.ncols)


def kernel_from_rref(rows: Sequence[Sequence[Fraction]], pivots: Sequence[int],
                     ncols: int) -> list[list[Fraction]]:
    """Right null space basis read off a RREF, one vector per free column."""
    pivot_set = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            if row[f]:
                v[p] = -row[f]
        basis.append(v)
    return basis


def kernel_basis(m: Matrix) -> list[tuple[Fraction, ...]]:
    rows, pivots = rref_rows(m.entries, m.ncols)
    return [tuple(v) for v in kernel_from_rref(rows, pivots, m.ncols)]
