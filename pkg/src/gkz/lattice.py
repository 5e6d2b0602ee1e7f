"""Exact integer linear algebra for relation lattices.

Everything here works on Python integers (arbitrary precision) and
``fractions.Fraction``; nothing touches floating point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from numbers import Integral
from typing import Iterable, Sequence

import numpy as np

from .errors import RankMismatchError, ShapeError

__all__ = [
    "IntegerMatrix",
    "check_orthogonality",
    "determinant",
    "hermite_normal_form",
    "integer_kernel_basis",
    "is_generating",
    "is_unimodular",
    "random_unimodular",
    "rref",
    "smith_invariants",
]


def _as_int(x) -> int:
    if isinstance(x, bool) or not isinstance(x, Integral):
        raise ShapeError(f"integer matrix entries must be integers, got {x!r}")
    return int(x)


@dataclass(frozen=True)
class IntegerMatrix:
    """Immutable integer matrix.

    ``ncols`` is stored separately so that matrices with zero rows (the
    empty lattice, or ``A`` with no rows) still know their width.
    """

    entries: tuple[tuple[int, ...], ...]
    ncols: int

    def __post_init__(self):
        if self.ncols < 1:
            raise ShapeError("an integer matrix needs at least one column")
        for row in self.entries:
            if len(row) != self.ncols:
                raise ShapeError("ragged rows in integer matrix")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], ncols: int | None = None) -> "IntegerMatrix":
        entries = tuple(tuple(_as_int(x) for x in row) for row in rows)
        if ncols is None:
            if not entries:
                raise ShapeError("cannot infer the width of an empty matrix")
            ncols = len(entries[0])
        return cls(entries, ncols)

    @classmethod
    def identity(cls, n: int) -> "IntegerMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @classmethod
    def empty(cls, ncols: int) -> "IntegerMatrix":
        return cls((), ncols)

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return self.ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.ncols)

    def __getitem__(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.entries]

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.array(self.entries, dtype=dtype).reshape(self.rows, self.ncols)

    def transpose(self) -> "IntegerMatrix":
        if self.rows == 0:
            raise ShapeError("cannot transpose a matrix with no rows")
        return IntegerMatrix(tuple(zip(*self.entries)), self.rows)

    @property
    def T(self) -> "IntegerMatrix":
        return self.transpose()

    def __matmul__(self, other: "IntegerMatrix") -> "IntegerMatrix":
        if self.ncols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.entries))
        return IntegerMatrix(
            tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in self.entries),
            other.ncols,
        )

    def apply(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Exact product ``self @ vec`` for an integer vector."""
        if len(vec) != self.ncols:
            raise ShapeError(f"vector of length {len(vec)} does not fit {self.shape}")
        return tuple(sum(a * b for a, b in zip(row, vec)) for row in self.entries)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    @cached_property
    def rank(self) -> int:
        return len(rref(self.entries, self.ncols)[1])

    def __repr__(self) -> str:
        return f"IntegerMatrix({self.to_list()!r}, ncols={self.ncols})"


def rref(rows: Sequence[Sequence], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q; returns (matrix, pivot columns)."""
    work = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(work):
            break
        p = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        inv = 1 / work[r][c]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    return work, pivots


def hermite_normal_form(
    mat: IntegerMatrix, *, with_transform: bool = False
) -> IntegerMatrix | tuple[IntegerMatrix, IntegerMatrix]:
    """Row-style Hermite normal form ``H = U @ mat``.

    ``H`` is upper echelon with positive pivots and entries above each pivot
    reduced into ``[0, pivot)``; zero rows are kept at the bottom so that
    ``H`` has the shape of ``mat``.  ``U`` is unimodular.
    """
    n = mat.rows
    rows = [list(r) for r in mat.entries]
    U = [[int(i == j) for j in range(n)] for i in range(n)]

    def sub(dst: int, src: int, q: int) -> None:
        rows[dst] = [a - q * b for a, b in zip(rows[dst], rows[src])]
        U[dst] = [a - q * b for a, b in zip(U[dst], U[src])]

    def swap(i: int, j: int) -> None:
        rows[i], rows[j] = rows[j], rows[i]
        U[i], U[j] = U[j], U[i]

    pr = 0
    for c in range(mat.ncols):
        if pr == n:
            break
        found = False
        while True:
            nz = [r for r in range(pr, n) if rows[r][c] != 0]
            if not nz:
                break
            found = True
            swap(pr, min(nz, key=lambda r: abs(rows[r][c])))
            clean = True
            for r in range(pr + 1, n):
                if rows[r][c]:
                    sub(r, pr, rows[r][c] // rows[pr][c])
                    clean = clean and rows[r][c] == 0
            if clean:
                break
        if not found:
            continue
        if rows[pr][c] < 0:
            rows[pr] = [-x for x in rows[pr]]
            U[pr] = [-x for x in U[pr]]
        p = rows[pr][c]
        for r in range(pr):
            q = rows[r][c] // p
            if q:
                sub(r, pr, q)
        pr += 1

    H = IntegerMatrix(tuple(map(tuple, rows)), mat.ncols)
    if with_transform:
        return H, IntegerMatrix(tuple(map(tuple, U)), n) if n else IntegerMatrix.empty(1)
    return H


def _nonzero_rows(mat: IntegerMatrix) -> IntegerMatrix:
    return IntegerMatrix(tuple(r for r in mat.entries if any(r)), mat.ncols)


def integer_kernel_basis(A: IntegerMatrix) -> IntegerMatrix:
    """Z-basis of ``{l in Z^N : A l = 0}`` in Hermite normal form.

    Raises :class:`RankMismatchError` if ``A`` does not have full row rank.
    """
    N = A.cols
    if A.rows == 0:
        return IntegerMatrix.identity(N)
    if A.rank != A.rows:
        raise RankMismatchError(f"A has rank {A.rank} but {A.rows} rows")
    H, U = hermite_normal_form(A.transpose(), with_transform=True)
    # rows of U whose image under A^T vanishes span the kernel over Z
    kernel = [U[i] for i in range(N) if not any(H[i])]
    if not kernel:
        return IntegerMatrix.empty(N)
    return _nonzero_rows(hermite_normal_form(IntegerMatrix(tuple(kernel), N)))


def check_orthogonality(A: IntegerMatrix, M: IntegerMatrix) -> bool:
    """True iff ``A @ M.T == 0`` exactly."""
    if A.cols != M.cols:
        raise ShapeError(f"A has {A.cols} columns but M has {M.cols}")
    return all(sum(a * b for a, b in zip(ra, rm)) == 0 for ra in A for rm in M)


def smith_invariants(mat: IntegerMatrix) -> tuple[int, ...]:
    """Nonzero elementary divisors ``d1 | d2 | ...`` of ``mat``."""
    if mat.rows == 0:
        return ()
    work = mat
    while True:
        work = _nonzero_rows(hermite_normal_form(work))
        if work.rows == 0:
            return ()
        if all(x == 0 for i, r in enumerate(work) for j, x in enumerate(r) if i != j):
            break
        work = work.transpose()
    diag = [abs(work[i][i]) for i in range(min(work.shape))]
    for i in range(len(diag)):
        for j in range(i + 1, len(diag)):
            g = math.gcd(diag[i], diag[j])
            diag[i], diag[j] = g, diag[i] * diag[j] // g
    return tuple(diag)


def is_generating(A: IntegerMatrix) -> bool:
    """True iff the columns of ``A`` generate ``Z^m`` as an abelian group."""
    if A.rows == 0:
        return True
    inv = smith_invariants(A)
    return len(inv) == A.rows and all(d == 1 for d in inv)


def determinant(mat: IntegerMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = mat.rows
    if n != mat.cols:
        raise ShapeError(f"determinant of non-square {mat.shape} matrix")
    a = [list(r) for r in mat.entries]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(g: IntegerMatrix) -> bool:
    return g.rows == g.cols and abs(determinant(g)) == 1


def random_unimodular(n: int, seed: int) -> IntegerMatrix:
    """Seeded product of at most ``3n`` elementary row operations.

    Operations are row additions with coefficient in {-2, -1, 1, 2}, row
    swaps and row negations, so the result has determinant +-1.
    """
    if n < 1:
        raise ShapeError("random_unimodular needs n >= 1")
    rng = np.random.default_rng(seed)
    g = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(int(rng.integers(1, 3 * n + 1))):
        kind = int(rng.integers(3)) if n > 1 else 2
        if kind == 0:
            i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
            c = int(rng.choice([-2, -1, 1, 2]))
            g[i] = [a + c * b for a, b in zip(g[i], g[j])]
        elif kind == 1:
            i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
            g[i], g[j] = g[j], g[i]
        else:
            i = int(rng.integers(n))
            g[i] = [-a for a in g[i]]
    return IntegerMatrix(tuple(map(tuple, g)), n)
