"""Validated GKZ / GG problem data."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import LatticeError, RankMismatchError, ShapeError, ValidationError
from .lattice import (
    IntegerMatrix,
    check_orthogonality,
    hermite_normal_form,
    integer_kernel_basis,
    is_generating,
    is_unimodular,
)

__all__ = [
    "ArgumentVector",
    "GkzData",
    "SpectralVector",
    "build_gkz_data",
    "change_lattice_basis",
    "exponential_data",
    "gamma_data",
    "gauge_shift",
    "lattice_shift",
    "solve_spectral_affine",
]


@dataclass(frozen=True)
class GkzData:
    """Defining matrix ``A`` (m x N) with a Z-basis ``M`` of its relations.

    Construct through :func:`build_gkz_data`, which checks every invariant.
    """

    A: IntegerMatrix
    M: IntegerMatrix

    @property
    def N(self) -> int:
        return self.A.cols

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def lattice_rank(self) -> int:
        return self.M.rows

    @property
    def I(self) -> range:
        return range(self.N)

    @property
    def J(self) -> range:
        return range(self.lattice_rank)

    def in_lattice(self, l: Sequence[int]) -> bool:
        return len(l) == self.N and not any(self.A.apply(l))


@dataclass(frozen=True)
class SpectralVector:
    gamma: tuple[complex, ...]

    @classmethod
    def of(cls, values) -> "SpectralVector":
        if isinstance(values, SpectralVector):
            return values
        return cls(tuple(complex(v) for v in np.atleast_1d(values)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.gamma, dtype=complex)

    @property
    def convergent(self) -> bool:
        return all(g.real > 0 for g in self.gamma)

    def shifted(self, i: int, by: complex = 1) -> "SpectralVector":
        g = list(self.gamma)
        g[i] += by
        return SpectralVector(tuple(g))

    def __len__(self) -> int:
        return len(self.gamma)


@dataclass(frozen=True)
class ArgumentVector:
    """Positive arguments ``u``; ``y = log u`` is kept alongside."""

    u: tuple[float, ...]

    def __post_init__(self):
        if not all(np.isfinite(x) and x > 0 for x in self.u):
            raise ValidationError(f"arguments must be positive and finite, got {self.u}")

    @classmethod
    def of(cls, values) -> "ArgumentVector":
        if isinstance(values, ArgumentVector):
            return values
        return cls(tuple(float(v) for v in np.atleast_1d(values)))

    @classmethod
    def from_log(cls, y) -> "ArgumentVector":
        return cls(tuple(float(v) for v in np.exp(np.atleast_1d(np.asarray(y, dtype=float)))))

    @property
    def y(self) -> np.ndarray:
        return np.log(np.array(self.u, dtype=float))

    def __len__(self) -> int:
        return len(self.u)


def _same_lattice(M: IntegerMatrix, K: IntegerMatrix) -> bool:
    if M.rows != K.rows:
        return False
    if M.rows == 0:
        return True
    return hermite_normal_form(M) == hermite_normal_form(K)


def build_gkz_data(A: IntegerMatrix, lattice: IntegerMatrix | None = None) -> GkzData:
    """Validate ``A`` and attach a lattice basis (computed if not supplied)."""
    if A.rows and A.rank != A.rows:
        raise RankMismatchError(f"A has rank {A.rank} but {A.rows} rows")
    if A.rows > A.cols:
        raise RankMismatchError("A has more rows than columns")
    if not is_generating(A):
        raise ValidationError("columns of A do not generate Z^m")
    kernel = integer_kernel_basis(A)
    if lattice is None:
        return GkzData(A, kernel)
    if lattice.cols != A.cols:
        raise ShapeError(f"lattice has {lattice.cols} columns, A has {A.cols}")
    if not check_orthogonality(A, lattice):
        raise LatticeError("lattice rows are not relations of A")
    if lattice.rows != A.cols - A.rows or (lattice.rows and lattice.rank != lattice.rows):
        raise LatticeError(f"lattice must have {A.cols - A.rows} independent rows")
    if not _same_lattice(lattice, kernel):
        raise LatticeError("lattice rows do not generate the full relation lattice")
    return GkzData(A, lattice)


def gamma_data() -> GkzData:
    """N = m = 1: the Gamma function case."""
    return build_gkz_data(IntegerMatrix.from_rows([[1]]))


def exponential_data() -> GkzData:
    """N = 1, m = 0: the exponential case."""
    return build_gkz_data(IntegerMatrix.empty(1), IntegerMatrix.from_rows([[1]]))


def solve_spectral_affine(data: GkzData, c) -> tuple[SpectralVector, IntegerMatrix]:
    """Minimum-norm ``gamma0`` with ``c + A gamma0 = 0``, plus the lattice directions."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if c.shape != (data.m,):
        raise ShapeError(f"c must have length {data.m}")
    if data.m == 0:
        return SpectralVector(tuple([0j] * data.N)), data.M
    gamma0, *_ = np.linalg.lstsq(data.A.to_numpy(complex), -c, rcond=None)
    return SpectralVector(tuple(complex(g) for g in gamma0)), data.M


def lattice_shift(data: GkzData, xi: Sequence) -> list:
    """``M^T xi``; exact when ``xi`` holds ints or Fractions."""
    if len(xi) != data.lattice_rank:
        raise ShapeError(f"xi must have length {data.lattice_rank}")
    zero = Fraction(0) if all(isinstance(x, (int, Fraction)) for x in xi) else 0j
    return [sum((row[j] * x for row, x in zip(data.M, xi)), zero) for j in data.I]


def gauge_shift(gamma: SpectralVector, data: GkzData, xi: Sequence) -> SpectralVector:
    if len(gamma) != data.N:
        raise ShapeError(f"gamma must have length {data.N}")
    shift = lattice_shift(data, xi)
    return SpectralVector(tuple(g + complex(s) for g, s in zip(gamma.gamma, shift)))


def change_lattice_basis(data: GkzData, g: IntegerMatrix) -> GkzData:
    """Replace ``M`` by ``g @ M`` for a unimodular ``g``."""
    k = data.lattice_rank
    if g.shape != (k, k):
        raise ShapeError(f"transition matrix must be {k} x {k}")
    if not is_unimodular(g):
        raise LatticeError("transition matrix is not unimodular")
    return GkzData(data.A, g @ data.M)
