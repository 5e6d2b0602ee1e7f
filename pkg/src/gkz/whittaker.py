"""gl(l+1) Whittaker functions as GG integrals.

Two families are covered: the minimal-parabolic (standard) Whittaker
function, whose GKZ data come from the type A Gelfand-Zetlin graph with
``l(l+1)`` edge variables, and the restricted maximal-parabolic one, a
single-delta integral over ``l+1`` variables.  :func:`bessel_k_oracle` is an
independent quadrature for ``K_nu`` used to check the rank-one cases.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ChamberError, ShapeError, ValidationError
from .integral import QuadratureConfig, evaluate_gg
from .lattice import IntegerMatrix, check_orthogonality
from .model import GkzData, build_gkz_data

__all__ = [
    "GzGraphData",
    "RestrictedArguments",
    "WhittakerSpectrum",
    "bessel_k_oracle",
    "build_extended_data",
    "build_gz_data",
    "build_max_parabolic_data",
    "eval_max_parabolic_gg",
    "eval_whittaker_max",
    "eval_whittaker_min",
    "restrict_arguments",
    "whittaker_spectrum",
]


def _gz_pairs(ell: int) -> tuple[tuple[int, int], ...]:
    return tuple((k, i) for k in range(1, ell + 1) for i in range(1, k + 1))


@dataclass(frozen=True)
class GzGraphData:
    """Gelfand-Zetlin GKZ data; coordinates are all ``a_{k,i}`` then all ``b_{k,i}``."""

    ell: int
    pairs: tuple[tuple[int, int], ...]
    data: GkzData

    @property
    def d(self) -> int:
        return len(self.pairs)

    def a(self, k: int, i: int) -> int:
        return self.pairs.index((k, i))

    def b(self, k: int, i: int) -> int:
        return self.d + self.pairs.index((k, i))

    def pivot_order(self) -> list[int]:
        """Pin the zero-exponent ``b_{k,i}`` (i < k) first, then index order."""
        first = [self.b(k, i) for k, i in self.pairs if i < k]
        return first + [c for c in range(2 * self.d) if c not in first]


def build_gz_data(ell: int) -> GzGraphData:
    if ell < 1:
        raise ValidationError("rank must be at least 1")
    pairs = _gz_pairs(ell)
    d = len(pairs)
    pos = {p: n for n, p in enumerate(pairs)}

    def e(k, i):
        return pos.get((k, i))

    def et(k, i):
        return d + pos[(k, i)] if (k, i) in pos else None

    lattice = []
    for k, i in pairs:
        row = [0] * (2 * d)
        row[e(k, i)] += 1
        row[et(k, i)] += 1
        if k < ell:
            row[e(k + 1, i + 1)] -= 1
            row[et(k + 1, i)] -= 1
        lattice.append(row)

    A = []
    for k, i in pairs:
        row = [0] * (2 * d)
        for j in range(1, i):
            row[e(k - j, i - j)] += 1
        for j in range(i, k + 1):
            row[e(k, j)] += 1
            row[et(k, j)] -= 1
        A.append(row)

    data = build_gkz_data(IntegerMatrix.from_rows(A), IntegerMatrix.from_rows(lattice))
    return GzGraphData(ell, pairs, data)


@dataclass(frozen=True)
class WhittakerSpectrum:
    lam: tuple[complex, ...]
    gamma: tuple[complex, ...]  # exponents of the a_{k,i}
    nu: tuple[complex, ...]  # exponents of the b_{k,i}

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.gamma + self.nu, dtype=complex)


def whittaker_spectrum(ell: int, lam: Sequence[complex]) -> WhittakerSpectrum:
    lam = tuple(complex(v) for v in lam)
    if len(lam) != ell + 1:
        raise ShapeError(f"lambda must have length {ell + 1}")
    pairs = _gz_pairs(ell)
    gamma = tuple(lam[k] for k, _ in pairs)
    nu = tuple(sum(lam[:k]) if i == k else 0j for k, i in pairs)
    return WhittakerSpectrum(lam, gamma, nu)


@dataclass(frozen=True)
class RestrictedArguments:
    """Canonical point ``(y, z)`` on the restriction subspace for given ``x``."""

    ell: int
    x: tuple[float, ...]
    y: tuple[float, ...]
    z: tuple[float, ...]

    @property
    def log_u(self) -> np.ndarray:
        return np.array(self.y + self.z)

    def R(self) -> list[float]:
        d = {p: n for n, p in enumerate(_gz_pairs(self.ell))}
        return [self.y[d[(self.ell, i)]] + self.z[d[(self.ell, i)]] for i in range(1, self.ell + 1)]

    def B(self) -> dict[tuple[int, int], float]:
        d = {p: n for n, p in enumerate(_gz_pairs(self.ell))}
        return {
            (k, i): self.y[d[(k, i)]] + self.z[d[(k, i)]] - self.y[d[(k + 1, i + 1)]] - self.z[d[(k + 1, i)]]
            for k, i in d
            if k < self.ell
        }


def restrict_arguments(ell: int, x: Sequence[float]) -> RestrictedArguments:
    x = tuple(float(v) for v in x)
    if len(x) != ell + 1:
        raise ShapeError(f"x must have length {ell + 1}")
    pairs = _gz_pairs(ell)
    y = {(ell, i): x[i - 1] - x[i] for i in range(1, ell + 1)}
    for k in range(ell - 1, 0, -1):
        for i in range(1, k + 1):
            y[(k, i)] = y[(k + 1, i + 1)]
    args = RestrictedArguments(ell, x, tuple(y[p] for p in pairs), tuple(0.0 for _ in pairs))
    R = args.R()
    assert all(abs(R[i] - (x[i] - x[i + 1])) <= 1e-12 * (1 + abs(x[i]) + abs(x[i + 1])) for i in range(ell))
    assert all(abs(v) <= 1e-12 * (1 + max(map(abs, x))) for v in args.B().values())
    return args


def _require_chamber(lam: Sequence[complex]) -> None:
    if any(complex(v).real <= 0 for v in lam):
        raise ChamberError("Whittaker integrals need Re(lambda_i) > 0")


def eval_whittaker_min(
    ell: int,
    lam: Sequence[complex],
    x: Sequence[float],
    cfg: QuadratureConfig | None = None,
    *,
    log_u: Sequence[float] | None = None,
    gz: GzGraphData | None = None,
    with_error: bool = False,
) -> complex | tuple[complex, float]:
    """Minimal-parabolic Whittaker function at ``e^x``.

    ``log_u`` overrides the canonical ``(y, z)`` representative; it must lie
    on the restriction subspace for ``x``.  With ``with_error`` the
    quadrature error estimate (scaled like the value) is returned as well.
    """
    _require_chamber(lam)
    gz = gz or build_gz_data(ell)
    spectrum = whittaker_spectrum(ell, lam)
    if log_u is None:
        log_u = restrict_arguments(ell, x).log_u
    if len(x) != ell + 1:
        raise ShapeError(f"x must have length {ell + 1}")
    phi, err = evaluate_gg(
        gz.data, spectrum.vector, np.exp(np.asarray(log_u, dtype=float)), cfg,
        pivot_order=gz.pivot_order(), allow_boundary_pinned=True,
    )
    factor = cmath.exp(sum(spectrum.lam) * float(x[-1]))
    value = complex(factor * phi)
    return (value, float(abs(factor) * err)) if with_error else value


def build_extended_data(ell: int) -> GkzData:
    """GZ data with one extra variable pinned by its own delta.

    ``M`` gains the row ``(0, ..., 0, 1)``; ``A`` gains a zero column.  The
    zero row of the block-diagonal defining matrix is dropped so that ``A``
    keeps full row rank.
    """
    base = build_gz_data(ell).data
    N = base.N
    M = [list(r) + [0] for r in base.M] + [[0] * N + [1]]
    A = [list(r) + [0] for r in base.A]
    ext = build_gkz_data(IntegerMatrix.from_rows(A), IntegerMatrix.from_rows(M))
    assert check_orthogonality(ext.A, ext.M)
    return ext


def build_max_parabolic_data(ell: int) -> GkzData:
    if ell < 1:
        raise ValidationError("rank must be at least 1")
    n = ell + 1
    A = [[(j == r) - (j == r + 1) for j in range(n)] for r in range(ell)]
    return build_gkz_data(IntegerMatrix.from_rows(A), IntegerMatrix.from_rows([[1] * n]))


def eval_max_parabolic_gg(
    ell: int, lam: Sequence[complex], y: Sequence[float], cfg: QuadratureConfig | None = None
) -> tuple[complex, float]:
    """Maximal-parabolic GG function at ``u = e^y`` (depends on ``sum(y)`` only)."""
    _require_chamber(lam)
    if len(lam) != ell + 1 or len(y) != ell + 1:
        raise ShapeError(f"lambda and y must have length {ell + 1}")
    data = build_max_parabolic_data(ell)
    return evaluate_gg(data, lam, np.exp(np.asarray(y, dtype=float)), cfg)


def eval_whittaker_max(
    ell: int, lam: Sequence[complex], x: float, cfg: QuadratureConfig | None = None, *, with_error: bool = False
) -> complex | tuple[complex, float]:
    """Restricted maximal-parabolic Whittaker function at ``e^x``."""
    y = [float(x)] + [0.0] * ell
    value, err = eval_max_parabolic_gg(ell, lam, y, cfg)
    return (value, err) if with_error else value


def bessel_k_oracle(nu: complex, z: float) -> complex | float:
    """``K_nu(z) = 1/2 int ds exp(nu s - z cosh s)`` by self-refining trapezoid.

    Independent of the GG machinery: its own mode, box and step control.
    """
    if not z > 0:
        raise ValidationError("bessel_k_oracle needs z > 0")
    nu = complex(nu)
    nr = nu.real
    s0 = math.asinh(nr / z)
    peak = nr * s0 - z * math.cosh(s0)

    def drop(s):
        return nr * s - z * math.cosh(s) - peak

    lo = hi = 1.0
    while drop(s0 - lo) > -50.0:
        lo *= 1.5
    while drop(s0 + hi) > -50.0:
        hi *= 1.5
    h = 0.25
    prev = None
    for _ in range(12):
        s = np.arange(s0 - lo, s0 + hi + h / 2, h)
        vals = np.exp(nr * s - z * np.cosh(s) - peak)
        if nu.imag:
            vals = vals * np.exp(1j * nu.imag * s)
        total = 0.5 * h * vals.sum() * math.exp(peak)
        if prev is not None and abs(total - prev) <= 1e-15 * abs(total):
            break
        prev = total
        h /= 2
    return float(total.real) if not nu.imag else complex(total)
