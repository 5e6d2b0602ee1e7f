"""Numerical evaluation of the GG integral and the GKZ solution.

In logarithmic coordinates ``T_i = log t_i`` the GG integrand is
``exp(gamma . T - sum_i exp(T_i))`` restricted to the affine subspace
``M (T - y) = 0`` with ``y = log u``.  The delta constraints are eliminated
exactly: ``N - m`` pivot coordinates are solved for in terms of the ``m``
free ones, leaving an ``m``-dimensional integral whose log-integrand is
strictly concave.  That integral is done with a tensor trapezoid rule in
coordinates centred at the Laplace mode and scaled by the Hessian there.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ChamberError, DivergenceError, NumericDomainError, ShapeError, ValidationError
from .lattice import IntegerMatrix, determinant, rref
from .model import ArgumentVector, GkzData, SpectralVector

__all__ = [
    "QuadratureConfig",
    "ReducedIntegral",
    "choose_pivots",
    "evaluate_gg",
    "evaluate_gkz",
    "find_laplace_mode",
    "integrate_log_affine",
    "pivot_sets",
    "resolve_deltas",
]

_CHUNK_ELEMENTS = 1 << 20


@dataclass(frozen=True)
class QuadratureConfig:
    points_per_dim: int = 96
    tail_tolerance: float = 1e-14
    max_halfwidth: float = 60.0
    refinement: int = 1

    def __post_init__(self):
        if self.points_per_dim < 2:
            raise ValidationError("points_per_dim must be at least 2")
        if not 0 < self.tail_tolerance < 1:
            raise ValidationError("tail_tolerance must lie in (0, 1)")
        if not self.max_halfwidth > 0:
            raise ValidationError("max_halfwidth must be positive")
        if self.refinement < 1:
            raise ValidationError("refinement must be at least 1")

    @property
    def fine_points(self) -> int:
        return (self.points_per_dim - 1) * 2**self.refinement + 1


@dataclass(frozen=True)
class ReducedIntegral:
    """Delta constraints solved for the pivot log-coordinates.

    ``T = slope @ s + y_map @ y`` where ``s`` are the free coordinates.
    ``slope`` and ``y_map`` are exact rational matrices; ``offset`` is the
    floating value ``y_map @ y``.
    """

    lattice: IntegerMatrix
    pivot_set: tuple[int, ...]
    free_set: tuple[int, ...]
    slope: tuple[tuple[Fraction, ...], ...]
    y_map: tuple[tuple[Fraction, ...], ...]
    y: tuple[float, ...]
    jacobian_factor: Fraction
    offset: np.ndarray = field(repr=False, compare=False)

    @property
    def N(self) -> int:
        return len(self.y)

    @property
    def dim(self) -> int:
        return len(self.free_set)

    @property
    def slope_array(self) -> np.ndarray:
        return np.array(self.slope, dtype=float).reshape(self.N, self.dim)

    def T(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        return self.slope_array @ s + self.offset if self.dim else self.offset.copy()

    def check_exact(self) -> bool:
        """Substituting the map into every constraint gives zero identically."""
        M = self.lattice
        for row in M:
            for col in range(self.dim):
                if sum(row[i] * self.slope[i][col] for i in range(self.N)) != 0:
                    return False
            for col in range(self.N):
                # constraint is M (T - y), so y_map - identity must be annihilated
                if sum(row[i] * (self.y_map[i][col] - (i == col)) for i in range(self.N)) != 0:
                    return False
        return self.jacobian_factor > 0


def pivot_sets(M: IntegerMatrix) -> list[tuple[int, ...]]:
    """All column subsets of size ``rows(M)`` with a nonsingular block."""
    k = M.rows
    out = []
    for cols in itertools.combinations(range(M.cols), k):
        block = IntegerMatrix(tuple(tuple(r[c] for c in cols) for r in M), k) if k else None
        if k == 0 or determinant(block) != 0:
            out.append(cols)
    return out


def choose_pivots(M: IntegerMatrix, order: Sequence[int] | None = None) -> tuple[int, ...]:
    """First independent columns of ``M`` scanning in ``order`` (default: index order)."""
    if M.rows == 0:
        return ()
    order = list(range(M.cols)) if order is None else list(order)
    if sorted(order) != list(range(M.cols)):
        raise ValidationError("pivot order must be a permutation of the columns")
    permuted = [[r[c] for c in order] for r in M]
    _, piv = rref(permuted, M.cols)
    if len(piv) != M.rows:
        raise NumericDomainError("lattice basis is rank deficient: no pivot block")
    return tuple(sorted(order[p] for p in piv))


def _solve_exact(block: list[list[Fraction]], rhs: list[list[Fraction]]) -> list[list[Fraction]]:
    k = len(block)
    aug = [list(block[i]) + list(rhs[i]) for i in range(k)]
    red, piv = rref(aug, k)
    if piv != list(range(k)):
        raise NumericDomainError("singular pivot block")
    return [row[k:] for row in red]


def resolve_deltas(
    data: GkzData,
    y,
    pivots: Sequence[int] | None = None,
    order: Sequence[int] | None = None,
) -> ReducedIntegral:
    """Eliminate ``M (T - y) = 0`` for the pivot coordinates."""
    y = np.asarray(y, dtype=float).reshape(-1)
    N, M = data.N, data.M
    if y.shape != (N,):
        raise ShapeError(f"y must have length {N}")
    if pivots is None:
        pivots = choose_pivots(M, order)
    pivots = tuple(sorted(pivots))
    k = M.rows
    if len(pivots) != k or len(set(pivots)) != k or any(not 0 <= p < N for p in pivots):
        raise ValidationError(f"need {k} distinct pivot columns, got {pivots}")
    free = tuple(i for i in range(N) if i not in pivots)
    one, zero = Fraction(1), Fraction(0)

    slope = [[zero] * len(free) for _ in range(N)]
    y_map = [[zero] * N for _ in range(N)]
    for b, f in enumerate(free):
        slope[f][b] = one
    if k:
        block_int = IntegerMatrix(tuple(tuple(r[p] for p in pivots) for r in M), k)
        det = determinant(block_int)
        if det == 0:
            raise ValidationError(f"pivot columns {pivots} give a singular block")
        block = [[Fraction(r[p]) for p in pivots] for r in M]
        rhs = [[Fraction(r[f]) for f in free] for r in M]
        Q = _solve_exact(block, rhs) if free else [[] for _ in range(k)]
        # T_P = y_P - Q (s - y_F)
        for a, p in enumerate(pivots):
            y_map[p][p] = one
            for b, f in enumerate(free):
                slope[p][b] = -Q[a][b]
                y_map[p][f] = Q[a][b]
        jac = Fraction(1, abs(det))
    else:
        jac = one
    y_map_t = tuple(map(tuple, y_map))
    offset = np.array(y_map, dtype=float) @ y
    return ReducedIntegral(
        lattice=M,
        pivot_set=pivots,
        free_set=free,
        slope=tuple(map(tuple, slope)),
        y_map=y_map_t,
        y=tuple(float(v) for v in y),
        jacobian_factor=jac,
        offset=offset,
    )


def _check_chamber(gamma: np.ndarray, reduced: ReducedIntegral, allow_boundary_pinned: bool) -> None:
    re = gamma.real
    if allow_boundary_pinned:
        bad = [i for i in reduced.free_set if re[i] <= 0] + [i for i in reduced.pivot_set if re[i] < 0]
    else:
        bad = [i for i in range(len(re)) if re[i] <= 0]
    if bad:
        raise ChamberError(f"Re(gamma) outside the convergence chamber at indices {bad}")


def _mode(S: np.ndarray, t0: np.ndarray, kr: np.ndarray, tol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """Damped Newton maximisation of ``kr . (S s + t0) - sum exp(S s + t0)``."""
    m = S.shape[1]

    def value(s):
        E = S @ s + t0
        with np.errstate(over="ignore"):
            v = kr @ E - np.exp(E).sum()
        return v if np.isfinite(v) else -np.inf

    # start where each exponential balances its own linear term
    target = np.log(np.maximum(kr, 1e-3)) - t0
    s = np.linalg.lstsq(S, target, rcond=None)[0]
    f = value(s)
    scale = max(1.0, float(np.linalg.norm(S.T @ kr)))
    for _ in range(max_iter):
        E = np.exp(S @ s + t0)
        grad = S.T @ (kr - E)
        if np.linalg.norm(grad) <= tol * scale:
            return s
        hess = (S * E[:, None]).T @ S
        step = np.linalg.solve(hess, grad)
        t = 1.0
        while t > 1e-12:
            cand = s + t * step
            fc = value(cand)
            if fc >= f:
                break
            t *= 0.5
        else:
            raise NumericDomainError("Laplace mode search stalled")
        if fc == f and t < 1.0:
            return s
        s, f = cand, fc
    raise NumericDomainError("Laplace mode search did not converge")


def find_laplace_mode(reduced: ReducedIntegral, gamma: SpectralVector, *, allow_boundary_pinned: bool = False) -> np.ndarray:
    """Maximiser of ``Re(gamma) . T(s) - sum exp(T_i(s))`` over the free coordinates."""
    g = SpectralVector.of(gamma).array
    _check_chamber(g, reduced, allow_boundary_pinned)
    if reduced.dim == 0:
        return np.zeros(0)
    return _mode(reduced.slope_array, reduced.offset, g.real)


def _axis_extent(phi, direction: np.ndarray, K: float, limit: float) -> float:
    """Distance along ``direction`` where the concave ``phi`` first drops by ``K``.

    Returns ``inf`` if that does not happen within ``limit`` (in units of
    ``direction``).
    """
    t = 1.0
    while phi(t * direction) > -K:
        if t >= limit:
            return math.inf
        t = min(2.0 * t, limit)
    lo, hi = t / 2.0, t
    for _ in range(30):
        mid = 0.5 * (lo + hi)
        if phi(mid * direction) > -K:
            lo = mid
        else:
            hi = mid
    return hi


def integrate_log_affine(
    S: np.ndarray,
    t0: np.ndarray,
    kappa: np.ndarray,
    log_weights: np.ndarray,
    cfg: QuadratureConfig,
) -> tuple[complex, float]:
    """``int ds exp(kappa . T(s) - sum_i exp(T_i(s) + log_weights_i))`` with ``T = S s + t0``.

    The log-integrand must be strictly concave in its real part (``S`` of
    full column rank, a positive ``Re kappa`` on directions where no
    exponential grows).  Returns the value and ``|I_fine - I_coarse|``.
    """
    kappa = np.asarray(kappa, dtype=complex)
    kr, ki = kappa.real, kappa.imag
    E0 = t0 + log_weights
    m = S.shape[1]
    if m == 0:
        with np.errstate(over="ignore"):
            log_val = kappa @ t0 - np.exp(E0).sum()
        return complex(np.exp(log_val)), 0.0

    s_star = _mode(S, E0, kr)
    E_star = S @ s_star + E0
    eE = np.exp(E_star)
    hess = (S * eE[:, None]).T @ S
    L = np.linalg.cholesky(hess)
    W = np.linalg.inv(L.T)  # s = s_star + W w makes the Hessian the identity
    B = S @ W
    beta = B.T @ kr
    alpha = B.T @ ki

    def rel_log(w: np.ndarray) -> float:
        with np.errstate(over="ignore"):
            return float(beta @ w - (eE * np.expm1(B @ w)).sum())

    K = -math.log(cfg.tail_tolerance)
    col_norm = np.abs(W).max(axis=0)
    lo = np.empty(m)
    hi = np.empty(m)
    clamped = False
    for j in range(m):
        limit = cfg.max_halfwidth / col_norm[j]
        for side, arr in ((-1.0, lo), (1.0, hi)):
            d = np.zeros(m)
            d[j] = side
            ext = _axis_extent(rel_log, d, K, limit)
            if not math.isfinite(ext):
                # decayed far enough that the truncated tail is negligible
                if rel_log(limit * d) > -0.5 * K:
                    raise DivergenceError("integrand does not decay within max_halfwidth")
                ext, clamped = limit, True
            arr[j] = ext

    n = cfg.fine_points
    for _ in range(12):
        nodes = [np.linspace(-lo[j], hi[j], n) for j in range(m)]
        fine, coarse, face_max = _grid_sums(nodes, B, eE, beta, alpha)
        grow = False
        for j in range(m):
            limit = cfg.max_halfwidth / col_norm[j]
            for side, arr in ((0, lo), (1, hi)):
                if face_max[j][side] > -K and arr[j] < limit:
                    arr[j] = min(1.5 * arr[j], limit)
                    grow = True
                elif face_max[j][side] > -0.5 * K:
                    raise DivergenceError("integrand does not decay within max_halfwidth")
        if not grow:
            break
    else:
        raise DivergenceError("quadrature box did not stabilise")

    h = np.array([(hi[j] + lo[j]) / (n - 1) for j in range(m)])
    # log-integrand at the mode; the grid sums are relative to it
    log_prefactor = kappa @ (E_star - log_weights) - eE.sum()
    scale = np.exp(log_prefactor) * abs(np.linalg.det(W)) * np.prod(h)
    value = complex(scale * fine)
    err = float(abs(scale) * abs(fine - (2**m) * coarse))
    return value, err


def _grid_sums(nodes, B, eE, beta, alpha):
    """Fine and every-other-point sums of exp(relative log-integrand) times phases.

    Exponentials separate over axes, so ``exp(B w)`` is assembled as an
    outer product of per-axis factors and only one ``exp`` per grid point is
    needed for the final integrand.
    """
    m = len(nodes)
    n = len(nodes[0])
    N = len(eE)
    factors = [[np.exp(B[i, j] * nodes[j]) for j in range(m)] for i in range(N)]
    lin = [beta[j] * nodes[j] for j in range(m)]
    phases = [np.exp(1j * alpha[j] * nodes[j]) if alpha[j] != 0 else None for j in range(m)]
    complex_case = any(p is not None for p in phases)

    def shaped(vec, axis):
        shape = [1] * m
        shape[axis] = -1
        return vec.reshape(shape)

    rest = n ** (m - 1)
    chunk = max(1, _CHUNK_ELEMENTS // rest)
    fine_total = 0j
    coarse_total = 0j
    face_max = [[-math.inf, -math.inf] for _ in range(m)]
    for a in range(0, n, chunk):
        b = min(n, a + chunk)
        r = lin[0][a:b].reshape([-1] + [1] * (m - 1)).copy()
        for j in range(1, m):
            r = r + shaped(lin[j], j)
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(N):
                prod = factors[i][0][a:b].reshape([-1] + [1] * (m - 1))
                for j in range(1, m):
                    prod = prod * shaped(factors[i][j], j)
                r = r - eE[i] * (prod - 1.0)
        r = np.where(np.isnan(r), -np.inf, r)
        if a == 0:
            face_max[0][0] = float(r[0].max())
        if b == n:
            face_max[0][1] = float(r[-1].max())
        for j in range(1, m):
            face_max[j][0] = max(face_max[j][0], float(np.take(r, 0, axis=j).max()))
            face_max[j][1] = max(face_max[j][1], float(np.take(r, -1, axis=j).max()))
        vals = np.exp(r)
        even = slice((a % 2), None, 2)
        if complex_case:
            f = vals.astype(complex)
            c = vals[even][(slice(None),) + (slice(None, None, 2),) * (m - 1)].astype(complex)
            for j in range(m - 1, 0, -1):
                p = phases[j] if phases[j] is not None else np.ones(n)
                f = f @ p
                c = c @ p[::2]
            p0 = phases[0] if phases[0] is not None else np.ones(n)
            fine_total += f @ p0[a:b]
            c0 = p0[a:b][even]
            coarse_total += c @ c0
        else:
            fine_total += vals.sum()
            coarse_total += vals[even][(slice(None),) + (slice(None, None, 2),) * (m - 1)].sum()
    return fine_total, coarse_total, face_max


def _as_inputs(data: GkzData, gamma, u):
    gamma = SpectralVector.of(gamma)
    u = ArgumentVector.of(u)
    if len(gamma) != data.N or len(u) != data.N:
        raise ShapeError(f"gamma and u must have length {data.N}")
    return gamma, u


def evaluate_gg(
    data: GkzData,
    gamma,
    u,
    cfg: QuadratureConfig | None = None,
    *,
    pivots: Sequence[int] | None = None,
    pivot_order: Sequence[int] | None = None,
    allow_boundary_pinned: bool = False,
) -> tuple[complex, float]:
    """GG function ``Phi_gamma(u)`` and an error estimate from one grid doubling.

    ``allow_boundary_pinned`` accepts ``Re gamma_i = 0`` on pivot
    (delta-pinned) coordinates, where the integral still converges.
    """
    cfg = cfg or QuadratureConfig()
    gamma, u = _as_inputs(data, gamma, u)
    reduced = resolve_deltas(data, u.y, pivots=pivots, order=pivot_order)
    g = gamma.array
    _check_chamber(g, reduced, allow_boundary_pinned)
    S = reduced.slope_array
    value, err = integrate_log_affine(S, reduced.offset, g, np.zeros(data.N), cfg)
    jac = float(reduced.jacobian_factor)
    return value * jac, err * jac


def evaluate_gkz(data: GkzData, gamma, u, cfg: QuadratureConfig | None = None, **kw) -> complex:
    """GKZ solution ``f_gamma(u) = prod(u_i^-gamma_i) Phi_gamma(u)``."""
    gamma, u = _as_inputs(data, gamma, u)
    phi, _ = evaluate_gg(data, gamma, u, cfg, **kw)
    return complex(np.exp(-gamma.array @ u.y) * phi)
