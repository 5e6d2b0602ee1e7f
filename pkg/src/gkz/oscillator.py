"""Exact oscillator-algebra computations in the Weyl algebra.

Elements of the Weyl algebra in ``t_1..t_N`` and ``d_1..d_N`` are kept in
normal order (all ``t`` left of all ``d``) with exact coefficients: Python
ints, :class:`fractions.Fraction`, or polynomials over QQ in formal symbols
``gamma1..gammaN`` (sympy ``PolyElement``).  Equality is equality of the
coefficient maps, so an identity is certified by an exact zero.

The second half of the module pairs the left covector with test functions
``scale * prod t_i^p_i exp(-q_i t_i)`` through the same delta elimination
and quadrature primitives as :mod:`gkz.integral`.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral, Rational
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np
import sympy
from sympy.polys.rings import PolyElement, ring

from .errors import ShapeError, ValidationError
from .integral import QuadratureConfig, _check_chamber, integrate_log_affine, resolve_deltas
from .model import GkzData, SpectralVector

__all__ = [
    "Generator",
    "TestFunction",
    "WeylElement",
    "casimir_image",
    "casimir_parts",
    "commutator",
    "euler_identity_check",
    "exact_gamma",
    "formal_gamma",
    "lie_relations_hold",
    "matrix_element",
    "pairing_antisymmetry_residual",
    "phiL_pairing",
    "phiL_relation_residual",
    "phiL_torus_residual",
    "represent",
    "represent_dual",
    "verify_annihilation",
    "weyl_product",
]

Monomial = tuple[tuple[int, ...], tuple[int, ...]]


def _exact(c):
    """Normalise a scalar coefficient; floats are rejected."""
    if isinstance(c, PolyElement):
        return c
    if isinstance(c, bool):
        return int(c)
    if isinstance(c, Integral):
        return int(c)
    if isinstance(c, Rational):
        return Fraction(c.numerator, c.denominator)
    if isinstance(c, sympy.Rational):
        return Fraction(int(c.p), int(c.q))
    raise ValidationError(f"coefficient {c!r} is not exact")


class WeylElement:
    """Normal-ordered element ``sum c * t^a d^b``; immutable."""

    __slots__ = ("_N", "_terms")

    def __init__(self, N: int, terms: Mapping[Monomial, object] | None = None):
        if N < 1:
            raise ShapeError("a Weyl element needs N >= 1")
        clean: dict[Monomial, object] = {}
        for key, c in (terms or {}).items():
            a, b = (tuple(int(v) for v in part) for part in key)
            if len(a) != N or len(b) != N or min(a + b) < 0:
                raise ShapeError(f"bad monomial {key} for N = {N}")
            c = _exact(c)
            total = clean.get((a, b), 0) + c
            if total:
                clean[(a, b)] = total
            else:
                clean.pop((a, b), None)
        self._N = N
        self._terms = clean

    @classmethod
    def _raw(cls, N: int, terms: dict) -> "WeylElement":
        obj = object.__new__(cls)
        obj._N = N
        obj._terms = terms
        return obj

    # constructors
    @classmethod
    def zero(cls, N: int) -> "WeylElement":
        return cls(N)

    @classmethod
    def scalar(cls, N: int, c) -> "WeylElement":
        z = (0,) * N
        return cls(N, {(z, z): c})

    @classmethod
    def t(cls, N: int, i: int, power: int = 1) -> "WeylElement":
        return cls(N, {(_unit(N, i, power), (0,) * N): 1})

    @classmethod
    def d(cls, N: int, i: int, power: int = 1) -> "WeylElement":
        return cls(N, {((0,) * N, _unit(N, i, power)): 1})

    @property
    def N(self) -> int:
        return self._N

    @property
    def terms(self) -> Mapping[Monomial, object]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(a) + sum(b) for a, b in self._terms), default=0)

    def coefficient(self, a: Sequence[int], b: Sequence[int]):
        return self._terms.get((tuple(a), tuple(b)), 0)

    # arithmetic
    def _coerce(self, other) -> "WeylElement":
        if isinstance(other, WeylElement):
            if other._N != self._N:
                raise ShapeError(f"dimension mismatch: {self._N} vs {other._N}")
            return other
        return WeylElement.scalar(self._N, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            v = out.get(k, 0) + c
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return WeylElement._raw(self._N, out)

    __radd__ = __add__

    def __neg__(self):
        return WeylElement._raw(self._N, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, WeylElement):
            return weyl_product(self, other)
        c = _exact(other)
        if not c:
            return WeylElement.zero(self._N)
        return WeylElement._raw(self._N, {k: v * c for k, v in self._terms.items() if v * c})

    def __rmul__(self, other):
        return self * other  # scalars commute with everything

    def __pow__(self, n: int):
        if not isinstance(n, Integral) or n < 0:
            raise ValidationError("only non-negative integer powers")
        out = WeylElement.scalar(self._N, 1)
        for _ in range(int(n)):
            out = weyl_product(out, self)
        return out

    def __eq__(self, other):
        if isinstance(other, WeylElement):
            return self._N == other._N and self._terms == other._terms
        try:
            return self == WeylElement.scalar(self._N, other)
        except (ValidationError, ShapeError):
            return NotImplemented

    def __hash__(self):
        return hash((self._N, frozenset((k, str(v)) for k, v in self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (a, b), c in sorted(self._terms.items()):
            mono = [f"t{i + 1}^{e}" if e > 1 else f"t{i + 1}" for i, e in enumerate(a) if e]
            mono += [f"d{i + 1}^{e}" if e > 1 else f"d{i + 1}" for i, e in enumerate(b) if e]
            parts.append("*".join([f"({c})"] + mono) if mono else f"({c})")
        return " + ".join(parts)

    def apply(self, expr, symbols: Sequence[sympy.Symbol]):
        """Act on a sympy expression in ``symbols`` (``t`` multiplies, ``d`` differentiates)."""
        if len(symbols) != self._N:
            raise ShapeError(f"need {self._N} symbols")
        total = sympy.Integer(0)
        for (a, b), c in self._terms.items():
            term = expr
            for s, e in zip(symbols, b):
                if e:
                    term = sympy.diff(term, s, e)
            mono = sympy.Mul(*[s**e for s, e in zip(symbols, a)])
            total += _to_sympy(c) * mono * term
        return sympy.expand(total)


def _to_sympy(c):
    if isinstance(c, PolyElement):
        return c.as_expr()
    if isinstance(c, Fraction):
        return sympy.Rational(c.numerator, c.denominator)
    return sympy.Integer(c)


def _unit(N: int, i: int, power: int = 1) -> tuple[int, ...]:
    if not 0 <= i < N:
        raise ShapeError(f"index {i} out of range for N = {N}")
    return tuple(power if j == i else 0 for j in range(N))


@lru_cache(maxsize=None)
def _reorder_1d(b: int, c: int) -> tuple[tuple[int, int], ...]:
    """``d^b t^c = sum_k C(b,k) c!/(c-k)! t^(c-k) d^(b-k)``: pairs ``(k, factor)``."""
    return tuple((k, math.comb(b, k) * math.perm(c, k)) for k in range(min(b, c) + 1))


@lru_cache(maxsize=1 << 16)
def _monomial_product(a, b, c, d) -> tuple[tuple[Monomial, int], ...]:
    """Normal-ordered ``(t^a d^b)(t^c d^d)`` as ``((a', b'), integer factor)`` pairs."""
    options = [_reorder_1d(bi, ci) for bi, ci in zip(b, c)]
    out = []
    for choice in itertools.product(*options):
        factor = 1
        for _, f in choice:
            factor *= f
        ks = [k for k, _ in choice]
        na = tuple(ai + ci - k for ai, ci, k in zip(a, c, ks))
        nb = tuple(bi + di - k for bi, di, k in zip(b, d, ks))
        out.append(((na, nb), factor))
    return tuple(out)


def weyl_product(x: WeylElement, y: WeylElement) -> WeylElement:
    """Product ``x y`` rewritten to normal order with ``[d_i, t_j] = delta_ij``."""
    if x.N != y.N:
        raise ShapeError(f"dimension mismatch: {x.N} vs {y.N}")
    out: dict = {}
    for (a, b), c1 in x._terms.items():
        for (c, d), c2 in y._terms.items():
            coeff = c1 * c2
            for key, f in _monomial_product(a, b, c, d):
                v = out.get(key, 0) + coeff * f
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
    return WeylElement._raw(x.N, out)


def commutator(x: WeylElement, y: WeylElement) -> WeylElement:
    return weyl_product(x, y) - weyl_product(y, x)


# ---------------------------------------------------------------- generators

@dataclass(frozen=True)
class Generator:
    kind: str
    index: int | None = None

    def __post_init__(self):
        if self.kind not in ("E", "F", "H", "C"):
            raise ValidationError(f"unknown generator kind {self.kind!r}")
        if self.kind == "C":
            if self.index is not None:
                raise ValidationError("the central generator takes no index")
        elif not isinstance(self.index, Integral) or self.index < 0:
            raise ValidationError(f"generator {self.kind} needs a non-negative index")


@lru_cache(maxsize=None)
def _formal_ring(N: int):
    return ring([f"gamma{i + 1}" for i in range(N)], sympy.QQ)


def formal_gamma(N: int) -> tuple[PolyElement, ...]:
    """Formal symbols ``gamma1..gammaN`` as polynomials over QQ."""
    if N < 1:
        raise ShapeError("N must be at least 1")
    return tuple(_formal_ring(N)[1:])


def exact_gamma(values: Sequence) -> tuple:
    """Exact spectral vector from ints, Fractions, rational strings or formal symbols."""
    out = []
    for v in values:
        if isinstance(v, str):
            try:
                v = Fraction(v)
            except ValueError as exc:
                raise ValidationError(f"cannot parse {v!r} as a rational") from exc
        out.append(_exact(v))
    if not out:
        raise ShapeError("empty spectral vector")
    return tuple(out)


def _rep(g: Generator, gamma: tuple, dual: bool) -> WeylElement:
    N = len(gamma)
    if g.kind == "C":
        return WeylElement.scalar(N, -1 if dual else 1)
    i = g.index
    if i >= N:
        raise ShapeError(f"generator index {i} out of range for N = {N}")
    if g.kind == "E":
        return -WeylElement.d(N, i)
    if g.kind == "F":
        return WeylElement.t(N, i) if dual else -WeylElement.t(N, i)
    euler = WeylElement(N, {(_unit(N, i), _unit(N, i)): 1})
    return euler + (1 - gamma[i] if dual else gamma[i])


def represent(g: Generator, gamma: Sequence) -> WeylElement:
    """Image under ``C -> 1, E_i -> -d_i, F_i -> -t_i, H_i -> gamma_i + t_i d_i``."""
    return _rep(g, exact_gamma(gamma), dual=False)


def represent_dual(g: Generator, gamma: Sequence) -> WeylElement:
    """Contragredient image ``C -> -1, E_i -> -d_i, F_i -> t_i, H_i -> 1 - gamma_i + t_i d_i``."""
    return _rep(g, exact_gamma(gamma), dual=True)


def lie_relations_hold(gamma: Sequence, *, dual: bool = False) -> bool:
    """Every defining bracket of the oscillator algebra on the images, exactly."""
    gamma = exact_gamma(gamma)
    N = len(gamma)
    rep = (lambda g: _rep(g, gamma, True)) if dual else (lambda g: _rep(g, gamma, False))
    C = rep(Generator("C"))
    E = [rep(Generator("E", i)) for i in range(N)]
    F = [rep(Generator("F", i)) for i in range(N)]
    H = [rep(Generator("H", i)) for i in range(N)]
    zero = WeylElement.zero(N)
    for X in E + F + H:
        if commutator(C, X) != zero:
            return False
    for i in range(N):
        for j in range(N):
            same = i == j
            checks = [
                (commutator(E[i], F[j]), C if same else zero),
                (commutator(H[i], E[j]), -E[j] if same else zero),
                (commutator(H[i], F[j]), F[j] if same else zero),
                (commutator(E[i], E[j]), zero),
                (commutator(F[i], F[j]), zero),
                (commutator(H[i], H[j]), zero),
            ]
            if any(lhs != rhs for lhs, rhs in checks):
                return False
    return True


# ------------------------------------------------------- annihilation elements

def _ladder(gamma: tuple, i: int, n: int) -> WeylElement:
    """``F_i^n E_i^n`` under the representation."""
    F = _rep(Generator("F", i), gamma, False)
    E = _rep(Generator("E", i), gamma, False)
    return weyl_product(F**n, E**n)


def _falling(gamma: tuple, i: int, n: int) -> WeylElement:
    """``prod_{k<n} (H_i - gamma_i - k)`` under the representation."""
    N = len(gamma)
    H = _rep(Generator("H", i), gamma, False)
    out = WeylElement.scalar(N, 1)
    for k in range(n):
        out = weyl_product(out, H - gamma[i] - k)
    return out


def casimir_parts(l: Sequence[int], gamma: Sequence) -> tuple[WeylElement, WeylElement]:
    """The two products whose difference is the annihilation element for ``l``."""
    gamma = exact_gamma(gamma)
    N = len(gamma)
    if len(l) != N:
        raise ShapeError(f"l must have length {N}")
    l = [int(v) for v in l]
    neg = [i for i in range(N) if l[i] < 0]
    pos = [i for i in range(N) if l[i] > 0]
    first = WeylElement.scalar(N, 1)
    for i in neg:
        first = weyl_product(first, _ladder(gamma, i, -l[i]))
    for i in pos:
        first = weyl_product(first, _falling(gamma, i, l[i]))
    second = WeylElement.scalar(N, 1)
    for i in pos:
        second = weyl_product(second, _ladder(gamma, i, l[i]))
    for i in neg:
        second = weyl_product(second, _falling(gamma, i, -l[i]))
    return first, second


def casimir_image(l: Sequence[int], gamma: Sequence) -> WeylElement:
    first, second = casimir_parts(l, gamma)
    return first - second


def verify_annihilation(l: Sequence[int], gamma: Sequence) -> bool:
    return casimir_image(l, gamma).is_zero()


def euler_identity_check(n: int) -> bool:
    """``prod_{k<n} (t d - k) == t^n d^n`` in one variable."""
    if n < 1:
        raise ValidationError("n must be at least 1")
    euler = WeylElement(1, {((1,), (1,)): 1})
    lhs = WeylElement.scalar(1, 1)
    for k in range(n):
        lhs = weyl_product(lhs, euler - k)
    return lhs == WeylElement(1, {((n,), (n,)): 1})


def pairing_antisymmetry_residual(
    g: Generator, gamma: Sequence, phi, psi, symbol: sympy.Symbol
) -> float:
    """``|<pi_dual(X) phi, psi> + <phi, pi(X) psi>|`` on the half line, scaled.

    One variable; ``phi`` and ``psi`` are sympy expressions that decay fast
    enough at both ends of ``(0, inf)``.
    """
    from scipy.integrate import quad

    gamma = exact_gamma(gamma)
    if len(gamma) != 1:
        raise ShapeError("the quadrature spot check is one-dimensional")
    left = represent_dual(g, gamma).apply(phi, [symbol]) * psi
    right = phi * represent(g, gamma).apply(psi, [symbol])
    f_left = sympy.lambdify(symbol, left, "math")
    f_right = sympy.lambdify(symbol, right, "math")
    kw = dict(limit=200, epsabs=1e-14, epsrel=1e-13)
    a = quad(f_left, 0, math.inf, **kw)[0]
    b = quad(f_right, 0, math.inf, **kw)[0]
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a + b) / scale


# ------------------------------------------------------------ left covector

@dataclass(frozen=True)
class TestFunction:
    """``exp(log_scale) * prod t_i^p_i exp(-q_i t_i)``."""

    __test__ = False  # not a pytest class despite the name

    p: tuple[float, ...]
    q: tuple[float, ...]
    log_scale: complex = 0j

    def __post_init__(self):
        if len(self.p) != len(self.q):
            raise ShapeError("p and q must have the same length")
        if any(v < 0 for v in self.p):
            raise ValidationError("test-function powers must be non-negative")
        if any(not v > 0 for v in self.q):
            raise ValidationError("test-function rates must be positive")

    @classmethod
    def phi_R(cls, N: int) -> "TestFunction":
        """The right vector ``exp(-sum t_i)``, fixed by ``E_i``."""
        return cls((0.0,) * N, (1.0,) * N)

    def dilate(self, gamma, y: Sequence[float]) -> "TestFunction":
        """Apply ``exp(sum y_j (gamma_j + t_j d_j))``.

        ``exp(y t d)`` is the dilation ``t -> e^y t``, so the family is closed
        under it: the rate becomes ``q e^y`` and the scale picks up
        ``exp((gamma + p) . y)``.
        """
        g = SpectralVector.of(gamma).array
        y = np.asarray(y, dtype=float)
        if len(g) != len(self.p) or y.shape != (len(self.p),):
            raise ShapeError("gamma and y must match the test function")
        p = np.array(self.p)
        return TestFunction(
            self.p,
            tuple(float(v) for v in np.array(self.q) * np.exp(y)),
            complex(self.log_scale + (g + p) @ y),
        )

    def __call__(self, t) -> complex:
        t = np.asarray(t, dtype=float)
        return complex(cmath.exp(self.log_scale) * np.prod(t ** np.array(self.p) * np.exp(-np.array(self.q) * t)))


def _pair(data: GkzData, kappa: np.ndarray, testfn: TestFunction, cfg, allow_boundary_pinned, pivot_order):
    reduced = resolve_deltas(data, np.zeros(data.N), order=pivot_order)
    _check_chamber(kappa, reduced, allow_boundary_pinned)
    value, err = integrate_log_affine(
        reduced.slope_array, reduced.offset, kappa, np.log(np.array(testfn.q)), cfg
    )
    factor = float(reduced.jacobian_factor) * cmath.exp(testfn.log_scale)
    return complex(value * factor), float(err * abs(factor))


def phiL_pairing(
    data: GkzData,
    gamma,
    testfn: TestFunction,
    cfg: QuadratureConfig | None = None,
    *,
    allow_boundary_pinned: bool = False,
    pivot_order: Sequence[int] | None = None,
) -> tuple[complex, float]:
    """``<phi_L, testfn>``: the delta-constrained integral against ``prod dt_i/t_i t_i^gamma_i``."""
    cfg = cfg or QuadratureConfig()
    g = SpectralVector.of(gamma).array
    if len(g) != data.N or len(testfn.p) != data.N:
        raise ShapeError(f"gamma and the test function must have length {data.N}")
    return _pair(data, g + np.array(testfn.p), testfn, cfg, allow_boundary_pinned, pivot_order)


def matrix_element(
    data: GkzData, gamma, y: Sequence[float], cfg: QuadratureConfig | None = None, **kw
) -> tuple[complex, float]:
    """``<phi_L, pi(exp(sum y_j H_j)) phi_R>`` built on the operator side."""
    test = TestFunction.phi_R(data.N).dilate(gamma, y)
    return phiL_pairing(data, gamma, test, cfg, **kw)


def phiL_relation_residual(
    data: GkzData, gamma, testfn: TestFunction, alpha: int, cfg: QuadratureConfig | None = None
) -> float:
    """Relative size of ``<(prod pi_dual(F_i)^l_i - 1) phi_L, testfn>`` for lattice row ``alpha``.

    ``pi_dual(F_i) = t_i`` so the product multiplies the integrand by
    ``prod t_i^l_i``, which the deltas pin to one.
    """
    cfg = cfg or QuadratureConfig()
    if not 0 <= alpha < data.lattice_rank:
        raise ValidationError(f"lattice row {alpha} out of range")
    g = SpectralVector.of(gamma).array + np.array(testfn.p)
    base, _ = _pair(data, g, testfn, cfg, False, None)
    shifted, _ = _pair(data, g + np.array(data.M[alpha], dtype=float), testfn, cfg, False, None)
    return abs(shifted - base) / abs(base)


def phiL_torus_residual(
    data: GkzData, gamma, testfn: TestFunction, s: int, cfg: QuadratureConfig | None = None
) -> float:
    """Relative size of ``sum_j a^s_j <pi_dual(H_j) phi_L, testfn>``.

    By the invariance of the pairing this is ``-sum_j a^s_j <phi_L, pi(H_j) testfn>``
    and ``pi(H_j)`` maps the test family into itself plus one ``t_j`` factor.
    """
    cfg = cfg or QuadratureConfig()
    if not 0 <= s < data.m:
        raise ValidationError(f"row {s} out of range")
    g = SpectralVector.of(gamma).array
    p = np.array(testfn.p)
    q = np.array(testfn.q)
    base, _ = _pair(data, g + p, testfn, cfg, False, None)
    terms, sizes = [], []
    for j, a in enumerate(data.A[s]):
        if a:
            bump = np.zeros(data.N)
            bump[j] = 1.0
            shifted, _ = _pair(data, g + p + bump, testfn, cfg, False, None)
            # (gamma_j + t_j d_j) t^p e^{-q t} = (gamma_j + p_j) phi - q_j t_j phi
            terms.append(a * ((g[j] + p[j]) * base - q[j] * shifted))
            sizes += [abs(a * (g[j] + p[j]) * base), abs(a * q[j] * shifted)]
    scale = max(sizes, default=0.0)
    return abs(sum(terms)) / scale if scale else abs(sum(terms))
