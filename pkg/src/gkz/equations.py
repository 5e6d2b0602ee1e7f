"""Residuals of the GG system evaluated on the numerical GG function.

Derivatives in ``u`` are nested central differences with relative steps
``h * u_i``; derivatives in ``gamma`` use absolute real steps ``h``; shifts
``gamma -> gamma + e_i`` are exact re-evaluations.  Indices are 0-based.

Every residual is normalised by the largest magnitude among the individual
terms of its equation, so ``relative_residual`` is scale free.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ShapeError, ValidationError
from .integral import QuadratureConfig, evaluate_gg
from .model import ArgumentVector, GkzData, SpectralVector
from .whittaker import eval_whittaker_max

__all__ = [
    "GGFunction",
    "ResidualReport",
    "residual_contiguity",
    "residual_dual_difference",
    "residual_lattice_pde",
    "residual_reduced_ode",
    "residual_spectral_linear",
    "residual_torus_pde",
    "verify_all",
]


@dataclass(frozen=True)
class ResidualReport:
    equation_id: str
    parameters: tuple
    absolute_residual: float
    relative_residual: float
    step: float

    def to_json(self) -> dict:
        return {
            "equation": self.equation_id,
            "params": list(self.parameters),
            "abs": self.absolute_residual,
            "rel": self.relative_residual,
            "step": self.step,
        }


def _report(eq: str, params, lhs: complex, rhs: complex, terms: Sequence[complex], step: float) -> ResidualReport:
    diff = abs(complex(lhs) - complex(rhs))
    scale = max((abs(complex(t)) for t in terms), default=0.0)
    rel = diff / scale if scale > 0 else diff
    return ResidualReport(eq, tuple(params), float(diff), float(rel), float(step))


class GGFunction:
    """Memoised ``Phi_gamma(u)`` for fixed data and quadrature settings."""

    def __init__(self, data: GkzData, cfg: QuadratureConfig | None = None, **eval_kwargs):
        self.data = data
        self.cfg = cfg
        self.eval_kwargs = eval_kwargs
        self._cache: dict = {}

    def __call__(self, gamma, u) -> complex:
        key = (tuple(complex(g) for g in gamma), tuple(float(x) for x in u))
        if key not in self._cache:
            self._cache[key] = evaluate_gg(self.data, key[0], key[1], self.cfg, **self.eval_kwargs)[0]
        return self._cache[key]

    @property
    def evaluations(self) -> int:
        return len(self._cache)


def _prepare(data: GkzData, gamma, u, phi):
    gamma = SpectralVector.of(gamma)
    u = ArgumentVector.of(u)
    if len(gamma) != data.N or len(u) != data.N:
        raise ShapeError(f"gamma and u must have length {data.N}")
    return gamma, u, phi or GGFunction(data)


def _check_step(h: float) -> None:
    if not h > 0:
        raise ValidationError("step must be positive")


def _apply_factors(phi, gamma: SpectralVector, u: ArgumentVector, ops: list[int], h: float) -> complex:
    """``prod_k (-d/du_{ops[k]} + gamma_{ops[k]} / u_{ops[k]})`` applied to Phi at ``u``.

    Each factor is one central-difference stencil; offsets live on the
    integer lattice of steps ``h * u_i`` so repeated points hit the cache.
    """
    base = np.array(u.u)
    delta = h * base
    g = gamma.gamma

    def at(offset: tuple[int, ...], depth: int) -> complex:
        point = base + np.array(offset) * delta
        if depth == len(ops):
            return phi(g, point)
        i = ops[depth]
        up = list(offset)
        dn = list(offset)
        up[i] += 1
        dn[i] -= 1
        deriv = (at(tuple(up), depth + 1) - at(tuple(dn), depth + 1)) / (2 * delta[i])
        return -deriv + g[i] / point[i] * at(offset, depth + 1)

    return at(tuple([0] * len(base)), 0)


def _partial_u(phi, gamma: SpectralVector, u: ArgumentVector, i: int, h: float) -> complex:
    """``u_i dPhi/du_i`` by a central difference of step ``h u_i``."""
    base = np.array(u.u)
    step = h * base[i]
    up, dn = base.copy(), base.copy()
    up[i] += step
    dn[i] -= step
    return base[i] * (phi(gamma.gamma, up) - phi(gamma.gamma, dn)) / (2 * step)


def residual_lattice_pde(data: GkzData, gamma, u, l: Sequence[int], h: float = 1e-3, *, phi=None) -> ResidualReport:
    gamma, u, phi = _prepare(data, gamma, u, phi)
    _check_step(h)
    l = [int(v) for v in l]
    if not data.in_lattice(l):
        raise ValidationError(f"{l} is not in the relation lattice")
    neg = [i for i, v in enumerate(l) for _ in range(-v) if v < 0]
    pos = [i for i, v in enumerate(l) for _ in range(v) if v > 0]
    lhs = _apply_factors(phi, gamma, u, neg, h)
    rhs = _apply_factors(phi, gamma, u, pos, h)
    return _report("lattice_pde", l, lhs, rhs, [lhs, rhs], h)


def residual_torus_pde(data: GkzData, gamma, u, s: int, h: float = 1e-3, *, phi=None) -> ResidualReport:
    gamma, u, phi = _prepare(data, gamma, u, phi)
    _check_step(h)
    if not 0 <= s < data.m:
        raise ValidationError(f"row index {s} out of range for m = {data.m}")
    row = data.A[s]
    terms = [a * _partial_u(phi, gamma, u, i, h) for i, a in enumerate(row) if a]
    return _report("torus_pde", [s], sum(terms), 0.0, terms, h)


def residual_dual_difference(data: GkzData, gamma, u, s: int, *, phi=None) -> ResidualReport:
    gamma, u, phi = _prepare(data, gamma, u, phi)
    if not 0 <= s < data.m:
        raise ValidationError(f"row index {s} out of range for m = {data.m}")
    center = phi(gamma.gamma, u.u)
    shifted, scaled = [], []
    for i, a in enumerate(data.A[s]):
        if a:
            shifted.append(a * phi(gamma.shifted(i).gamma, u.u))
            scaled.append(a * gamma.gamma[i] * center)
    return _report("dual_difference", [s], sum(shifted), sum(scaled), shifted + scaled, 0.0)


def residual_spectral_linear(data: GkzData, gamma, u, l: Sequence[int], h: float = 1e-3, *, phi=None) -> ResidualReport:
    gamma, u, phi = _prepare(data, gamma, u, phi)
    _check_step(h)
    l = [int(v) for v in l]
    if not data.in_lattice(l):
        raise ValidationError(f"{l} is not in the relation lattice")
    center = phi(gamma.gamma, u.u)
    y = u.y
    deriv_terms, log_terms = [], []
    for i, li in enumerate(l):
        if li:
            d = (phi(gamma.shifted(i, h).gamma, u.u) - phi(gamma.shifted(i, -h).gamma, u.u)) / (2 * h)
            deriv_terms.append(li * d)
            log_terms.append(li * y[i] * center)
    return _report("spectral_linear", l, sum(deriv_terms), sum(log_terms), deriv_terms + log_terms, h)


def residual_contiguity(data: GkzData, gamma, u, i: int, h: float = 1e-3, *, phi=None) -> ResidualReport:
    gamma, u, phi = _prepare(data, gamma, u, phi)
    _check_step(h)
    if not 0 <= i < data.N:
        raise ValidationError(f"variable index {i} out of range for N = {data.N}")
    euler = _partial_u(phi, gamma, u, i, h)
    center = phi(gamma.gamma, u.u)
    shifted = phi(gamma.shifted(i).gamma, u.u)
    lhs = -euler + gamma.gamma[i] * center
    return _report("contiguity", [i], lhs, shifted, [euler, gamma.gamma[i] * center, shifted], h)


def residual_reduced_ode(
    ell: int,
    lam: Sequence[complex],
    x: float,
    h: float = 1e-3,
    cfg: QuadratureConfig | None = None,
    *,
    func: Callable[[float], complex] | None = None,
) -> ResidualReport:
    """``{prod_i (-d/dx + lambda_i) - e^x}`` applied to the one-variable function."""
    _check_step(h)
    lam = [complex(v) for v in lam]
    if len(lam) != ell + 1:
        raise ShapeError(f"lambda must have length {ell + 1}")
    if func is None:
        def func(xx):
            return eval_whittaker_max(ell, lam, xx, cfg)
    cache: dict[int, complex] = {}

    def f(k: int) -> complex:
        if k not in cache:
            cache[k] = func(x + k * h)
        return cache[k]

    def apply(k: int, depth: int) -> complex:
        if depth == len(lam):
            return f(k)
        return -(apply(k + 1, depth + 1) - apply(k - 1, depth + 1)) / (2 * h) + lam[depth] * apply(k, depth + 1)

    lhs = apply(0, 0)
    rhs = np.exp(x) * f(0)
    return _report("reduced_ode", [ell, float(x)], lhs, rhs, [lhs, rhs], h)


def verify_all(data: GkzData, gamma, u, h: float = 1e-3, cfg: QuadratureConfig | None = None, **eval_kwargs) -> list[ResidualReport]:
    """Every equation of the system: lattice generators, torus rows, variables."""
    phi = GGFunction(data, cfg, **eval_kwargs)
    reports = []
    for l in data.M:
        reports.append(residual_lattice_pde(data, gamma, u, l, h, phi=phi))
    for l in data.M:
        reports.append(residual_spectral_linear(data, gamma, u, l, h, phi=phi))
    for s in range(data.m):
        reports.append(residual_torus_pde(data, gamma, u, s, h, phi=phi))
    for s in range(data.m):
        reports.append(residual_dual_difference(data, gamma, u, s, phi=phi))
    for i in range(data.N):
        reports.append(residual_contiguity(data, gamma, u, i, h, phi=phi))
    return reports
