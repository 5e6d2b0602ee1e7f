"""Reference values computed without any gkz code."""
import math

import mpmath

mpmath.mp.dps = 30


def gamma_by_quadrature(g: float) -> float:
    """Gamma(g) by tanh-sinh quadrature of t^(g-1) e^(-t) on (0, inf), split at 1."""
    f = lambda t: t ** (g - 1) * mpmath.exp(-t)
    return float(mpmath.quad(f, [0, 1, mpmath.inf]))


def bessel_k(nu, z) -> complex:
    return complex(mpmath.besselk(nu, z))


def whittaker_min_rank1(lam, x) -> complex:
    l1, l2 = lam
    x1, x2 = x
    return 2 * complex(mpmath.exp((l1 + l2) * (x1 + x2) / 2)) * bessel_k(l2 - l1, 2 * math.exp((x1 - x2) / 2))


def whittaker_max_rank1(lam, x) -> complex:
    l1, l2 = lam
    return 2 * complex(mpmath.exp(x * (l1 + l2) / 2)) * bessel_k(l1 - l2, 2 * math.exp(x / 2))


def rel(a, b) -> float:
    return abs(complex(a) - complex(b)) / max(abs(complex(b)), 1e-300)
