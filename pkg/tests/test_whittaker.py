import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkz.errors import ChamberError, ShapeError
from gkz.integral import QuadratureConfig, evaluate_gg
from gkz.lattice import check_orthogonality, integer_kernel_basis
from gkz.whittaker import (
    bessel_k_oracle,
    build_extended_data,
    build_gz_data,
    build_max_parabolic_data,
    eval_max_parabolic_gg,
    eval_whittaker_max,
    eval_whittaker_min,
    restrict_arguments,
    whittaker_spectrum,
)
from oracles import bessel_k, rel, whittaker_max_rank1, whittaker_min_rank1

MID = QuadratureConfig(points_per_dim=32)


def test_gz_data_rank_one():
    gz = build_gz_data(1)
    assert (gz.data.N, gz.data.m) == (2, 1)
    assert gz.data.M.to_list() == [[1, 1]] and gz.data.A.to_list() == [[1, -1]]


@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_gz_data_validates(ell):
    gz = build_gz_data(ell)
    d = ell * (ell + 1) // 2
    assert (gz.data.N, gz.data.m, gz.data.lattice_rank) == (2 * d, d, d)
    assert check_orthogonality(gz.data.A, gz.data.M)


def test_gz_lattice_rows_follow_the_graph():
    gz = build_gz_data(2)
    for k, i in gz.pairs:
        row = [0] * gz.data.N
        row[gz.a(k, i)] += 1
        row[gz.b(k, i)] += 1
        if k < 2:
            row[gz.a(k + 1, i + 1)] -= 1
            row[gz.b(k + 1, i)] -= 1
        assert list(gz.data.M[gz.pairs.index((k, i))]) == row


def test_spectrum():
    s = whittaker_spectrum(2, [0.5, 1.0, 1.5])
    # pairs (1,1), (2,1), (2,2)
    assert s.gamma == (1.0, 1.5, 1.5)
    assert s.nu == (0.5, 0.0, 1.5)
    with pytest.raises(ShapeError):
        whittaker_spectrum(2, [1, 2])


def test_restrict_arguments():
    r = restrict_arguments(1, [0.7, -0.2])
    assert r.y == pytest.approx((0.9,)) and r.z == (0.0,)
    r = restrict_arguments(2, [0.3, 0.3, 0.3])
    assert not any(r.y) and not any(r.z)
    r = restrict_arguments(2, [1, 0, -1])
    assert r.y == (1.0, 1.0, 1.0) and r.z == (0.0, 0.0, 0.0)


def test_extended_data():
    ext = build_extended_data(1)
    assert ext.N == 3 and ext.M.to_list() == [[1, 1, 0], [0, 0, 1]]
    for ell in (1, 2):
        e = build_extended_data(ell)
        assert check_orthogonality(e.A, e.M)


@pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
def test_max_parabolic_data(ell):
    d = build_max_parabolic_data(ell)
    assert d.M.to_list() == [[1] * (ell + 1)]
    assert check_orthogonality(d.A, d.M)
    assert integer_kernel_basis(d.A).to_list() in ([[1] * (ell + 1)], [[-1] * (ell + 1)])
    if ell == 1:
        assert d.A.to_list() == [[1, -1]]


# ------------------------------------------------------------- the oracle

def test_bessel_oracle_half_integer():
    assert rel(bessel_k_oracle(0.5, 2.0), math.sqrt(math.pi / 4) * math.exp(-2)) < 1e-10


def test_bessel_oracle_symmetry_and_recurrence():
    assert rel(bessel_k_oracle(0.7, 1.3), bessel_k_oracle(-0.7, 1.3)) < 1e-10
    nu, z = 1.0, 2.0
    lhs = bessel_k_oracle(nu + 1, z) - bessel_k_oracle(nu - 1, z)
    assert rel(lhs, 2 * nu / z * bessel_k_oracle(nu, z)) < 1e-8


@pytest.mark.parametrize("nu, z", [(0.0, 0.1), (0.3 + 0.4j, 1.0), (2.5, 7.0), (4.0, 0.5)])
def test_bessel_oracle_against_mpmath(nu, z):
    assert rel(bessel_k_oracle(nu, z), bessel_k(nu, z)) < 1e-12


# ---------------------------------------------------------- evaluations

@pytest.mark.parametrize("x", np.linspace(-2, 2, 5))
def test_rank_one_against_bessel(x):
    lam = (0.6, 1.1)
    assert rel(eval_whittaker_max(1, lam, x, MID), whittaker_max_rank1(lam, x)) < 1e-6
    xx = (x, 0.3)
    assert rel(eval_whittaker_min(1, lam, xx, MID), whittaker_min_rank1(lam, xx)) < 1e-6


def test_rank_one_symmetry_in_lambda():
    x = (0.4, -0.3)
    assert rel(eval_whittaker_min(1, (0.6, 1.1), x, MID), eval_whittaker_min(1, (1.1, 0.6), x, MID)) < 1e-6


def test_min_chamber():
    with pytest.raises(ChamberError):
        eval_whittaker_min(1, (0.0, 1.0), (0.0, 0.0))


@settings(max_examples=8)
@given(st.lists(st.floats(-0.5, 0.5), min_size=3, max_size=3), st.lists(st.floats(-0.4, 0.4), min_size=3, max_size=3))
def test_representative_independence(x, w):
    """Moving ``(y, z)`` along the row space of A keeps every constraint value."""
    ell = 2
    gz = build_gz_data(ell)
    base = restrict_arguments(ell, x).log_u
    moved = base + gz.data.A.to_numpy().T @ np.array(w)
    lam = (0.7, 1.0, 1.3)
    cfg = QuadratureConfig(points_per_dim=24)
    a = eval_whittaker_min(ell, lam, x, cfg, gz=gz)
    b = eval_whittaker_min(ell, lam, x, cfg, gz=gz, log_u=moved)
    assert rel(b, a) < 1e-8


@settings(max_examples=10)
@given(st.floats(-1.5, 1.5), st.lists(st.floats(-1, 1), min_size=2, max_size=2))
def test_max_parabolic_depends_on_sum_only(x, w):
    lam = (0.5, 1.0, 1.5)
    y = [x - sum(w)] + list(w)
    assert rel(eval_max_parabolic_gg(2, lam, y, MID)[0], eval_whittaker_max(2, lam, x, MID)) < 1e-8


@pytest.mark.parametrize("ell", [1, 2])
def test_extended_factorisation(ell):
    base = build_gz_data(ell).data
    ext = build_extended_data(ell)
    rng = np.random.default_rng(ell)
    g = rng.uniform(0.6, 1.8, base.N)
    y = rng.uniform(-0.5, 0.5, base.N)
    g_star, y_star = 1.3, 0.4
    cfg = QuadratureConfig(points_per_dim=32)
    phi, _ = evaluate_gg(base, g, np.exp(y), cfg)
    phi_hat, _ = evaluate_gg(ext, np.append(g, g_star), np.exp(np.append(y, y_star)), cfg)
    assert rel(phi_hat, math.exp(g_star * y_star - math.exp(y_star)) * phi) < 1e-10


def test_grid_convergence_in_the_boundary_chamber():
    """The pinned zero exponents still give a converging grid."""
    lam, x = (0.5, 1.0, 1.5), (0.2, 0.0, -0.3)
    coarse = eval_whittaker_min(2, lam, x, QuadratureConfig(points_per_dim=16), with_error=True)
    fine = eval_whittaker_min(2, lam, x, QuadratureConfig(points_per_dim=32), with_error=True)
    assert fine[1] < coarse[1] / 10
    assert rel(coarse[0], fine[0]) < 1e-5
