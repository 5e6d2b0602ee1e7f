import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gkz.errors import ChamberError, DivergenceError, ValidationError
from gkz.integral import (
    QuadratureConfig,
    evaluate_gg,
    evaluate_gkz,
    find_laplace_mode,
    pivot_sets,
    resolve_deltas,
)
from gkz.lattice import random_unimodular
from gkz.model import SpectralVector, change_lattice_basis, exponential_data, gamma_data, gauge_shift
from gkz.presets import PRESETS
from gkz.whittaker import build_gz_data
from oracles import gamma_by_quadrature, rel

FAST = QuadratureConfig(points_per_dim=32)


def test_config_validation():
    with pytest.raises(ValidationError):
        QuadratureConfig(points_per_dim=1)
    with pytest.raises(ValidationError):
        QuadratureConfig(tail_tolerance=0)
    with pytest.raises(ValidationError):
        QuadratureConfig(max_halfwidth=-1)
    assert QuadratureConfig(points_per_dim=10, refinement=2).fine_points == 37


def test_resolve_deltas_examples():
    r = resolve_deltas(exponential_data(), [math.log(2)])
    assert r.dim == 0 and r.jacobian_factor == 1
    assert r.T(np.zeros(0)) == pytest.approx([math.log(2)])
    r = resolve_deltas(gamma_data(), [0.3])
    assert r.dim == 1 and r.pivot_set == ()
    gz1 = build_gz_data(1).data
    r = resolve_deltas(gz1, [0.4, -0.2])
    assert (r.dim, r.jacobian_factor) == (1, 1)
    # b = (y_a + y_b) - a in logs
    assert r.T(np.array([0.1])) == pytest.approx([0.1, 0.2 - 0.1])
    assert r.check_exact()


def test_resolve_deltas_rejects_bad_pivots():
    gz2 = build_gz_data(2).data
    with pytest.raises(ValidationError):
        resolve_deltas(gz2, np.zeros(6), pivots=(0, 1))
    singular = next(p for p in __import__("itertools").combinations(range(6), 3) if p not in pivot_sets(gz2.M))
    with pytest.raises(ValidationError):
        resolve_deltas(gz2, np.zeros(6), pivots=singular)


def test_every_pivot_set_is_exact():
    for name in ("gz-2", "extended-2", "max-parabolic-2"):
        data = PRESETS[name].data
        for p in pivot_sets(data.M):
            r = resolve_deltas(data, np.linspace(-0.5, 0.5, data.N), pivots=p)
            assert r.check_exact()
            assert r.jacobian_factor > 0


def test_mode_examples():
    r = resolve_deltas(gamma_data(), [0.0])
    assert find_laplace_mode(r, SpectralVector.of([5.0])) == pytest.approx([math.log(5)], abs=1e-12)
    assert find_laplace_mode(r, SpectralVector.of([1.0])) == pytest.approx([0.0], abs=1e-12)
    r = resolve_deltas(build_gz_data(1).data, [0.0, 0.0])
    assert find_laplace_mode(r, SpectralVector.of([1.0, 1.0])) == pytest.approx([0.0], abs=1e-12)
    with pytest.raises(ChamberError):
        find_laplace_mode(r, SpectralVector.of([1.0, 0.0]))


def test_gamma_examples():
    v, _ = evaluate_gg(gamma_data(), [2.0], [3.0])
    assert rel(v, 1.0) < 1e-12
    v, _ = evaluate_gg(gamma_data(), [0.5], [1.0])
    assert rel(v, gamma_by_quadrature(0.5)) < 1e-10
    assert rel(evaluate_gkz(gamma_data(), [2.0], [3.0]), 1 / 9) < 1e-12


def test_exponential_examples():
    v, err = evaluate_gg(exponential_data(), [0.7], [2.0])
    assert rel(v, 2**0.7 * math.exp(-2)) < 1e-14 and err == 0
    for g in (0.3, 1.7 + 0.4j):
        assert rel(evaluate_gkz(exponential_data(), [g], [1.0]), math.exp(-1)) < 1e-14


def test_complex_gamma_matches_oracle():
    import mpmath

    v, _ = evaluate_gg(gamma_data(), [1.5 + 0.7j], [1.0])
    assert rel(v, complex(mpmath.gamma(1.5 + 0.7j))) < 1e-10


def test_chamber_and_divergence_errors():
    with pytest.raises(ChamberError):
        evaluate_gg(gamma_data(), [-0.1], [1.0])
    with pytest.raises(ChamberError):
        evaluate_gg(gamma_data(), [0.0], [1.0])
    with pytest.raises(DivergenceError):
        evaluate_gg(gamma_data(), [0.05], [1.0], QuadratureConfig(max_halfwidth=5.0))


@settings(max_examples=10)
@given(st.lists(st.floats(0.3, 3.0), min_size=6, max_size=6), st.lists(st.floats(-0.5, 0.5), min_size=6, max_size=6))
def test_positivity_for_real_gamma(gamma, y):
    v, _ = evaluate_gg(build_gz_data(2).data, gamma, np.exp(y), QuadratureConfig(points_per_dim=16))
    assert v.real > 0 and v.imag == 0


# ------------------------------------------------------------ invariances

presets = st.sampled_from([n for n in PRESETS if PRESETS[n].data.m <= 3])
gammas = st.floats(0.5, 2.0)
shifts = st.floats(-0.6, 0.6)


@settings(max_examples=15)
@given(presets, st.data())
def test_pivot_independence(name, draw):
    data = PRESETS[name].data
    sets = pivot_sets(data.M)
    g = draw.draw(st.lists(gammas, min_size=data.N, max_size=data.N))
    u = np.exp(draw.draw(st.lists(shifts, min_size=data.N, max_size=data.N)))
    p = draw.draw(st.sampled_from(sets))
    ref, _ = evaluate_gg(data, g, u, FAST)
    alt, _ = evaluate_gg(data, g, u, FAST, pivots=p)
    assert rel(alt, ref) < 1e-8


@settings(max_examples=15)
@given(presets, st.integers(0, 10_000), st.data())
def test_basis_independence(name, seed, draw):
    data = PRESETS[name].data
    if data.lattice_rank == 0:
        return
    g = draw.draw(st.lists(gammas, min_size=data.N, max_size=data.N))
    u = np.exp(draw.draw(st.lists(shifts, min_size=data.N, max_size=data.N)))
    other = change_lattice_basis(data, random_unimodular(data.lattice_rank, seed))
    assert rel(evaluate_gg(other, g, u, FAST)[0], evaluate_gg(data, g, u, FAST)[0]) < 1e-8


@settings(max_examples=15)
@given(presets, st.data())
def test_gauge_independence(name, draw):
    data = PRESETS[name].data
    if data.lattice_rank == 0:
        return
    g = SpectralVector.of(draw.draw(st.lists(st.floats(1.0, 2.0), min_size=data.N, max_size=data.N)))
    xi = draw.draw(st.lists(st.complex_numbers(max_magnitude=0.3, allow_nan=False, allow_infinity=False),
                            min_size=data.lattice_rank, max_size=data.lattice_rank))
    u = np.exp(draw.draw(st.lists(shifts, min_size=data.N, max_size=data.N)))
    g2 = gauge_shift(g, data, xi)
    assert g2.convergent
    assert rel(evaluate_gkz(data, g2, u, FAST), evaluate_gkz(data, g, u, FAST)) < 1e-8


def test_gauge_shift_exact_on_gamma_side():
    data = build_gz_data(2).data
    xi = [Fraction(1, 3), Fraction(-2, 7), Fraction(5, 4)]
    g = SpectralVector.of([1.5] * 6)
    a = data.A.to_numpy()
    assert np.allclose(a @ gauge_shift(g, data, xi).array, a @ g.array, atol=0)
