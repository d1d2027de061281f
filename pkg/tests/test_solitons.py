# tests/test_solitons.py
"""
Tests for solitary waves, N-soliton synthesis and the gauge transformation.
"""
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import trapezoid

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.fixtures import planted_data
from dnls_ist.core.solitons import (
    ReflectionlessData,
    SolitonMatrix,
    SolitonParams,
    gauge,
    gauge_inverse,
    nsoliton_matrix,
    nsoliton_q,
    one_soliton_q,
    one_soliton_u,
    planted_potential,
    soliton_l2_norm,
)
from dnls_ist.core.types import PotentialKind, PotentialSample
from dnls_ist.utils.errors import ErrorCode, ScatteringError


def test_parameter_constraint():
    with pytest.raises(ScatteringError) as e:
        SolitonParams(1.0, 2.0)
    assert e.value.code == ErrorCode.PARAM
    SolitonParams(1.0, 1.99)


def test_spectral_parameter_map():
    params = SolitonParams(1.2, 0.8, 1.5, 0.7)
    lam = params.eigenvalue
    assert lam.real == pytest.approx(-0.2)
    assert 4.0 * abs(lam) ** 2 == pytest.approx(1.2)
    back = SolitonParams.from_spectral(lam, params.norming_constant)
    assert back.omega == pytest.approx(1.2)
    assert back.c == pytest.approx(0.8)
    assert back.x_offset == pytest.approx(1.5)
    assert np.angle(np.exp(1j * (back.phi0 - 0.7))) == pytest.approx(0.0, abs=1e-12)
    print("✓ (omega, c, x0, phi0) <-> (lambda, C) is consistent")


def test_l2_norm_formula():
    x = np.linspace(-40.0, 40.0, 16001)
    for omega, c in ((1.0, 0.0), (1.0, 1.0), (0.8, -1.2)):
        u = one_soliton_u(SolitonParams(omega, c), x)
        assert trapezoid(np.abs(u) ** 2, x) == pytest.approx(soliton_l2_norm(omega, c), rel=1e-8)
    assert soliton_l2_norm(1.0, 0.0) == pytest.approx(2.0 * np.pi)
    assert soliton_l2_norm(1.0, 1.999) < 4.0 * np.pi


def test_single_soliton_synthesis_matches_closed_form():
    params = SolitonParams(1.2, 0.8, 1.5, 0.7)
    data = ReflectionlessData.of([(params.eigenvalue, params.norming_constant)])
    x = np.linspace(-10.0, 10.0, 201)
    for t in (0.0, 1.0, 10.0):
        shifted = x + params.c * t
        assert np.max(np.abs(nsoliton_q(data, shifted, t) - one_soliton_q(params, shifted, t))) < 1e-8
    print("✓ Residue-only problem reproduces the solitary wave")


def test_far_separated_solitons_stay_bounded():
    data = planted_data(2)
    x = np.linspace(-300.0, 300.0, 61)
    q = nsoliton_q(data, x, 150.0)
    assert np.all(np.isfinite(q))
    assert np.max(np.abs(q)) < 3.0


def test_empty_data_gives_zero():
    data = ReflectionlessData()
    assert data.n == 0
    assert np.all(nsoliton_q(data, np.linspace(-1.0, 1.0, 5)) == 0)
    matrix = nsoliton_matrix(data, 0.0, 0.0, 0.3 + 0.1j)
    assert np.allclose(matrix, np.eye(2))


def test_matrix_limit_at_infinity():
    data = planted_data(2)
    gamma = SolitonMatrix(data, [0.5]).gamma[0]
    far = nsoliton_matrix(data, 0.5, 0.0, np.array([1e6 + 1e6j, -1e6 + 2e6j]))
    assert np.allclose(far[:, 0, 0], 1.0, atol=1e-5)
    assert np.allclose(far[:, 0, 1], 0.0, atol=1e-5)
    assert np.allclose(far[:, 1, 1], 1.0, atol=1e-5)
    # the lower-left entry tends to a nonzero constant
    assert abs(gamma) > 1e-3
    assert np.allclose(far[:, 1, 0], gamma, atol=1e-5)
    with pytest.raises(ScatteringError):
        nsoliton_matrix(data, 0.0, 0.0, data.eigenvalues[0])


def _random_data(rng: np.random.Generator, n: int) -> ReflectionlessData:
    while True:
        lam = rng.uniform(-1.0, 1.0, n) + 1j * rng.uniform(0.3, 1.0, n)
        gaps = np.abs(lam[:, None] - lam[None, :]) + np.eye(n) * 10.0
        if np.min(gaps) > 0.2:
            break
    C = np.exp(rng.normal(0.0, 0.5, n) + 1j * rng.uniform(-np.pi, np.pi, n))
    return ReflectionlessData.of(zip(lam, C))


def _random_points(rng: np.random.Generator, data: ReflectionlessData, count: int) -> np.ndarray:
    poles = np.concatenate([data.eigenvalues, np.conj(data.eigenvalues)])
    points = []
    while len(points) < count:
        z = complex(rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0))
        if np.min(np.abs(z - poles)) > 0.1:
            points.append(z)
    return np.array(points)


def test_matrix_determinant_and_symmetry_for_random_data():
    rng = np.random.default_rng(20240611)
    for n in (1, 2, 3, 4):
        data = _random_data(rng, n)
        x, t = rng.uniform(-3.0, 3.0), rng.uniform(0.0, 1.0)
        z = _random_points(rng, data, 100)
        P = nsoliton_matrix(data, x, t, z)
        P_conj = nsoliton_matrix(data, x, t, np.conj(z))
        size = np.max(np.abs(P), axis=(1, 2))
        assert np.max(np.abs(np.linalg.det(P) - 1.0) / np.maximum(1.0, size ** 2)) < 1e-9
        assert np.max(np.abs(P[:, 1, 1] - np.conj(P_conj[:, 0, 0])) / np.maximum(1.0, size)) < 1e-9
        assert np.max(np.abs(P[:, 1, 0] + z * np.conj(P_conj[:, 0, 1])) / np.maximum(1.0, size * np.abs(z))) < 1e-9
    print("✓ det P = 1 and the conjugation symmetry hold at random points")


def test_nsoliton_mass_is_conserved():
    data = planted_data(3)
    x = np.linspace(-120.0, 120.0, 24001)
    expected = sum(soliton_l2_norm(4.0 * abs(lam) ** 2, -4.0 * lam.real) for lam in data.eigenvalues)
    for t in (0.0, 2.0, 8.0):
        mass = trapezoid(np.abs(nsoliton_q(data, x, t)) ** 2, x)
        assert mass == pytest.approx(expected, rel=1e-6)
    print("✓ N-soliton L2 norm is the sum of its components and constant in t")


def test_matrix_q_matches_large_z_limit():
    data = planted_data(1)
    solution = SolitonMatrix(data, [0.3])
    z = 1e7j
    limit = 2j * z * solution(z)[0, 0, 0, 1]
    assert abs(limit - solution.q()[0]) < 1e-5


def test_gauge_maps_u_soliton_to_q_soliton():
    params = SolitonParams(1.0, 0.5, 0.0, 0.3)
    u = PotentialSample.from_function(lambda x: one_soliton_u(params, x), -30.0, 30.0, 6001, PotentialKind.U_GAUGE)
    q = gauge(u)
    assert q.kind == PotentialKind.Q_GAUGE
    assert np.max(np.abs(q.values - one_soliton_q(params, q.x))) < 1e-4
    back = gauge_inverse(q)
    assert np.max(np.abs(back.values - u.values)) < 1e-12
    print("✓ Gauge transformation and its inverse")


def test_gauge_checks_kind():
    q = planted_potential(planted_data(1), -20.0, 20.0, 401)
    with pytest.raises(ScatteringError):
        gauge(q)
    with pytest.raises(ScatteringError):
        gauge_inverse(gauge_inverse(q))
