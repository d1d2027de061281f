# tests/test_direct_scattering.py
"""
Tests for the forward scattering map.
"""
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import solve_ivp

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.direct_scattering import (
    EigenvalueSearch,
    JostSolver,
    TransmissionPair,
    direct_map,
    find_eigenvalues,
    norming_constant,
    reflection,
    solve_jost,
    transmission,
)
from dnls_ist.core.fixtures import gaussian_sample, planted_data, planted_sample, sech_sample, soliton_radiation_sample
from dnls_ist.core.solitons import ReflectionlessData, SolitonParams, planted_potential
from dnls_ist.core.types import Column, DiscreteDatum, PotentialKind, PotentialSample, Side, UniformGrid
from dnls_ist.utils.errors import ErrorCode, ScatteringError
from dnls_ist.utils.helpers import DEFAULT_CONFIG

LAMBDA_GRID = UniformGrid.symmetric(4.0, 81)


def _jost_ode(q_func, lam: complex, shift: complex):
    def rhs(x, n):
        q = q_func(x)
        half = 0.5j * abs(q) ** 2
        return [(-1j * lam + half + shift) * n[0] + q * n[1],
                -lam * np.conj(q) * n[0] + (1j * lam - half + shift) * n[1]]
    return rhs


def test_zero_potential_is_transparent():
    q = PotentialSample(-5.0, 0.1, np.zeros(101))
    tp = transmission(q, LAMBDA_GRID)
    assert np.max(np.abs(tp.alpha - 1.0)) < 1e-12
    assert np.max(np.abs(tp.beta)) < 1e-12
    print("✓ Zero potential has alpha = 1, beta = 0")


def test_unitarity_of_fixture_potentials():
    for q in (gaussian_sample(), sech_sample()):
        tp = transmission(q, LAMBDA_GRID)
        assert tp.unitarity_defect < 1e-6
    print("✓ |alpha|^2 + lam |beta|^2 = 1 on the grid")


def test_u_gauge_input_is_rejected():
    u = gaussian_sample().with_values(gaussian_sample().values, PotentialKind.U_GAUGE)
    with pytest.raises(ScatteringError) as e:
        direct_map(u)
    assert e.value.code == ErrorCode.DOMAIN


def test_jost_column_region_and_normalization():
    q = gaussian_sample()
    with pytest.raises(ScatteringError) as e:
        solve_jost(q, 0.5 - 0.2j, Side.MINUS, Column.FIRST)
    assert e.value.code == ErrorCode.DOMAIN

    column = solve_jost(q, 0.7 + 0.1j, Side.MINUS, Column.FIRST)
    assert np.allclose(column.normalization, [1.0, 0.0])
    column = solve_jost(q, 0.7 - 0.1j, Side.PLUS, Column.FIRST)
    assert np.allclose(column.normalization, [1.0, 0.0])
    column = solve_jost(q, 0.7 + 0.1j, Side.PLUS, Column.SECOND)
    assert np.allclose(column.normalization, [0.0, 1.0])
    assert column.values.shape == (q.n, 2)


def test_reflection_refuses_vanishing_alpha():
    lam = np.array([-1.0, 0.0, 1.0])
    tp = TransmissionPair(lam, np.array([1.0, 1e-12, 1.0]), np.ones(3), np.zeros(3), 0.0)
    with pytest.raises(ScatteringError) as e:
        reflection(tp)
    assert e.value.code == ErrorCode.SPECTRAL_SINGULARITY
    assert e.value.details["index"] == 1


def test_small_gaussian_has_no_eigenvalues():
    sd = direct_map(gaussian_sample())
    assert sd.n_solitons == 0
    assert np.max(np.abs(sd.rho)) > 1e-3
    print("✓ Gaussian fixture is purely dispersive")


def test_planted_soliton_is_recovered():
    expected = planted_data(1)
    q = planted_sample(1)
    solver = JostSolver(q)

    eigenvalues = find_eigenvalues(q, solver=solver)
    assert len(eigenvalues) == 1
    assert abs(eigenvalues[0] - expected.eigenvalues[0]) < 1e-5

    eig = norming_constant(q, eigenvalues[0], solver=solver)
    assert abs(eig.C_k / expected.norming_constants[0] - 1.0) < 1e-3
    assert eig.residual < 1e-6

    sd = direct_map(q)
    assert sd.n_solitons == 1
    assert np.max(np.abs(sd.rho)) < 1e-4
    print(f"✓ Recovered eigenvalue {sd.eigenvalues[0]:.8f}")


def test_norming_constant_rejects_non_zero():
    q = planted_sample(1)
    with pytest.raises(ScatteringError) as e:
        norming_constant(q, 0.3 + 0.3j)
    assert e.value.code == ErrorCode.ILL_CONDITIONED


class _DoubleZero:
    """Stands in for a JostSolver whose alpha_breve is (lam - z0)^2."""

    def __init__(self, z0: complex):
        self.z0 = z0

    def alpha_breve(self, lam):
        return (np.atleast_1d(np.asarray(lam, dtype=complex)) - self.z0) ** 2


def test_norming_constant_rejects_double_zero():
    z0 = 0.2 + 0.5j
    with pytest.raises(ScatteringError) as e:
        norming_constant(planted_sample(1), z0, solver=_DoubleZero(z0))
    assert e.value.code == ErrorCode.ILL_CONDITIONED
    assert e.value.details["derivative"] < 1e-8


def _pair_sample():
    params = (SolitonParams(1.64, 2.0, -3.0), SolitonParams(1.8, -1.2, 3.0, 0.5))
    data = ReflectionlessData(tuple(DiscreteDatum(p.eigenvalue, p.norming_constant) for p in params))
    return data, planted_potential(data, -30.0, 30.0, 2401)


def test_two_soliton_winding_and_recovery():
    data, q = _pair_sample()
    assert np.allclose(data.eigenvalues, [-0.5 + 0.4j, 0.3 + 0.6j])
    solver = JostSolver(q)
    count, _ = EigenvalueSearch(solver, DEFAULT_CONFIG["scattering"]).winding((-4.0, 4.0, 1e-3, 4.0))
    assert count == 2

    found = find_eigenvalues(q, solver=solver)
    assert np.max(np.abs(np.array(found) - np.array(data.eigenvalues))) < 1e-5
    for lam, C in zip(found, data.norming_constants):
        eig = norming_constant(q, lam, solver=solver)
        assert eig.residual < 1e-6
        assert abs(eig.C_k / C - 1.0) < 1e-3
    print("✓ Two-soliton spectrum winds twice and is recovered")


@pytest.mark.parametrize("n_solitons", [2, 3])
def test_planted_multi_solitons_are_recovered(n_solitons):
    expected = planted_data(n_solitons)
    sd = direct_map(planted_sample(n_solitons))
    assert sd.n_solitons == n_solitons
    order = np.argsort(np.real(expected.eigenvalues))
    assert np.max(np.abs(sd.eigenvalues - expected.eigenvalues[order])) < 1e-5
    assert np.max(np.abs(sd.norming_constants / expected.norming_constants[order] - 1.0)) < 1e-3
    assert np.max(np.abs(sd.rho)) < 1e-4


def test_eigenvalue_box_must_be_in_upper_half_plane():
    with pytest.raises(ScatteringError) as e:
        find_eigenvalues(gaussian_sample(), box=(-1.0, 1.0, -0.5, 1.0))
    assert e.value.code == ErrorCode.DOMAIN


def test_jost_columns_against_ode_integration():
    lam = 1.0

    def q_func(x):
        return 0.1 * np.exp(-x ** 2)

    q = PotentialSample.from_function(q_func, -8.0, 8.0, 3201)
    x = q.x

    column = solve_jost(q, lam, Side.MINUS, Column.FIRST)
    oracle = solve_ivp(_jost_ode(q_func, lam, 1j * lam), (x[0], x[-1]), np.array([1.0, 0.0], dtype=complex),
                       method="DOP853", t_eval=x, rtol=1e-12, atol=1e-14)
    assert np.max(np.abs(column.values - oracle.y.T)) < 1e-8

    column = solve_jost(q, lam, Side.PLUS, Column.SECOND)
    oracle = solve_ivp(_jost_ode(q_func, lam, -1j * lam), (x[-1], x[0]), np.array([0.0, 1.0], dtype=complex),
                       method="DOP853", t_eval=x[::-1], rtol=1e-12, atol=1e-14)
    assert np.max(np.abs(column.values[::-1] - oracle.y.T)) < 1e-8
    print("✓ Jost columns agree with an independent ODE integration")


def test_scattering_data_is_lipschitz_in_the_potential():
    base = planted_data(1)
    constants = []
    for eta in (0.01, 0.02, 0.03):
        sd = direct_map(soliton_radiation_sample(1, eta))
        assert sd.n_solitons == 1
        change = (np.max(np.abs(sd.rho)) + abs(sd.eigenvalues[0] - base.eigenvalues[0])
                  + abs(sd.norming_constants[0] - base.norming_constants[0]))
        constants.append(change / eta)
    assert max(constants) < 100.0
    assert max(constants) / min(constants) < 2.0
    print(f"✓ Scattering data moves by K eta with K in [{min(constants):.3f}, {max(constants):.3f}]")
