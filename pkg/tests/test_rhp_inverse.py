# tests/test_rhp_inverse.py
"""
Tests for the Beals-Coifman inverse map.
"""
import logging
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.special import dawsn

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.direct_scattering import direct_map
from dnls_ist.core.fixtures import gaussian_sample, planted_data, synthetic_scattering, zero_scattering
from dnls_ist.core.rhp_inverse import (
    CauchyOperator,
    assemble_and_solve_bc,
    build_contour,
    inverse_map,
    jump_factors,
    matrix_from_first_row,
    reconstruct_q,
)
from dnls_ist.core.solitons import SolitonParams, nsoliton_q, one_soliton_q
from dnls_ist.core.types import PhaseParams, PotentialKind, ScatteringData, UniformGrid
from dnls_ist.utils.errors import ErrorCode, ScatteringError


def _soliton_data(params: SolitonParams) -> ScatteringData:
    return ScatteringData.reflectionless([(params.eigenvalue, params.norming_constant)])


def test_contour_layout():
    sd = ScatteringData.reflectionless(planted_data(2).pairs)
    contour = build_contour(sd)
    assert contour.n_real % 2 == 1
    assert len(contour.circles) == 4
    assert contour.size == contour.n_real + 4 * 64
    for circle in contour.circles:
        assert abs(circle.center.imag) > circle.radius


def test_cauchy_projections_differ_by_identity():
    sd = ScatteringData.reflectionless(planted_data(1).pairs)
    ops = CauchyOperator(build_contour(sd))
    assert np.allclose(ops.plus - ops.minus, np.eye(ops.size))


def test_zero_data_reconstructs_zero():
    q = inverse_map(zero_scattering(), np.linspace(-2.0, 2.0, 5))
    assert q.kind == PotentialKind.Q_GAUGE
    assert np.max(np.abs(q.values)) == 0.0


def test_one_soliton_at_time_zero():
    params = SolitonParams(1.0, 0.0)
    x = np.linspace(-4.0, 4.0, 9)
    q = inverse_map(_soliton_data(params), x)
    assert np.max(np.abs(q.values - one_soliton_q(params, x))) < 1e-7
    print("✓ Inverse map reproduces the solitary wave on both flip branches")


def test_moving_soliton_at_later_time():
    params = SolitonParams(1.0, 1.0, -1.0, 0.4)
    t = 2.0
    x = np.linspace(-2.0, 4.0, 7)
    q = inverse_map(_soliton_data(params), UniformGrid(-2.0, 1.0, 7), t)
    assert np.max(np.abs(q.values - one_soliton_q(params, x, t))) < 1e-7


def test_two_soliton_agrees_with_residue_solver():
    data = planted_data(2)
    x = np.linspace(-6.0, 6.0, 13)
    q = inverse_map(ScatteringData.reflectionless(data.pairs), x)
    assert np.max(np.abs(q.values - nsoliton_q(data, x))) < 1e-7


def test_flipped_eigenvalues_are_marked():
    sd = _soliton_data(SolitonParams(1.0, 0.0))
    contour = build_contour(sd)
    assert jump_factors(sd, contour, -5.0, 0.0).flagged == (True,)
    assert jump_factors(sd, contour, 5.0, 0.0).flagged == (False,)


def test_solution_residual_and_unit_determinant():
    sd = ScatteringData.reflectionless(planted_data(2).pairs)
    contour = build_contour(sd)
    nu = assemble_and_solve_bc(sd, contour, 0.5, 0.0)
    assert nu.residual < 1e-10
    assert abs(reconstruct_q(nu) - nsoliton_q(planted_data(2), 0.5)) < 1e-7
    with pytest.raises(ScatteringError) as e:
        reconstruct_q(nu, x=1.0)
    assert e.value.code == ErrorCode.DOMAIN

    z = np.array([2.0 + 1.5j, -3.0 - 2.0j])
    matrix = matrix_from_first_row(nu, z)
    assert np.allclose(np.linalg.det(matrix), 1.0, atol=1e-8)


def test_round_trip_of_dispersive_potential():
    q0 = gaussian_sample()
    x = np.linspace(-3.0, 3.0, 7)
    q = inverse_map(direct_map(q0), x)
    assert np.max(np.abs(q.values - 0.3 * np.exp(-x ** 2))) < 1e-3
    print("✓ inverse(direct(q0)) returns q0")


def test_contour_clusters_around_the_stationary_point():
    sd = synthetic_scattering()
    phase = PhaseParams.from_xt(2.0, 4.0)
    contour = build_contour(sd, phase=phase)
    nodes = contour.real_nodes
    spacing = np.diff(nodes)
    assert np.all(spacing > 0)
    assert nodes[0] <= -3.9 and nodes[-1] >= 3.9
    near = spacing[np.argmin(np.abs(nodes[:-1] - phase.lambda0))]
    assert near < 0.3 * spacing[0] and near < 0.3 * spacing[-1]
    # the weights integrate the node map exactly enough for smooth integrands
    assert np.sum(contour.real_weights * np.exp(-nodes ** 2)) == pytest.approx(np.sqrt(np.pi), rel=1e-7)

    uniform = build_contour(sd)
    assert np.allclose(np.diff(uniform.real_nodes), uniform.real_spacing)


def test_graded_hilbert_rule_matches_dawson():
    sd = synthetic_scattering()
    for contour in (build_contour(sd), build_contour(sd, phase=PhaseParams.from_xt(2.0, 4.0))):
        ops = CauchyOperator(contour)
        n = contour.n_real
        lam = contour.real_nodes
        values = ops.minus[:n, :n] @ np.exp(-lam ** 2)
        # C-f = -f/2 + (i/sqrt(pi)) F(lam) for f = exp(-lam^2), F the Dawson function
        expected = -0.5 * np.exp(-lam ** 2) + 1j * dawsn(lam) / np.sqrt(np.pi)
        inner = np.abs(lam) < 3.0
        assert np.max(np.abs(values - expected)[inner]) < 1e-7
    print("✓ Odd-offset rule stays exact on graded nodes")


def test_long_time_contour_warns(caplog):
    sd = synthetic_scattering()
    with caplog.at_level(logging.WARNING, logger="dnls_ist.core.rhp_inverse"):
        build_contour(sd, phase=PhaseParams(0.0, 10.0))
    assert "asymptotic_q" not in caplog.text
    with caplog.at_level(logging.WARNING, logger="dnls_ist.core.rhp_inverse"):
        build_contour(sd, phase=PhaseParams(0.0, 100.0))
    assert "asymptotic_q" in caplog.text
