# tests/test_parabolic_cylinder.py
"""
Tests for D_a(z) and the local model built from it.
"""
import sys
from pathlib import Path

import mpmath
import numpy as np
import pytest

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.parabolic_cylinder import (
    kummer_m,
    lens_factor,
    model_matrix,
    parabolic_cylinder,
    parabolic_cylinder_checked,
    recurrence_residual,
)

ARGUMENTS = [0.8 + 0.3j, 2.5 - 1.0j, -1.5 + 2.0j, 9.0 * np.exp(0.25j * np.pi), 12.0 - 1.0j]


def test_integer_orders_are_hermite_functions():
    for z in ARGUMENTS:
        gauss = np.exp(-z * z / 4.0)
        assert parabolic_cylinder(0.0, z) == pytest.approx(gauss, rel=1e-12, abs=1e-300)
        assert parabolic_cylinder(1.0, z) == pytest.approx(z * gauss, rel=1e-11, abs=1e-300)
    assert parabolic_cylinder(0.0, 1.0) == pytest.approx(np.exp(-0.25), abs=1e-14)
    print("✓ D_0 and D_1 are Gaussian and z times Gaussian")


def test_complex_order_against_mpmath():
    for a in (0.3j, -1.0 + 0.4j, 0.7 - 0.2j):
        for z in ARGUMENTS:
            exact = complex(mpmath.pcfd(a, z))
            assert abs(parabolic_cylinder(a, z) - exact) <= 1e-9 * abs(exact)
    print("✓ D_a(z) agrees with mpmath")


def test_three_term_recurrence():
    for a in (0.3j, 1j, -0.5 + 0.1j):
        for z in ARGUMENTS[:3]:
            assert recurrence_residual(a, z) < 1e-10


def test_method_selection_and_scaling():
    assert parabolic_cylinder_checked(0.2j, 2.0).method == "maclaurin"
    assert parabolic_cylinder_checked(0.2j, 8.0 + 1.0j).method == "asymptotic"
    z = 7.0 + 0.5j
    scaled = parabolic_cylinder(0.2j, z, scaled=True)
    assert scaled == pytest.approx(parabolic_cylinder(0.2j, z) * np.exp(z * z / 4.0), rel=1e-12)


def test_array_evaluation_keeps_shape():
    z = np.array([[0.5, 1.0], [1.5, 2.0]], dtype=complex)
    values = parabolic_cylinder(0.0, z)
    assert values.shape == (2, 2)
    assert np.allclose(values, np.exp(-z * z / 4.0))


def test_kummer_m_elementary_case():
    # M(a, a, w) = exp(w)
    assert kummer_m(0.7 + 0.2j, 0.7 + 0.2j, 1.3) == pytest.approx(np.exp(1.3), rel=1e-14)


def test_lens_factor_sectors():
    assert np.allclose(lens_factor(1j, -0.5, 0.3), np.eye(2))
    lower = lens_factor(np.exp(0.1j), -0.5, 0.3)
    assert lower[0, 1] == 0 and lower[1, 0] == pytest.approx(0.15)
    upper = lens_factor(np.exp(-0.1j), -0.5, 0.3)
    assert upper[1, 0] == 0 and upper[0, 1] == pytest.approx(0.3)


def test_model_matrix_needs_complex_zeta():
    with pytest.raises(ValueError):
        model_matrix(2.0 + 0j, 0.01, -0.5, 0.2, 0.1j, 0.1j)
