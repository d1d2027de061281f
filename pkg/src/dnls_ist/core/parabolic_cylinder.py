# src/dnls_ist/core/parabolic_cylinder.py
"""
Parabolic-cylinder functions D_a(z) for complex order and argument, and the
exactly solvable local model built from them.

Small |z| uses the Maclaurin representation through Kummer's M; large |z|
the Poincare expansion, with the recessive exponential added beyond the
Stokes lines |arg z| = pi/2. The scaled variant returns exp(z^2/4) D_a(z),
which stays bounded along every ray the local model evaluates.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.special import rgamma

from ..utils.logger import setup_logger

logger = setup_logger(__name__)

SWITCHOVER_RADIUS = 6.0
OVERLAP_WIDTH = 0.5
AGREEMENT_TOL = 1e-8
_MAX_TERMS = 600


@dataclass(frozen=True)
class PCEvaluation:
    value: complex
    method: str
    precision_loss: bool = False
    disagreement: float = 0.0


def kummer_m(a: complex, b: complex, w: complex) -> complex:
    """Confluent hypergeometric M(a, b, w) by its power series."""
    term = 1.0 + 0j
    total = 1.0 + 0j
    for n in range(_MAX_TERMS):
        term *= (a + n) / (b + n) * w / (n + 1)
        total += term
        if abs(term) < 1e-17 * abs(total) and n > abs(w):
            break
    return total


def _maclaurin(a: complex, z: complex) -> complex:
    w = z * z / 2.0
    even = np.sqrt(np.pi) * rgamma((1.0 - a) / 2.0) * kummer_m(-a / 2.0, 0.5, w)
    odd = np.sqrt(2.0 * np.pi) * z * rgamma(-a / 2.0) * kummer_m((1.0 - a) / 2.0, 1.5, w)
    return 2.0 ** (a / 2.0) * np.exp(-z * z / 4.0) * (even - odd)


def _asymptotic_sum(first: complex, alternating: bool, z: complex) -> complex:
    """sum_s (+-1)^s (first)_{2s} / (s! (2 z^2)^s), optimally truncated."""
    inv = 1.0 / (2.0 * z * z)
    term = 1.0 + 0j
    total = 1.0 + 0j
    sign = -1.0 if alternating else 1.0
    previous = np.inf
    for s in range(_MAX_TERMS):
        term *= sign * (first + 2 * s) * (first + 2 * s + 1) / (s + 1) * inv
        size = abs(term)
        if size > previous:
            break
        total += term
        previous = size
        if size < 1e-17 * abs(total):
            break
    return total


def _asymptotic_scaled(a: complex, z: complex) -> complex:
    """exp(z^2/4) D_a(z) from the large-|z| expansion."""
    value = z ** a * _asymptotic_sum(-a, True, z)
    phase = np.angle(z)
    if abs(phase) > np.pi / 2.0:
        sign = 1.0 if phase > 0 else -1.0
        coefficient = sign * 1j * np.sqrt(2.0 * np.pi) * rgamma(-a) * np.exp(sign * 1j * np.pi * (a + 0.5))
        value += coefficient * np.exp(z * z / 2.0) * z ** (-a - 1.0) * _asymptotic_sum(a + 1.0, False, z)
    return value


def parabolic_cylinder_checked(a: complex, z: complex, scaled: bool = False,
                               switchover: float = SWITCHOVER_RADIUS) -> PCEvaluation:
    """
    D_a(z) together with the method used and the overlap diagnostic.

    Inside the annulus |z| in [switchover - 0.5, switchover + 0.5] both series
    are evaluated; a relative disagreement above 1e-8 sets precision_loss.

    Args:
        a: Order
        z: Argument
        scaled: Return exp(z^2/4) D_a(z) instead
        switchover: Radius separating the two expansions
    """
    a = complex(a)
    z = complex(z)
    radius = abs(z)
    if radius < switchover - OVERLAP_WIDTH:
        value = _maclaurin(a, z)
        return PCEvaluation(value * np.exp(z * z / 4.0) if scaled else value, "maclaurin")
    if radius > switchover + OVERLAP_WIDTH:
        value = _asymptotic_scaled(a, z)
        return PCEvaluation(value if scaled else value * np.exp(-z * z / 4.0), "asymptotic")

    series = _maclaurin(a, z) * np.exp(z * z / 4.0)
    expansion = _asymptotic_scaled(a, z)
    disagreement = float(abs(series - expansion) / max(abs(expansion), 1e-300))
    loss = disagreement > AGREEMENT_TOL
    if loss:
        logger.warning(f"PRECISION_LOSS: D_{a}({z}) expansions disagree by {disagreement:.2e}")
    value = expansion if radius >= switchover else series
    return PCEvaluation(value if scaled else value * np.exp(-z * z / 4.0),
                        "asymptotic" if radius >= switchover else "maclaurin", loss, disagreement)


def parabolic_cylinder(a: complex, z, scaled: bool = False, switchover: float = SWITCHOVER_RADIUS):
    """D_a(z) (or exp(z^2/4) D_a(z) when scaled) for scalar or array z."""
    z_array = np.asarray(z, dtype=complex)
    values = np.array([parabolic_cylinder_checked(a, zi, scaled, switchover).value for zi in z_array.ravel()],
                      dtype=complex).reshape(z_array.shape)
    return complex(values) if z_array.ndim == 0 else values


def recurrence_residual(a: complex, z: complex) -> float:
    """|D_{a+1}(z) - z D_a(z) + a D_{a-1}(z)| relative to the largest term."""
    upper = parabolic_cylinder(a + 1.0, z)
    middle = parabolic_cylinder(a, z)
    lower = parabolic_cylinder(a - 1.0, z)
    scale = max(abs(upper), abs(z * middle), abs(a * lower), 1e-300)
    return float(abs(upper - z * middle + a * lower) / scale)


def lens_factor(zeta: complex, lambda0: float, rho_abs: float) -> np.ndarray:
    """Sector-wise unipotent factor that makes the model continuous across the real zeta-axis."""
    phase = np.angle(zeta)
    y = lambda0 * rho_abs ** 2
    if 0.0 < phase < np.pi / 4.0:
        return np.array([[1.0, 0.0], [-lambda0 * rho_abs, 1.0]], dtype=complex)
    if -np.pi / 4.0 < phase < 0.0:
        return np.array([[1.0, rho_abs], [0.0, 1.0]], dtype=complex)
    if phase > 3.0 * np.pi / 4.0:
        return np.array([[1.0, -rho_abs / (1.0 + y)], [0.0, 1.0]], dtype=complex)
    if phase < -3.0 * np.pi / 4.0:
        return np.array([[1.0, 0.0], [lambda0 * rho_abs / (1.0 + y), 1.0]], dtype=complex)
    return np.eye(2, dtype=complex)


def model_matrix(zeta: complex, kappa: float, lambda0: float, rho_abs: float,
                 beta12: complex, beta21: complex, switchover: float = SWITCHOVER_RADIUS) -> Tuple[np.ndarray, bool]:
    """
    Phi(zeta) L(zeta) zeta^{-i kappa sigma3} exp(i zeta^2 sigma3 / 4), without the omega conjugation.

    Each D_a is evaluated in scaled form so that the Gaussian factors cancel
    analytically; the result is bounded for all zeta off the real axis.

    Returns:
        (2x2 matrix, precision_loss flag)
    """
    zeta = complex(zeta)
    if zeta.imag == 0.0:
        raise ValueError("the local model is evaluated off the real zeta-axis")
    upper = zeta.imag > 0
    if upper:
        w1, w2 = zeta * np.exp(-3j * np.pi / 4.0), zeta * np.exp(-1j * np.pi / 4.0)
        c11, c22 = np.exp(-3.0 * np.pi * kappa / 4.0), np.exp(np.pi * kappa / 4.0)
        c12 = -1j * beta12 * np.exp(np.pi * (kappa - 1j) / 4.0)
        c21 = 1j * beta21 * np.exp(-3.0 * np.pi * (kappa + 1j) / 4.0)
    else:
        w1, w2 = zeta * np.exp(1j * np.pi / 4.0), zeta * np.exp(3j * np.pi / 4.0)
        c11, c22 = np.exp(np.pi * kappa / 4.0), np.exp(-3.0 * np.pi * kappa / 4.0)
        c12 = -1j * beta12 * np.exp(-3.0 * np.pi * (kappa - 1j) / 4.0)
        c21 = 1j * beta21 * np.exp(np.pi * (kappa + 1j) / 4.0)

    evaluations = [
        parabolic_cylinder_checked(1j * kappa, w1, True, switchover),
        parabolic_cylinder_checked(1j * kappa - 1.0, w1, True, switchover),
        parabolic_cylinder_checked(-1j * kappa - 1.0, w2, True, switchover),
        parabolic_cylinder_checked(-1j * kappa, w2, True, switchover),
    ]
    d11, d21, d12, d22 = (e.value for e in evaluations)
    power = np.exp(-1j * kappa * np.log(zeta))
    # columns of Phi times zeta^{-i kappa sigma3} exp(i zeta^2 sigma3/4)
    first = np.array([c11 * d11, c21 * d21]) * power
    second = np.array([c12 * d12, c22 * d22]) / power

    lens = lens_factor(zeta, lambda0, rho_abs)
    out = np.column_stack([first, second])
    # the lens exponentials decay inside their own sectors only
    exponent = -2j * kappa * np.log(zeta) + 0.5j * zeta * zeta
    if lens[1, 0] != 0:
        out[:, 0] = first + second * lens[1, 0] * np.exp(exponent)
    if lens[0, 1] != 0:
        out[:, 1] = second + first * lens[0, 1] * np.exp(-exponent)
    return out, any(e.precision_loss for e in evaluations)
