# src/dnls_ist/core/asymptotics.py
"""
Large-time evaluators: kappa, the scalar function delta, modulated norming
constants, the alpha0 phase, the parabolic-cylinder coefficients, the
dispersive correction, the soliton-resolution profiles and the per-soliton
phase shifts.

    kappa(lam)  = -(1/2pi) log(1 + lam |rho(lam)|^2)
    delta(z)    = exp(i int_{-inf}^{lambda0} kappa(s) / (s - z) ds)
    lambda0     = -x / (4t)

All kappa-integrals are truncated to the support where |kappa| exceeds the
configured cutoff and evaluated with adaptive Gauss-Kronrod quadrature.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, trapezoid
from scipy.interpolate import CubicSpline
from scipy.special import rgamma

from .evolution import ReflectionInterpolant
from .parabolic_cylinder import model_matrix
from .solitons import (
    ReflectionlessData,
    SolitonMatrix,
    SolitonParams,
    nsoliton_matrix,
    nsoliton_q,
    one_soliton_q,
    one_soliton_u,
)
from .types import DiscreteDatum, ScatteringData
from ..utils.errors import ErrorCode, ScatteringError
from ..utils.helpers import DEFAULT_CONFIG
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

_QUAD_LIMIT = 400
_EPSABS = 1e-13
_EPSREL = 1e-11


def _asymptotic_settings(config: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    settings = dict(DEFAULT_CONFIG["asymptotics"])
    if config:
        settings.update(config.get("asymptotics", config))
    return settings


def _quad_complex(func, a: float, b: float, points: Optional[Sequence[float]] = None) -> complex:
    """Adaptive quadrature of a complex integrand, real and imaginary parts separately."""
    if not b > a:
        return 0j
    inner = [p for p in (points or ()) if a < p < b]
    options = dict(limit=_QUAD_LIMIT, epsabs=_EPSABS, epsrel=_EPSREL, points=inner or None)
    real, _ = quad(lambda s: complex(func(s)).real, a, b, **options)
    imag, _ = quad(lambda s: complex(func(s)).imag, a, b, **options)
    return complex(real, imag)


def _log1p_ratio(y):
    """log(1 + y) / y, equal to 1 at y = 0."""
    y = np.asarray(y, dtype=float)
    safe = np.where(y == 0.0, 1.0, y)
    return np.where(y == 0.0, 1.0, np.log1p(safe) / safe)


def blaschke(z, lam):
    """Delta_j(z) = (z - lam_j) / (z - conj(lam_j))."""
    return (z - lam) / (z - np.conj(lam))


class KappaFunction:
    """
    kappa(lam) on the scattering grid, cubic-spline interpolated and zero
    outside it.

    Args:
        sd: Scattering data
        cutoff: |kappa| below this is treated as outside the support
    """

    def __init__(self, sd: ScatteringData, cutoff: float = 1e-12):
        lam = sd.lam
        y = lam * np.abs(sd.rho) ** 2
        if np.any(1.0 + y <= 0.0):
            bad = np.flatnonzero(1.0 + y <= 0.0)
            raise ScatteringError(ErrorCode.SPECTRAL_SINGULARITY,
                                  "1 + lam |rho|^2 vanishes on the grid",
                                  {"indices": bad[:10].tolist()})
        self.samples = -np.log1p(y) / (2.0 * np.pi)
        self.lo = sd.lambda_grid.x0
        self.hi = sd.lambda_grid.end
        self.cutoff = cutoff
        self._spline = CubicSpline(lam, self.samples) if lam.size >= 4 else None
        active = np.flatnonzero(np.abs(self.samples) >= cutoff)
        if active.size:
            dx = sd.lambda_grid.dx
            self.support: Tuple[float, float] = (max(self.lo, lam[active[0]] - dx),
                                                 min(self.hi, lam[active[-1]] + dx))
        else:
            self.support = (0.0, 0.0)

    @property
    def empty(self) -> bool:
        return not self.support[1] > self.support[0]

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.samples))) if self.samples.size else 0.0

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        clipped = np.clip(lam, self.lo, self.hi)
        if self._spline is not None:
            values = self._spline(clipped)
        else:
            values = np.interp(clipped, np.linspace(self.lo, self.hi, self.samples.size), self.samples)
        out = np.where((lam >= self.lo) & (lam <= self.hi), values, 0.0)
        return float(out) if out.ndim == 0 else out

    def integral(self, a: float, b: float, weight=None) -> complex:
        """int_a^b kappa(s) weight(s) ds, clipped to the support."""
        a, b = max(a, self.support[0]), min(b, self.support[1])
        if weight is None:
            return _quad_complex(lambda s: self(s), a, b)
        return _quad_complex(lambda s: self(s) * weight(s), a, b)


def kappa(sd: ScatteringData, lam, cutoff: float = 1e-12):
    """kappa(lam) = -(1/2pi) log(1 + lam |rho(lam)|^2)."""
    return KappaFunction(sd, cutoff)(lam)


def _branch_log(w: complex, side: Optional[int]) -> complex:
    """Principal log; on the negative axis the side flag picks the boundary value."""
    if w.imag == 0.0 and w.real < 0.0:
        if side is None:
            return complex(np.log(-w.real), np.pi)
        return complex(np.log(-w.real), -side * np.pi)
    return complex(np.log(w))


@dataclass(frozen=True, eq=False)
class DeltaEval:
    """
    delta(z) for one critical point lambda0.

    The Cauchy integral is evaluated after subtracting kappa at the real
    projection of z, whose contribution is added back in closed form; this
    keeps the quadrature smooth near the cut and at lambda0.

    Args:
        kappa_fn: kappa of the scattering data
        lambda0: Critical point, the cut is (-inf, lambda0]
    """

    kappa_fn: KappaFunction
    lambda0: float

    @property
    def lower(self) -> float:
        return self.kappa_fn.support[0]

    @property
    def upper(self) -> float:
        return min(self.lambda0, self.kappa_fn.support[1])

    @property
    def trivial(self) -> bool:
        return not self.upper > self.lower

    @cached_property
    def kappa0(self) -> float:
        return float(self.kappa_fn(self.lambda0))

    @cached_property
    def beta0(self) -> float:
        """Regular part of log(delta) at lambda0: delta ~ (z - lambda0)^{i kappa0} exp(i beta0)."""
        if self.trivial:
            return 0.0
        k0, a, b = self.kappa0, self.lower, self.upper
        value = _quad_complex(lambda s: (self.kappa_fn(s) - k0) / (s - self.lambda0), a, b).real
        if k0 != 0.0 and self.lambda0 > a:
            value -= k0 * np.log(self.lambda0 - a)
        return float(value)

    @cached_property
    def moments(self) -> Tuple[float, float]:
        if self.trivial:
            return 0.0, 0.0
        m0 = self.kappa_fn.integral(self.lower, self.upper).real
        m1 = self.kappa_fn.integral(self.lower, self.upper, lambda s: s).real
        return float(m0), float(m1)

    @property
    def delta1(self) -> complex:
        """z (delta(z) - 1) -> delta1 = -i int kappa."""
        return -1j * self.moments[0]

    @property
    def delta2(self) -> complex:
        return -1j * self.moments[1] + 0.5 * self.delta1 ** 2

    def log_delta(self, z: complex, side: Optional[int] = None) -> complex:
        """
        log delta(z); side = +1 / -1 selects the boundary value from above / below
        when z lies on the cut.
        """
        z = complex(z)
        on_cut = z.imag == 0.0 and z.real <= self.lambda0
        if on_cut and side is None:
            logger.error(f"delta requested on the cut at {z.real} without a side")
            raise ScatteringError(ErrorCode.ON_CUT, f"z = {z.real} lies on (-inf, {self.lambda0}]",
                                  {"z": z.real, "lambda0": self.lambda0})
        if z.imag == 0.0 and z.real == self.lambda0 and self.kappa0 != 0.0:
            raise ScatteringError(ErrorCode.ON_CUT, "delta is singular at lambda0", {"lambda0": self.lambda0})
        if self.trivial:
            return 0j
        a, b = self.lower, self.upper
        anchor = min(max(z.real, a), b)
        k_star = float(self.kappa_fn(anchor))
        regular = _quad_complex(lambda s: (self.kappa_fn(s) - k_star) / (s - z), a, b, [anchor])
        flag = side if on_cut else None
        closed = 0j
        if k_star != 0.0:
            closed = k_star * (_branch_log(b - z, flag) - _branch_log(a - z, flag))
        return 1j * (regular + closed)

    def __call__(self, z, side: Optional[int] = None):
        points = np.asarray(z, dtype=complex)
        values = np.array([np.exp(self.log_delta(p, side)) for p in points.ravel()], dtype=complex)
        return complex(values[0]) if points.ndim == 0 else values.reshape(points.shape)


def delta_evaluator(sd: ScatteringData, lambda0: float, config: Optional[Dict[str, Any]] = None) -> DeltaEval:
    settings = _asymptotic_settings(config)
    return DeltaEval(KappaFunction(sd, settings["kappa_cut"]), float(lambda0))


def delta_eval(sd: ScatteringData, lambda0: float, z, side: Optional[int] = None,
               config: Optional[Dict[str, Any]] = None):
    """
    delta(z) for the cut (-inf, lambda0].

    Args:
        sd: Scattering data at t = 0
        lambda0: Critical point
        z: Evaluation point(s)
        side: +1 / -1 for boundary values on the cut

    Returns:
        Complex value (array for array z)
    """
    return delta_evaluator(sd, lambda0, config)(z, side)


@dataclass(frozen=True)
class ConeSelection:
    """
    Space-time cone x = x0 + v t with x1 <= x0 <= x2, v1 <= v <= v2.

    The matching spectral interval is I = [-v2/4, -v1/4]; eigenvalues left
    of it belong to faster solitons, right of it to slower ones.
    """

    v1: float
    v2: float
    x1: float
    x2: float

    def __post_init__(self):
        if not (self.v1 < self.v2 and self.x1 <= self.x2):
            raise ScatteringError(ErrorCode.DOMAIN, f"invalid cone {self}")

    @property
    def interval(self) -> Tuple[float, float]:
        return -self.v2 / 4.0, -self.v1 / 4.0

    @property
    def center(self) -> float:
        lo, hi = self.interval
        return 0.5 * (lo + hi)

    def contains(self, x: float, t: float) -> bool:
        return self.x1 + self.v1 * t <= x <= self.x2 + self.v2 * t

    def partition(self, eigenvalues: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Index arrays (inside, faster, slower)."""
        lo, hi = self.interval
        nu = np.real(eigenvalues)
        inside = np.flatnonzero((nu >= lo) & (nu <= hi))
        faster = np.flatnonzero(nu < lo)
        slower = np.flatnonzero(nu > hi)
        return inside, faster, slower

    def n_inside(self, sd: ScatteringData) -> int:
        return int(self.partition(sd.eigenvalues)[0].size)


def modulated_constants(sd: ScatteringData, cone: ConeSelection, lambda0: Optional[float] = None,
                        config: Optional[Dict[str, Any]] = None) -> ReflectionlessData:
    """
    Reflectionless data D_I of the solitons inside the cone.

        C^_k = C_k prod_{faster j} Delta_j(lambda_k)^2 exp(-2i int_{-inf}^{lambda0} kappa(s)/(s - lambda_k) ds)

    Args:
        sd: Scattering data at t = 0
        cone: Cone selection
        lambda0: Critical point (default: center of the cone interval)
    """
    lam = sd.eigenvalues
    inside, faster, _ = cone.partition(lam)
    lambda0 = cone.center if lambda0 is None else float(lambda0)
    delta = delta_evaluator(sd, lambda0, config)
    pairs = []
    for k in inside:
        factor = np.prod([blaschke(lam[k], lam[j]) ** 2 for j in faster]) if faster.size else 1.0
        C_hat = sd.discrete[k].C * factor * np.exp(-2.0 * delta.log_delta(lam[k]))
        pairs.append(DiscreteDatum(lam[k], complex(C_hat)))
    logger.debug(f"Modulated {len(pairs)} of {lam.size} norming constant(s) at lambda0={lambda0:.6g}")
    return ReflectionlessData(tuple(pairs))


def modulated_constants_at(sd: ScatteringData, lambda0: float,
                           config: Optional[Dict[str, Any]] = None) -> ReflectionlessData:
    """All eigenvalues with C~_k = C_k delta(lambda_k)^{-2}, the q-level soliton model."""
    delta = delta_evaluator(sd, lambda0, config)
    return ReflectionlessData(tuple(
        DiscreteDatum(d.lam, complex(d.C * np.exp(-2.0 * delta.log_delta(d.lam)))) for d in sd.discrete
    ))


def _radiation_phase_integral(sd: ScatteringData, lo: float, hi: float) -> float:
    """(1/pi) int_lo^hi log(1 + lam |rho|^2) / lam dlam, regular at lam = 0."""
    lo, hi = max(lo, sd.lambda_grid.x0), min(hi, sd.lambda_grid.end)
    if not hi > lo:
        return 0.0
    if not np.any(sd.rho):
        return 0.0
    rho = ReflectionInterpolant(sd)

    def integrand(s):
        r2 = abs(complex(rho(s))) ** 2
        return r2 * float(_log1p_ratio(s * r2))

    value, _ = quad(integrand, lo, hi, limit=_QUAD_LIMIT, epsabs=_EPSABS, epsrel=_EPSREL,
                    points=[0.0] if lo < 0.0 < hi else None)
    return float(value) / np.pi


def alpha0(sd: ScatteringData, lambda0: float, sign: int, cut: Optional[float] = None) -> float:
    """
    Phase correction alpha0(lambda0, +-).

        alpha0(lambda0, +) = (1/pi) int_{-inf}^{lambda0} log(1 + lam|rho|^2)/lam + 4 sum_{Re lam_k < cut} arg lam_k
        alpha0(lambda0, -) = (1/pi) int_{lambda0}^{inf} log(1 + lam|rho|^2)/lam + 4 sum_{Re lam_k > cut} arg lam_k

    Args:
        sd: Scattering data
        lambda0: Split point of the radiation integral
        sign: +1 or -1
        cut: Split point of the eigenvalue sum (default lambda0)
    """
    if sign not in (1, -1):
        raise ScatteringError(ErrorCode.DOMAIN, f"sign must be +1 or -1, got {sign}")
    cut = lambda0 if cut is None else cut
    lam = sd.eigenvalues
    if sign > 0:
        radiation = _radiation_phase_integral(sd, -np.inf, lambda0)
        chosen = lam[lam.real < cut]
    else:
        radiation = _radiation_phase_integral(sd, lambda0, np.inf)
        chosen = lam[lam.real > cut]
    return float(radiation + 4.0 * np.sum(np.angle(chosen)))


def mass_trace(sd: ScatteringData) -> float:
    """||q||^2 from the scattering data: (1/pi) int log(1 + lam|rho|^2)/lam + 4 sum arg lam_k."""
    return float(_radiation_phase_integral(sd, -np.inf, np.inf) + 4.0 * np.sum(np.angle(sd.eigenvalues)))


def _check_time(t: float, settings: Dict[str, Any]) -> None:
    if not t > 1.0:
        logger.error(f"Large-time formulas requested at t={t}")
        raise ScatteringError(ErrorCode.DOMAIN, f"large-time evaluators need t > 1, got {t}", {"t": t})
    if t < settings["t_min"]:
        logger.warning(f"t={t} is below t_min={settings['t_min']}; asymptotic formulas are not yet accurate")


@dataclass(frozen=True)
class PCCoeffs:
    """
    Parabolic-cylinder data at (x, t): beta12, beta21 and the phase omega.

    The local variable is zeta = sqrt(8t) (z - lambda0).
    """

    lambda0: float
    t: float
    kappa: float
    rho_abs: float
    beta12: complex
    beta21: complex
    omega: float
    zero_reflection: bool = False

    @property
    def product(self) -> complex:
        return self.beta12 * self.beta21

    def zeta(self, z):
        return np.sqrt(8.0 * self.t) * (np.asarray(z) - self.lambda0)

    def leading_coefficient(self) -> np.ndarray:
        """Matrix M with P^pc = I + M / zeta + O(zeta^-2)."""
        return np.array([[0.0, -1j * self.beta12 * np.exp(1j * self.omega)],
                         [1j * self.beta21 * np.exp(-1j * self.omega), 0.0]], dtype=complex)


def pc_betas(lambda0: float, rho_abs: float) -> Tuple[float, complex, complex]:
    """
    (kappa, beta12, beta21) written through 1/Gamma so that both stay finite
    as rho -> 0.
    """
    y = lambda0 * rho_abs ** 2
    if not 1.0 + y > 0.0:
        raise ScatteringError(ErrorCode.SPECTRAL_SINGULARITY, f"1 + lam|rho|^2 = {1.0 + y} at lambda0={lambda0}")
    k = -np.log1p(y) / (2.0 * np.pi)
    g = float(_log1p_ratio(y))
    root = np.sqrt(2.0 * np.pi)
    damping = np.exp(-np.pi * k / 2.0)
    beta12 = 1j * root * damping * np.exp(0.25j * np.pi) * rho_abs * g * rgamma(1.0 - 1j * k) / (2.0 * np.pi)
    beta21 = 1j * root * damping * np.exp(-0.25j * np.pi) * lambda0 * rho_abs * g * rgamma(1.0 + 1j * k) / (2.0 * np.pi)
    return float(k), complex(beta12), complex(beta21)


def pc_coeffs(sd: ScatteringData, x: float, t: float, config: Optional[Dict[str, Any]] = None) -> PCCoeffs:
    """
    beta12, beta21 and omega(x, t) = arg rho(lambda0) + 2 beta(lambda0) - kappa log(8t) + 4 t lambda0^2.

    Below the zero-reflection threshold the coefficients are zero and the
    returned object carries zero_reflection=True.
    """
    settings = _asymptotic_settings(config)
    if not t > 0:
        raise ScatteringError(ErrorCode.DOMAIN, f"pc_coeffs needs t > 0, got {t}", {"t": t})
    lambda0 = -float(x) / (4.0 * float(t))
    rho0 = complex(ReflectionInterpolant(sd)(lambda0))
    if abs(rho0) < settings["zero_reflection"]:
        logger.warning(f"ZERO_REFLECTION: |rho({lambda0:.6g})| = {abs(rho0):.2e}, dispersive term vanishes")
        return PCCoeffs(lambda0, float(t), 0.0, abs(rho0), 0j, 0j, 0.0, True)
    k, beta12, beta21 = pc_betas(lambda0, abs(rho0))
    delta = delta_evaluator(sd, lambda0, config)
    omega = float(np.angle(rho0) + 2.0 * delta.beta0 - k * np.log(8.0 * t) + 4.0 * t * lambda0 ** 2)
    return PCCoeffs(lambda0, float(t), k, abs(rho0), beta12, beta21, omega)


def pc_model_matrix(zeta, sd: ScatteringData, x: float, t: float, config: Optional[Dict[str, Any]] = None,
                    coeffs: Optional[PCCoeffs] = None) -> np.ndarray:
    """
    P^pc(zeta) = exp(i omega sigma3/2) Phi L zeta^{-i kappa sigma3} exp(i zeta^2 sigma3/4) exp(-i omega sigma3/2).

    Returns:
        (2, 2) for scalar zeta, (..., 2, 2) otherwise
    """
    settings = _asymptotic_settings(config)
    coeffs = coeffs or pc_coeffs(sd, x, t, config)
    points = np.asarray(zeta, dtype=complex)
    out = np.empty(points.shape + (2, 2), dtype=complex)
    flat = out.reshape(-1, 2, 2)
    if coeffs.zero_reflection:
        flat[:] = np.eye(2)
        return out
    phase = np.exp(1j * coeffs.omega)
    losses = 0
    for i, z in enumerate(points.ravel()):
        matrix, loss = model_matrix(z, coeffs.kappa, coeffs.lambda0, coeffs.rho_abs,
                                    coeffs.beta12, coeffs.beta21, settings["switchover_radius"])
        matrix[0, 1] *= phase
        matrix[1, 0] /= phase
        flat[i] = matrix
        losses += bool(loss)
    if losses:
        logger.warning(f"PRECISION_LOSS in {losses} local-model evaluation(s)")
    return out


def pc_expansion_residual(sd: ScatteringData, x: float, t: float, radius: float = 0.25, n_points: int = 16,
                          config: Optional[Dict[str, Any]] = None) -> float:
    """max |P^pc - I - M/zeta| on the circle |z - lambda0| = radius."""
    coeffs = pc_coeffs(sd, x, t, config)
    angles = 2.0 * np.pi * (np.arange(n_points) + 0.5) / n_points
    zeta = coeffs.zeta(coeffs.lambda0 + radius * np.exp(1j * angles))
    values = pc_model_matrix(zeta, sd, x, t, config, coeffs)
    leading = coeffs.leading_coefficient()
    model = np.eye(2)[None] + leading[None] / zeta[:, None, None]
    return float(np.max(np.abs(values - model)))


def dispersive_term(sd: ScatteringData, x: float, t: float, config: Optional[Dict[str, Any]] = None) -> complex:
    """
    Leading dispersive correction
    (2t)^{-1/2} [beta12 e^{i omega} P11(lambda0)^2 + beta21 e^{-i omega} P12(lambda0)^2],
    with P the soliton model for the delta-modulated data.
    """
    settings = _asymptotic_settings(config)
    _check_time(t, settings)
    coeffs = pc_coeffs(sd, x, t, config)
    if coeffs.zero_reflection:
        return 0j
    data = modulated_constants_at(sd, coeffs.lambda0, config)
    P = nsoliton_matrix(data, x, t, coeffs.lambda0)
    value = (coeffs.beta12 * np.exp(1j * coeffs.omega) * P[0, 0] ** 2
             + coeffs.beta21 * np.exp(-1j * coeffs.omega) * P[0, 1] ** 2)
    return complex(value / np.sqrt(2.0 * t))


def asymptotic_q(sd: ScatteringData, x, t: float, config: Optional[Dict[str, Any]] = None):
    """q_sol(x, t; delta-modulated data) + dispersive_term, vectorized over x."""
    settings = _asymptotic_settings(config)
    _check_time(t, settings)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    values = np.empty(xs.size, dtype=complex)
    for i, position in enumerate(xs):
        lambda0 = -position / (4.0 * t)
        data = modulated_constants_at(sd, lambda0, config)
        values[i] = nsoliton_q(data, position, t) + dispersive_term(sd, position, t, config)
    return complex(values[0]) if np.ndim(x) == 0 else values.reshape(np.shape(x))


def _soliton_mass_left(data: ReflectionlessData, x: float, t: float, left: float) -> Tuple[complex, float]:
    """q_sol(x) and int_{-inf}^x |q_sol|^2 for reflectionless data."""
    start = min(left, x) - 40.0 / np.min(data.eigenvalues.imag)
    step = 0.01 / max(1.0, 4.0 * np.max(np.abs(data.eigenvalues)))
    nodes = np.linspace(start, x, int(np.ceil((x - start) / step)) + 1)
    q = SolitonMatrix(data, nodes, t).q()
    return complex(q[-1]), float(trapezoid(np.abs(q) ** 2, nodes))


def asymptotic_u(sd: ScatteringData, x, t: float, cone: ConeSelection,
                 config: Optional[Dict[str, Any]] = None):
    """
    Soliton-resolution profile in the cone:
    u ~ G^{-1}(q_sol(.; D_I)) exp(-i alpha0(lambda0, -)).

    Raises:
        ScatteringError(REGION) when |lambda0| <= M t^{-1/8}
    """
    settings = _asymptotic_settings(config)
    _check_time(t, settings)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    bound = settings["region_M"] * t ** (-0.125)
    values = np.empty(xs.size, dtype=complex)
    for i, position in enumerate(xs):
        lambda0 = -position / (4.0 * t)
        if abs(lambda0) <= bound:
            raise ScatteringError(ErrorCode.REGION, f"|lambda0| = {abs(lambda0):.3e} <= M t^-1/8 = {bound:.3e}",
                                  {"x": float(position), "t": float(t), "lambda0": lambda0})
        if not cone.contains(position, t):
            logger.debug(f"x={position} lies outside the cone at t={t}")
        data = modulated_constants(sd, cone, lambda0, config)
        phase = alpha0(sd, lambda0, -1, cut=cone.interval[1])
        if data.n == 0:
            values[i] = 0j
            continue
        q, mass = _soliton_mass_left(data, position, t, cone.x1 + cone.v1 * t)
        values[i] = q * np.exp(-1j * mass) * np.exp(-1j * phase)
    return complex(values[0]) if np.ndim(x) == 0 else values.reshape(np.shape(x))


@dataclass(frozen=True)
class AsymptoticProfile:
    """Asymptotic field values on an x-grid at one time."""

    x: np.ndarray
    t: float
    q: np.ndarray
    u: np.ndarray
    dispersive: np.ndarray


def asymptotic_profile(sd: ScatteringData, x: Sequence[float], t: float, cone: ConeSelection,
                       config: Optional[Dict[str, Any]] = None) -> AsymptoticProfile:
    """q, u and |dispersive| along x; u is NaN where the region hypothesis fails."""
    xs = np.asarray(x, dtype=float)
    q = np.asarray(asymptotic_q(sd, xs, t, config), dtype=complex)
    dispersive = np.array([dispersive_term(sd, position, t, config) for position in xs], dtype=complex)
    u = np.full(xs.size, np.nan + 0j, dtype=complex)
    excluded = 0
    for i, position in enumerate(xs):
        try:
            u[i] = asymptotic_u(sd, position, t, cone, config)
        except ScatteringError as e:
            if e.code != ErrorCode.REGION:
                raise
            excluded += 1
    if excluded:
        logger.warning(f"{excluded} point(s) excluded from the u-profile near lambda0 = 0")
    logger.info(f"Asymptotic profile computed at t={t} on {xs.size} points")
    return AsymptoticProfile(xs, float(t), q, u, dispersive)


@dataclass(frozen=True)
class SolitonPhaseShift:
    """
    Asymptotic position and phase of soliton k as t -> +inf (sign=+1) or -inf (sign=-1).

    x_shift and phi are the x_offset / phi0 of the one-soliton generated by
    (lambda_k, C_hat); gauge_phase is the alpha0 correction of the u-profile.
    """

    index: int
    sign: int
    lam: complex
    omega: float
    c: float
    nu: float
    mu: float
    x_shift: float
    phi: float
    C_hat: complex
    gauge_phase: float

    @property
    def params(self) -> SolitonParams:
        return SolitonParams(self.omega, self.c, self.x_shift, self.phi)

    def q_profile(self, x, t: float):
        return one_soliton_q(self.params, x, t)

    def u_profile(self, x, t: float):
        return one_soliton_u(self.params, x, t) * np.exp(-1j * self.gauge_phase)


def phase_shifts(sd: ScatteringData, k: int, sign: int, config: Optional[Dict[str, Any]] = None) -> SolitonPhaseShift:
    """
    Asymptotic soliton parameters of eigenvalue k.

        x_k^+- = (1/4mu) log|lam C^2 / 4mu^2| + (1/mu) sum_{+-(nu_k - nu_j) > 0} log|Delta_j(lam_k)|
                 + int_{-inf}^{nu_k} (resp. int_{nu_k}^{inf}) kappa(s) / ((s - nu)^2 + mu^2) ds

    The phase follows from the modulated constant C_hat with the same
    soliton and radiation factors.

    Raises:
        ScatteringError(DEGENERATE_VELOCITIES) when two Re lam coincide
    """
    settings = _asymptotic_settings(config)
    if sign not in (1, -1):
        raise ScatteringError(ErrorCode.DOMAIN, f"sign must be +1 or -1, got {sign}")
    lam = sd.eigenvalues
    if not 0 <= k < lam.size:
        raise ScatteringError(ErrorCode.DOMAIN, f"eigenvalue index {k} out of range", {"index": k})
    nu = lam.real
    gaps = np.abs(nu[:, None] - nu[None, :])
    np.fill_diagonal(gaps, np.inf)
    if lam.size > 1 and np.min(gaps) < settings["velocity_tol"]:
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        raise ScatteringError(ErrorCode.DEGENERATE_VELOCITIES, "two eigenvalues share a real part",
                              {"indices": [int(i), int(j)]})

    lam_k = complex(lam[k])
    nu_k, mu_k = lam_k.real, lam_k.imag
    C_k = sd.discrete[k].C
    others = [j for j in range(lam.size) if j != k and sign * (nu_k - nu[j]) > 0]
    kappa_fn = KappaFunction(sd, settings["kappa_cut"])
    lo, hi = (-np.inf, nu_k) if sign > 0 else (nu_k, np.inf)
    radiation = kappa_fn.integral(lo, hi, lambda s: 1.0 / (s - lam_k))

    log_ratio = float(np.sum([np.log(abs(blaschke(lam_k, lam[j]))) for j in others])) if others else 0.0
    x_shift = (np.log(abs(lam_k * C_k ** 2) / (4.0 * mu_k ** 2)) / (4.0 * mu_k)
               + log_ratio / mu_k + radiation.imag / mu_k)

    factor = np.prod([blaschke(lam_k, lam[j]) ** 2 for j in others]) if others else 1.0
    C_hat = complex(C_k * factor * np.exp(-2j * radiation))
    params = SolitonParams.from_spectral(lam_k, C_hat)
    gauge_phase = alpha0(sd, nu_k, -sign)
    logger.debug(f"Soliton {k} ({'+' if sign > 0 else '-'}): x={x_shift:.6g}, phi={params.phi0 % (2 * np.pi):.6g}")
    return SolitonPhaseShift(k, sign, lam_k, params.omega, params.c, nu_k, mu_k, float(x_shift),
                             float(params.phi0 % (2.0 * np.pi)), C_hat, gauge_phase)
