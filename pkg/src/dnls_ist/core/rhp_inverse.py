# src/dnls_ist/core/rhp_inverse.py
"""
Inverse map: Beals-Coifman equation on the augmented contour.

The contour is the truncated real line plus counter-clockwise circles around
every lambda_k and conj(lambda_k). Jumps are split as (I - w-)^{-1} (I + w+)
with w- strictly upper and w+ strictly lower, so for the row vector
mu = (mu1, mu2)

    mu1 = 1 + C-(mu2 w21),    mu2 = C+(mu1 w12),

and q(x, t) = -(1/pi) * integral of mu1 w12 over the contour.

Cauchy projections: on the real line the odd-offset Hilbert rule
(spectrally accurate for smoothly graded nodes), on each circle the exact Fourier
projection onto non-negative modes, between components the plain Cauchy
sum. C+ - C- = I holds exactly on the discrete level.

Eigenvalues whose residue coefficient exceeds one in modulus at (x, t) are
moved to the other half of their circle pair through the Blaschke factor
Delta(z) = prod (z - lambda_k) / (z - conj(lambda_k)), which leaves q unchanged.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, gmres

from .evolution import ReflectionInterpolant
from .types import (
    Circle,
    ContourSpec,
    PhaseParams,
    PotentialKind,
    PotentialSample,
    ScatteringData,
    UniformGrid,
    min_pairwise_distance,
)
from ..utils.errors import ErrorCode, ScatteringError
from ..utils.helpers import DEFAULT_CONFIG
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


def _inverse_settings(config: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    settings = dict(DEFAULT_CONFIG["inverse"])
    if config:
        settings.update(config.get("inverse", config))
    return settings


@dataclass(frozen=True, eq=False)
class JumpFactors:
    """
    Per-node jump data at one (x, t).

    w12 holds the strictly upper entries (the W- factor), w21 the strictly
    lower entries (the W+ factor); flagged marks eigenvalues handled through
    the Blaschke flip.
    """

    x: float
    t: float
    w12: np.ndarray
    w21: np.ndarray
    flagged: Tuple[bool, ...]

    def w_minus(self) -> np.ndarray:
        out = np.zeros((self.w12.size, 2, 2), dtype=complex)
        out[:, 0, 1] = self.w12
        return out

    def w_plus(self) -> np.ndarray:
        out = np.zeros((self.w21.size, 2, 2), dtype=complex)
        out[:, 1, 0] = self.w21
        return out


@dataclass(frozen=True, eq=False)
class BCUnknown:
    """Solution nu = (mu1, mu2) of the discretized Beals-Coifman equation."""

    contour: ContourSpec
    jumps: JumpFactors
    nu: np.ndarray
    residual: float
    lam: Tuple[complex, ...]

    @property
    def x(self) -> float:
        return self.jumps.x

    @property
    def t(self) -> float:
        return self.jumps.t

    def _delta(self, z):
        delta = np.ones_like(z, dtype=complex)
        for lam_k, flag in zip(self.lam, self.jumps.flagged):
            if flag:
                delta = delta * (z - lam_k) / (z - np.conj(lam_k))
        return delta

    def first_row(self, z) -> np.ndarray:
        """(N11, N12)(z) for z off the contour and outside the circles."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        nodes = self.contour.all_nodes()
        weights = self.contour.all_weights()
        kernel = weights[None, :] / (nodes[None, :] - z[:, None]) / (2j * np.pi)
        n1 = 1.0 + kernel @ (self.nu[:, 1] * self.jumps.w21)
        n2 = kernel @ (self.nu[:, 0] * self.jumps.w12)
        delta = self._delta(z)
        return np.column_stack([n1 / delta, n2 * delta])


def _real_hilbert_block(nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """
    (1/2 pi i) PV integral by the odd-offset rule; diagonal carries no term.

    Graded nodes come from a smooth map of a uniform parameter, so the rule
    is applied in that parameter with the weights carrying the Jacobian.
    """
    offsets = np.arange(nodes.size)[None, :] - np.arange(nodes.size)[:, None]
    odd = (offsets % 2) != 0
    diff = nodes[None, :] - nodes[:, None]
    scaled = np.broadcast_to(2.0 * weights[None, :], diff.shape)
    block = np.zeros(diff.shape, dtype=complex)
    block[odd] = scaled[odd] / diff[odd]
    return block / (2j * np.pi)


def _circle_plus_block(m: int) -> np.ndarray:
    """C+ on a counter-clockwise circle: keep Fourier modes n >= 0."""
    freq = np.fft.fftfreq(m, d=1.0 / m)
    mask = (freq >= 0).astype(float)
    return np.fft.ifft(mask[:, None] * np.fft.fft(np.eye(m), axis=0), axis=0)


class CauchyOperator:
    """
    Dense C- on the contour nodes; C+ = C- + I.

    Args:
        contour: Augmented contour
    """

    def __init__(self, contour: ContourSpec):
        self.contour = contour
        nodes = contour.all_nodes()
        weights = contour.all_weights()
        size = nodes.size
        with np.errstate(divide="ignore", invalid="ignore"):
            matrix = weights[None, :] / (nodes[None, :] - nodes[:, None]) / (2j * np.pi)
        self.blocks: List[slice] = []
        start = 0
        n_real = contour.n_real
        if n_real:
            block = slice(0, n_real)
            matrix[block, block] = _real_hilbert_block(contour.real_nodes, contour.real_weights) - 0.5 * np.eye(n_real)
            self.blocks.append(block)
            start = n_real
        for circle in contour.circles:
            m = circle.nodes.size
            block = slice(start, start + m)
            matrix[block, block] = _circle_plus_block(m) - np.eye(m)
            self.blocks.append(block)
            start += m
        self.minus = matrix
        self.size = size
        logger.debug(f"Cauchy operator assembled on {size} nodes ({len(contour.circles)} circles)")

    @property
    def plus(self) -> np.ndarray:
        return self.minus + np.eye(self.size)


def _tail_half_width(sd: ScatteringData, tail_rho: float) -> float:
    above = np.flatnonzero(np.abs(sd.rho) >= tail_rho)
    if above.size == 0:
        return 10.0 * sd.lambda_grid.dx
    reach = max(abs(sd.lam[above[0]]), abs(sd.lam[above[-1]])) + 2.0 * sd.lambda_grid.dx
    return float(min(reach, sd.half_width))


def _log_cosh(y):
    return np.logaddexp(y, -y)


def _graded_nodes(half_width: float, h: float, band: Tuple[float, float], sigma: float,
                  ratio: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nodes lambda = g(s) on a uniform s-grid with spacing about h, refined by
    `ratio` over `band` widened by 2 sigma, blending back to h over sigma.

    g(s) = s - a B(s) with B' a smoothed indicator of the stretched band, so
    g' = 1 - a B' stays in [1/ratio, 1].
    """
    a = 1.0 - 1.0 / ratio
    lo, hi = band
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo) / (1.0 - a)
    pad = 2.0 * sigma

    def shift(s):
        return 0.5 * sigma * (_log_cosh((s - center + half + pad) / sigma)
                              - _log_cosh((s - center - half - pad) / sigma))

    def slope(s):
        return 0.5 * (np.tanh((s - center + half + pad) / sigma) - np.tanh((s - center - half - pad) / sigma))

    # g(s) -> s -+ a (half + pad) far from the band
    reach = a * (half + pad)
    n = int(np.ceil(2.0 * (half_width + reach) / h)) + 1
    if n % 2 == 0:
        n += 1
    s = np.linspace(-half_width - reach, half_width + reach, n)
    step = s[1] - s[0]
    return s - a * shift(s), (1.0 - a * slope(s)) * step


def build_contour(sd: ScatteringData, config: Optional[Dict[str, Any]] = None,
                  phase: Optional[PhaseParams] = None, x_max: float = 0.0,
                  x_range: Optional[Tuple[float, float]] = None) -> ContourSpec:
    """
    Real-line nodes and eigenvalue circles for the inverse problem.

    Args:
        sd: Validated scattering data
        config: Configuration (full or the inverse section)
        phase: Optional (xi, t) hint; the real spacing is refined to resolve
            the oscillation of exp(2 i t theta) up to the truncation, and
            nodes are clustered on a t^{-1/2} scale around lambda0
        x_max: Largest |x| the contour will be used for
        x_range: Positions the contour will serve; with a phase hint the
            clustering covers every lambda0 = -x/(4t) in the range

    Returns:
        ContourSpec
    """
    settings = _inverse_settings(config)
    half_width = _tail_half_width(sd, float(settings["tail_rho"]))
    n_real = int(settings["real_nodes"])
    if phase is not None:
        x_max = max(x_max, abs(phase.xi * phase.t))
        frequency = 2.0 * x_max + 8.0 * half_width * phase.t + 20.0
        n_real = max(n_real, int(np.ceil(2.0 * half_width * frequency / np.pi)) + 1)
        stiffness = phase.t * half_width ** 2
        if stiffness > float(settings["oscillation_limit"]):
            logger.warning(f"|t| Lambda^2 = {stiffness:.3g} exceeds {settings['oscillation_limit']:g}; "
                           f"the real-line jump is poorly resolved, prefer asymptotic_q at this time")
    if n_real % 2 == 0:
        n_real += 1
    h = 2.0 * half_width / (n_real - 1)

    band = None
    if phase is not None:
        x_lo, x_hi = x_range if x_range is not None else (phase.xi * phase.t,) * 2
        band = (max(-x_hi / (4.0 * phase.t), -half_width), min(-x_lo / (4.0 * phase.t), half_width))
    if band is not None and band[0] <= band[1]:
        ratio = float(settings["cluster_ratio"])
        sigma = max(float(settings["cluster_width"]) / np.sqrt(8.0 * phase.t), 8.0 * h)
        extra = (band[1] - band[0] + 4.0 * sigma) * (ratio - 1.0) / h
        if extra > n_real:
            logger.debug(f"Clustering over [{band[0]:.3g}, {band[1]:.3g}] would add {extra:.0f} nodes; "
                         f"keeping the uniform grid")
            band = None
    if band is not None and band[0] <= band[1]:
        real_nodes, real_weights = _graded_nodes(half_width, h, band, sigma, ratio)
    else:
        real_nodes = np.linspace(-half_width, half_width, n_real)
        real_weights = np.full(n_real, h)

    lam = sd.eigenvalues
    d_lambda = min_pairwise_distance(lam)
    m = int(settings["circle_nodes"])
    phi = 2.0 * np.pi * np.arange(m) / m
    circles = []
    for k, lam_k in enumerate(lam):
        radius = min(d_lambda / 3.0, 0.5 * lam_k.imag)
        for conjugate, center in ((False, lam_k), (True, np.conj(lam_k))):
            nodes = center + radius * np.exp(1j * phi)
            weights = 1j * radius * np.exp(1j * phi) * (2.0 * np.pi / m)
            circles.append(Circle(k, conjugate, complex(center), float(radius), nodes, weights))

    for i, a in enumerate(circles):
        if abs(a.center.imag) <= a.radius:
            raise ScatteringError(ErrorCode.GEOMETRY, f"circle around {a.center} touches the real line")
        for b in circles[i + 1:]:
            if abs(a.center - b.center) <= a.radius + b.radius:
                raise ScatteringError(ErrorCode.GEOMETRY, f"circles around {a.center} and {b.center} intersect")

    logger.debug(f"Contour: {real_nodes.size} real nodes on [-{half_width:.3f}, {half_width:.3f}], "
                 f"{len(circles)} circles of {m} nodes")
    return ContourSpec(real_nodes, real_weights, tuple(circles))


def jump_factors(sd: ScatteringData, contour: ContourSpec, x: float, t: float,
                 rho_nodes: Optional[np.ndarray] = None) -> JumpFactors:
    """
    Jump entries at every node for the data evolved to time t.

    Args:
        sd: Scattering data at t = 0
        contour: Contour from build_contour
        x: Position
        t: Time
        rho_nodes: rho(t = 0) at the real nodes, if already interpolated

    Returns:
        JumpFactors
    """
    lam = sd.eigenvalues
    if rho_nodes is None:
        rho_nodes = ReflectionInterpolant(sd)(contour.real_nodes)
    log_e = np.log(sd.norming_constants) + 2j * lam * x + 4j * lam ** 2 * t
    log_c = np.log(lam) + log_e
    log_d = np.log(-1.0 + 0j) + np.conj(log_e)
    flagged = log_c.real > 0

    def delta(z):
        out = np.ones_like(np.asarray(z, dtype=complex))
        for j in np.flatnonzero(flagged):
            out = out * (z - lam[j]) / (z - np.conj(lam[j]))
        return out

    s = contour.real_nodes
    oscillation = np.exp(-2j * s * x - 4j * s ** 2 * t)
    delta_real = delta(s.astype(complex))
    w12 = [rho_nodes * oscillation / delta_real ** 2]
    w21 = [s * np.conj(rho_nodes) / oscillation * delta_real ** 2]

    for circle in contour.circles:
        k = circle.index
        z = circle.nodes
        zero = np.zeros_like(z)
        if not flagged[k]:
            if not circle.conjugate:
                coefficient = np.exp(log_c[k]) * delta(lam[k]) ** 2
                w12.append(zero)
                w21.append(-coefficient / (z - lam[k]))
            else:
                coefficient = np.exp(log_d[k]) / delta(np.conj(lam[k])) ** 2
                w12.append(-coefficient / (z - np.conj(lam[k])))
                w21.append(zero)
        else:
            others = [j for j in np.flatnonzero(flagged) if j != k]
            if not circle.conjugate:
                d_prime = 1.0 / (lam[k] - np.conj(lam[k]))
                for j in others:
                    d_prime *= (lam[k] - lam[j]) / (lam[k] - np.conj(lam[j]))
                coefficient = np.exp(-log_c[k]) / d_prime ** 2
                w12.append(-coefficient / (z - lam[k]))
                w21.append(zero)
            else:
                inv_prime = 1.0 / (np.conj(lam[k]) - lam[k])
                for j in others:
                    inv_prime *= (np.conj(lam[k]) - np.conj(lam[j])) / (np.conj(lam[k]) - lam[j])
                coefficient = np.exp(-log_d[k]) / inv_prime ** 2
                w12.append(zero)
                w21.append(-coefficient / (z - np.conj(lam[k])))

    return JumpFactors(float(x), float(t), np.concatenate(w12), np.concatenate(w21),
                       tuple(bool(f) for f in flagged))


def _block_preconditioner(system_blocks: List[np.ndarray], slices: List[slice], size: int) -> LinearOperator:
    factors = [scipy.linalg.lu_factor(block) for block in system_blocks]

    def apply(v):
        out = np.empty(size, dtype=complex)
        for factor, part in zip(factors, slices):
            out[part] = scipy.linalg.lu_solve(factor, v[part])
        return out

    return LinearOperator((size, size), matvec=apply, dtype=complex)


def assemble_and_solve_bc(sd: ScatteringData, contour: ContourSpec, x: float, t: float,
                          ops: Optional[CauchyOperator] = None,
                          config: Optional[Dict[str, Any]] = None,
                          rho_nodes: Optional[np.ndarray] = None) -> BCUnknown:
    """
    Solve the discretized Beals-Coifman equation at one (x, t).

    Args:
        sd: Scattering data at t = 0
        contour: Contour from build_contour
        x: Position
        t: Time
        ops: Cauchy operator of the contour (shared across x)
        config: Configuration (full or the inverse section)
        rho_nodes: rho at the real nodes

    Returns:
        BCUnknown with the maximum equation residual
    """
    settings = _inverse_settings(config)
    ops = ops or CauchyOperator(contour)
    jumps = jump_factors(sd, contour, x, t, rho_nodes)
    w12, w21 = jumps.w12, jumps.w21
    s12 = np.flatnonzero(w12)
    s21 = np.flatnonzero(w21)
    size = ops.size
    mu1 = np.ones(size, dtype=complex)
    mu2 = np.zeros(size, dtype=complex)

    if s12.size and s21.size:
        plus_part = ops.minus[np.ix_(s21, s12)] * w12[s12][None, :]
        # C+ = C- + I on the shared support
        shared = np.intersect1d(s21, s12)
        plus_part[np.searchsorted(s21, shared), np.searchsorted(s12, shared)] += w12[shared]
        minus_part = ops.minus[np.ix_(s12, s21)] * w21[s21][None, :]
        rhs = plus_part @ np.ones(s12.size)
        n_unknowns = s21.size
        if n_unknowns <= int(settings["dense_limit"]):
            system = np.eye(n_unknowns) - plus_part @ minus_part
            try:
                mu2_s = scipy.linalg.solve(system, rhs)
            except (scipy.linalg.LinAlgError, ValueError) as e:
                raise ScatteringError(ErrorCode.SOLVER_FAIL, f"dense Beals-Coifman solve failed at x={x}: {e}",
                                      {"x": float(x), "t": float(t)})
        else:
            operator = LinearOperator((n_unknowns, n_unknowns), dtype=complex,
                                      matvec=lambda v: v - plus_part @ (minus_part @ v))
            slices, blocks = [], []
            for block in ops.blocks:
                members = np.flatnonzero((s21 >= block.start) & (s21 < block.stop))
                if members.size:
                    part = slice(members[0], members[-1] + 1)
                    slices.append(part)
                    blocks.append(np.eye(members.size) - plus_part[part] @ minus_part[:, part])
            mu2_s, info = gmres(operator, rhs, rtol=float(settings["gmres_tol"]),
                                restart=int(settings["gmres_restart"]),
                                M=_block_preconditioner(blocks, slices, n_unknowns))
            if info != 0:
                raise ScatteringError(ErrorCode.SOLVER_FAIL, f"GMRES stagnated at x={x} (info={info})",
                                      {"x": float(x), "t": float(t), "info": int(info)})
        mu1_s = 1.0 + minus_part @ mu2_s
        residual = float(max(np.max(np.abs(mu2_s - plus_part @ mu1_s)), 0.0))
        mu1 = 1.0 + ops.minus[:, s21] @ (w21[s21] * mu2_s)
        mu2 = ops.minus[:, s12] @ (w12[s12] * mu1_s)
        mu2[s12] += w12[s12] * mu1_s
    elif s12.size:
        mu2 = ops.minus[:, s12] @ w12[s12]
        mu2[s12] += w12[s12]
        residual = 0.0
    else:
        residual = 0.0

    if not (np.all(np.isfinite(mu1)) and np.all(np.isfinite(mu2))):
        raise ScatteringError(ErrorCode.SOLVER_FAIL, f"non-finite Beals-Coifman solution at x={x}",
                              {"x": float(x), "t": float(t)})
    return BCUnknown(contour, jumps, np.column_stack([mu1, mu2]), residual, tuple(sd.eigenvalues))


def reconstruct_q(nu: BCUnknown, sd: Optional[ScatteringData] = None, x: Optional[float] = None,
                  t: Optional[float] = None) -> complex:
    """
    q(x, t) = -(1/pi) * sum over nodes of weight * mu1 * w12.

    sd, x and t are accepted for symmetry with the solve call and must match
    the values the solution was computed for.
    """
    if x is not None and x != nu.x or t is not None and t != nu.t:
        raise ScatteringError(ErrorCode.DOMAIN, f"solution was computed for (x, t) = ({nu.x}, {nu.t})")
    weights = nu.contour.all_weights()
    return complex(-np.sum(weights * nu.nu[:, 0] * nu.jumps.w12) / np.pi)


def matrix_from_first_row(nu: BCUnknown, z) -> np.ndarray:
    """Full 2x2 solution from the first row via P21(z) = -z conj(P12(conj z)), P22(z) = conj(P11(conj z))."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    row = nu.first_row(z)
    mirror = nu.first_row(np.conj(z))
    out = np.empty((z.size, 2, 2), dtype=complex)
    out[:, 0, 0] = row[:, 0]
    out[:, 0, 1] = row[:, 1]
    out[:, 1, 0] = -z * np.conj(mirror[:, 1])
    out[:, 1, 1] = np.conj(mirror[:, 0])
    return out


def inverse_map(sd: ScatteringData, x_grid: Union[UniformGrid, Sequence[float]], t: float = 0.0,
                config: Optional[Dict[str, Any]] = None, tail_tol: float = 1e-6) -> PotentialSample:
    """
    Reconstruct q(x, t) on a uniform x-grid.

    Args:
        sd: Scattering data at t = 0
        x_grid: UniformGrid or uniformly spaced positions
        t: Time
        config: Configuration (full or the inverse section)
        tail_tol: Tail tolerance of the returned sample (raised to the
            boundary modulus when the grid does not cover the support)

    Returns:
        PotentialSample of kind Q_GAUGE
    """
    settings = _inverse_settings(config)
    x = x_grid.points if isinstance(x_grid, UniformGrid) else np.asarray(x_grid, dtype=float)
    phase = None
    x_range = None
    if t != 0:
        # the stationary point -x/(4t) follows the sign of t
        signed = np.sign(t) * x
        x_range = (float(np.min(signed)), float(np.max(signed)))
        phase = PhaseParams.from_xt(0.5 * (x_range[0] + x_range[1]), abs(t))
    contour = build_contour(sd, settings, phase, x_max=float(np.max(np.abs(x))), x_range=x_range)
    ops = CauchyOperator(contour)
    rho_nodes = ReflectionInterpolant(sd)(contour.real_nodes)

    def solve_at(position: float) -> complex:
        return reconstruct_q(assemble_and_solve_bc(sd, contour, position, t, ops, settings, rho_nodes))

    values = np.empty(x.size, dtype=complex)
    failures: Dict[int, str] = {}
    workers = max(1, int(settings.get("workers", 1)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {i: pool.submit(solve_at, float(xi)) for i, xi in enumerate(x)}
            for i, future in futures.items():
                try:
                    values[i] = future.result()
                except ScatteringError as e:
                    failures[i] = e.message
    else:
        for i, xi in enumerate(x):
            try:
                values[i] = solve_at(float(xi))
            except ScatteringError as e:
                failures[i] = e.message

    if failures:
        logger.error(f"Inverse map failed at {len(failures)} of {x.size} points")
        raise ScatteringError(ErrorCode.SOLVER_FAIL, f"inverse map failed at {len(failures)} point(s)",
                              {"indices": sorted(failures), "messages": list(failures.values())[:5]})

    dx = float(x[1] - x[0]) if x.size > 1 else 1.0
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > tail_tol:
        logger.warning(f"Reconstructed field is {edge:.2e} at the grid boundary; widen the x-grid")
    logger.info(f"Inverse map: {x.size} points at t={t}, contour size {contour.size}")
    return PotentialSample(float(x[0]), dx, values, PotentialKind.Q_GAUGE, max(tail_tol, edge * (1.0 + 1e-9)))
