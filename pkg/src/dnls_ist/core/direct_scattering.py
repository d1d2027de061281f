# src/dnls_ist/core/direct_scattering.py
"""
Forward scattering map q -> (rho, {lambda_k, C_k}).

Jost columns are marched cell by cell with a fourth-order Magnus propagator
(two Gauss points per cell, q interpolated by cubic splines). The spectral
problem is

    psi' = U psi,  U = -i lam sigma3 + [[0, q], [-lam conj(q), 0]] + (i/2)|q|^2 sigma3,

with psi = n exp(-i lam x sigma3) and n -> I at x -> -inf (MINUS) or
x -> +inf (PLUS). The first column of n^- is carried in the scaled form
(n11, n21 / lam), which keeps the lam = 0 limit regular.
"""
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from .types import (
    Column,
    DiscreteDatum,
    JostColumn,
    PotentialKind,
    PotentialSample,
    ScatteringData,
    Side,
    UniformGrid,
    validate_scattering_data,
)
from ..utils.errors import ErrorCode, ScatteringError
from ..utils.helpers import DEFAULT_CONFIG
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True, eq=False)
class TransmissionPair:
    """alpha, alpha_breve and beta on a real lambda-grid."""

    lam: np.ndarray
    alpha: np.ndarray
    alpha_breve: np.ndarray
    beta: np.ndarray
    unitarity_defect: float


@dataclass(frozen=True)
class EigenData:
    """Discrete datum of one eigenvalue together with its diagnostics."""

    lambda_k: complex
    B_k: complex
    alpha_breve_prime: complex
    C_k: complex
    residual: float


def _scattering_settings(config: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    settings = dict(DEFAULT_CONFIG["scattering"])
    if config:
        settings.update(config.get("scattering", config))
    return settings


def _exp_traceless(o11, o12, o21):
    """cosh(k) and sinh(k)/k for Omega = [[o11, o12], [o21, -o11]], k^2 = o11^2 + o12 o21."""
    k2 = o11 * o11 + o12 * o21
    k = np.sqrt(k2)
    small = np.abs(k) < 1e-4
    k_safe = np.where(small, 1.0, k)
    cosh_k = np.where(small, 1.0 + k2 / 2.0 + k2 * k2 / 24.0, np.cosh(k_safe))
    sinhc = np.where(small, 1.0 + k2 / 6.0 + k2 * k2 / 120.0, np.sinh(k_safe) / k_safe)
    return cosh_k, sinhc


class JostSolver:
    """
    Marches normalized Jost columns across a sampled potential.

    Args:
        q: Potential in the q-gauge
    """

    def __init__(self, q: PotentialSample):
        if q.kind != PotentialKind.Q_GAUGE:
            raise ScatteringError(ErrorCode.DOMAIN, "direct scattering needs a Q_GAUGE potential; gauge u first")
        self.q = q
        self.h = q.dx
        x = q.x
        left = x[:-1]
        nodes = np.concatenate([left + self.h * (0.5 - SQRT3 / 6.0), left + self.h * (0.5 + SQRT3 / 6.0)])
        if q.n >= 4:
            at_nodes = CubicSpline(x, q.values.real)(nodes) + 1j * CubicSpline(x, q.values.imag)(nodes)
        else:
            at_nodes = np.interp(nodes, x, q.values.real) + 1j * np.interp(nodes, x, q.values.imag)
        cells = q.n - 1
        self._q = (at_nodes[:cells], at_nodes[cells:])
        self._mod2 = (np.abs(self._q[0]) ** 2, np.abs(self._q[1]) ** 2)
        logger.debug(f"JostSolver ready: {q.n} samples on [{q.x0:.3f}, {q.x_end:.3f}], dx={self.h:.4g}")

    @property
    def x_left(self) -> float:
        return self.q.x0

    @property
    def x_right(self) -> float:
        return self.q.x_end

    def _generator(self, j: int, node: int, lam: np.ndarray, first: bool):
        qv = self._q[node][j]
        a = -1j * lam + 0.5j * self._mod2[node][j]
        if first:
            return a, lam * qv, -np.conj(qv) * np.ones_like(lam)
        return a, qv * np.ones_like(lam), -lam * np.conj(qv)

    def march(self, lam, side: Side, column: Column, store: bool = False):
        """
        Propagate one column from its normalization end.

        Args:
            lam: Spectral parameter(s)
            side: MINUS marches left to right, PLUS right to left
            column: FIRST (scaled: n11, n21 / lam) or SECOND (n12, n22)
            store: Keep the whole path (n, 2, m) instead of the far end only

        Returns:
            Far-end values (2, m), or the full path when store is True
        """
        lam = np.atleast_1d(np.asarray(lam, dtype=complex))
        first = column == Column.FIRST
        shift = np.exp((1j if first else -1j) * lam * self.h)
        h = self.h
        s = SQRT3 * h * h / 12.0
        v = np.zeros((2, lam.size), dtype=complex)
        v[0 if first else 1] = 1.0
        cells = self.q.n - 1
        path = np.empty((self.q.n, 2, lam.size), dtype=complex) if store else None
        order = range(cells) if side == Side.MINUS else range(cells - 1, -1, -1)
        if store:
            path[0 if side == Side.MINUS else -1] = v
        for j in order:
            a1, b1, c1 = self._generator(j, 0, lam, first)
            a2, b2, c2 = self._generator(j, 1, lam, first)
            o11 = 0.5 * h * (a1 + a2) + s * (b2 * c1 - b1 * c2)
            o12 = 0.5 * h * (b1 + b2) + 2.0 * s * (a2 * b1 - a1 * b2)
            o21 = 0.5 * h * (c1 + c2) + 2.0 * s * (a1 * c2 - a2 * c1)
            cosh_k, sinhc = _exp_traceless(o11, o12, o21)
            if side == Side.MINUS:
                top = cosh_k * v[0] + sinhc * (o11 * v[0] + o12 * v[1])
                bottom = cosh_k * v[1] + sinhc * (o21 * v[0] - o11 * v[1])
                v = np.array([top, bottom]) * shift
                if store:
                    path[j + 1] = v
            else:
                top = cosh_k * v[0] - sinhc * (o11 * v[0] + o12 * v[1])
                bottom = cosh_k * v[1] - sinhc * (o21 * v[0] - o11 * v[1])
                v = np.array([top, bottom]) / shift
                if store:
                    path[j] = v
        result = path if store else v
        if not np.all(np.isfinite(result)):
            raise ScatteringError(ErrorCode.NO_CONVERGENCE, "Jost march produced non-finite values",
                                  {"lambda": [complex(z) for z in lam[:8]]})
        return result

    def alpha_breve(self, lam) -> np.ndarray:
        """alpha_breve(lam) = n11^-(x_R, lam) for Im lam >= 0."""
        return self.march(lam, Side.MINUS, Column.FIRST)[0]

    def scattering_endpoint(self, lam) -> Tuple[np.ndarray, np.ndarray]:
        """(n11^-, n21^- / lam) at the right end of the grid."""
        v = self.march(lam, Side.MINUS, Column.FIRST)
        return v[0], v[1]


def _check_region(lam: complex, side: Side, column: Column) -> None:
    upper = (side, column) in ((Side.MINUS, Column.FIRST), (Side.PLUS, Column.SECOND))
    tol = 1e-12 * max(1.0, abs(lam))
    if upper and lam.imag < -tol:
        raise ScatteringError(ErrorCode.DOMAIN, f"{side.value}/{column.value} column is bounded only for Im lambda >= 0",
                              {"lambda": str(lam)})
    if not upper and lam.imag > tol:
        raise ScatteringError(ErrorCode.DOMAIN, f"{side.value}/{column.value} column is bounded only for Im lambda <= 0",
                              {"lambda": str(lam)})


def solve_jost(q: PotentialSample, lam: complex, side: Side, column: Column,
               solver: Optional[JostSolver] = None) -> JostColumn:
    """
    Column of n^± on the x-grid of q.

    Args:
        q: Potential in the q-gauge
        lam: Spectral parameter inside the column's region of boundedness
        side: MINUS or PLUS
        column: FIRST or SECOND
        solver: Reusable solver for q

    Returns:
        JostColumn with unscaled entries (n1j, n2j)
    """
    lam = complex(lam)
    side, column = Side(side), Column(column)
    _check_region(lam, side, column)
    solver = solver or JostSolver(q)
    path = solver.march(lam, side, column, store=True)[:, :, 0]
    if column == Column.FIRST:
        path = np.column_stack([path[:, 0], lam * path[:, 1]])
    return JostColumn(lam, side, column, q.x, path)


def transmission(q: PotentialSample, lambda_grid, solver: Optional[JostSolver] = None) -> TransmissionPair:
    """
    alpha, alpha_breve, beta on a real lambda-grid.

    Args:
        q: Potential in the q-gauge
        lambda_grid: UniformGrid or array of real lambda
        solver: Reusable solver for q

    Returns:
        TransmissionPair with the unitarity defect sup | |alpha|^2 + lam |beta|^2 - 1 |
    """
    lam = lambda_grid.points if isinstance(lambda_grid, UniformGrid) else np.asarray(lambda_grid, dtype=float)
    solver = solver or JostSolver(q)
    a_end, b_end = solver.scattering_endpoint(lam)
    alpha_breve = a_end
    alpha = np.conj(a_end)
    beta = np.exp(2j * lam * solver.x_right) * np.conj(b_end)
    defect = float(np.max(np.abs(np.abs(alpha) ** 2 + lam * np.abs(beta) ** 2 - 1.0)))
    logger.debug(f"Transmission on {lam.size} points, unitarity defect {defect:.2e}")
    return TransmissionPair(lam, alpha, alpha_breve, beta, defect)


def reflection(tp: TransmissionPair, alpha_floor: float = 1e-8) -> np.ndarray:
    """rho = beta / alpha, refusing grids where |alpha| nearly vanishes."""
    modulus = np.abs(tp.alpha)
    if np.min(modulus) < alpha_floor:
        where = int(np.argmin(modulus))
        raise ScatteringError(
            ErrorCode.SPECTRAL_SINGULARITY,
            f"|alpha| = {modulus[where]:.3e} at lambda = {tp.lam[where]:.6f}",
            {"index": where, "lambda": float(tp.lam[where]), "alpha": float(modulus[where])},
        )
    return tp.beta / tp.alpha


class EigenvalueSearch:
    """
    Zeros of alpha_breve in a rectangle of the upper half-plane.

    Counts come from the argument principle on cell boundaries; cells are
    split into quadrants until each winds at most once, and each simple zero
    is refined by Newton iteration.

    Args:
        solver: JostSolver for the potential
        settings: The "scattering" configuration section
    """

    def __init__(self, solver: JostSolver, settings: Dict[str, Any]):
        self.solver = solver
        self.points = int(settings["winding_points"])
        self.max_depth = int(settings["max_depth"])
        self.newton_tol = float(settings["newton_tol"])
        self.newton_max_iter = int(settings["newton_max_iter"])
        self.near_axis = float(settings["near_axis"])
        self.max_points = 16384

    def _edge_increments(self, z0: complex, z1: complex) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.points
        while True:
            nodes = z0 + (z1 - z0) * np.linspace(0.0, 1.0, m + 1)
            values = self.solver.alpha_breve(nodes)
            if np.min(np.abs(values)) < 1e-14:
                raise ScatteringError(ErrorCode.WINDING_MISMATCH, "alpha_breve vanishes on a cell boundary",
                                      {"edge": [str(z0), str(z1)]})
            ratio = values[1:] / values[:-1]
            if np.max(np.abs(np.angle(ratio))) < np.pi / 3 or m >= self.max_points:
                return nodes, values, ratio
            m *= 2

    def boundary_moments(self, box: Tuple[float, float, float, float]) -> Tuple[float, complex]:
        """Winding number and first moment (1/2 pi i) ∮ z dlog(alpha_breve) of a box."""
        x0, x1, y0, y1 = box
        corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
        total = 0.0
        moment = 0.0 + 0.0j
        for z0, z1 in zip(corners, corners[1:] + corners[:1]):
            nodes, _, ratio = self._edge_increments(z0, z1)
            dlog = np.log(np.abs(ratio)) + 1j * np.angle(ratio)
            total += float(np.sum(np.angle(ratio)))
            moment += np.sum(0.5 * (nodes[1:] + nodes[:-1]) * dlog)
        return total / (2.0 * np.pi), moment / (2j * np.pi)

    def winding(self, box) -> Tuple[int, complex]:
        raw, moment = self.boundary_moments(box)
        count = int(round(raw))
        if abs(raw - count) > 0.1:
            raise ScatteringError(ErrorCode.WINDING_MISMATCH, f"non-integer winding {raw:.4f}", {"box": list(box)})
        return count, moment

    def newton(self, start: complex, box) -> complex:
        lam = complex(start)
        step = 1e-6
        for iteration in range(self.newton_max_iter):
            values = self.solver.alpha_breve(np.array([lam, lam + step, lam - step]))
            if abs(values[0]) < self.newton_tol:
                logger.debug(f"Newton converged to {lam:.10f} after {iteration} iterations")
                return lam
            derivative = (values[1] - values[2]) / (2.0 * step)
            if derivative == 0:
                break
            lam = lam - values[0] / derivative
            if lam.imag <= 0:
                lam = complex(lam.real, 0.5 * box[2] + 1e-12)
        raise ScatteringError(ErrorCode.NO_CONVERGENCE, f"Newton iteration did not converge near {start:.6f}",
                              {"start": str(start), "last": str(lam)})

    def _search(self, box, count: int, moment: complex, depth: int) -> List[complex]:
        if count == 0:
            return []
        if count == 1:
            x0, x1, y0, y1 = box
            inside = x0 <= moment.real <= x1 and y0 <= moment.imag <= y1
            start = moment if inside else complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
            return [self.newton(start, box)]
        if depth >= self.max_depth:
            raise ScatteringError(ErrorCode.WINDING_MISMATCH, f"cell still winds {count} times at maximum depth",
                                  {"box": list(box)})
        x0, x1, y0, y1 = box
        # off-centre split keeps cell edges away from symmetric zero placements
        xm = x0 + 0.5137 * (x1 - x0)
        ym = y0 + 0.4871 * (y1 - y0)
        children = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
        windings = [self.winding(child) for child in children]
        if sum(w for w, _ in windings) != count:
            raise ScatteringError(ErrorCode.WINDING_MISMATCH, "sub-cell windings do not add up",
                                  {"box": list(box), "parent": count, "children": [w for w, _ in windings]})
        zeros: List[complex] = []
        for child, (w, m) in zip(children, windings):
            zeros.extend(self._search(child, w, m, depth + 1))
        return zeros

    def find(self, box: Sequence[float]) -> List[complex]:
        box = tuple(float(b) for b in box)
        if not box[2] > 0:
            raise ScatteringError(ErrorCode.DOMAIN, "eigenvalue box must lie in the open upper half-plane",
                                  {"box": list(box)})
        count, moment = self.winding(box)
        logger.debug(f"Eigenvalue box {box} winds {count} times")
        zeros = self._search(box, count, moment, 0)
        distinct: List[complex] = []
        for z in zeros:
            if all(abs(z - w) > 1e-8 for w in distinct):
                distinct.append(z)
        if len(distinct) != count:
            raise ScatteringError(ErrorCode.WINDING_MISMATCH,
                                  f"found {len(distinct)} distinct zeros but the winding number is {count}",
                                  {"zeros": [str(z) for z in distinct], "winding": count})
        for z in distinct:
            if z.imag < self.near_axis:
                raise ScatteringError(ErrorCode.NEAR_AXIS, f"eigenvalue {z:.6f} lies within {self.near_axis} of the real axis",
                                      {"lambda": str(z)})
        return sorted(distinct, key=lambda z: (z.real, z.imag))


def find_eigenvalues(q: PotentialSample, box: Optional[Sequence[float]] = None,
                     config: Optional[Dict[str, Any]] = None,
                     solver: Optional[JostSolver] = None) -> List[complex]:
    """
    All zeros of alpha_breve inside box = (re_min, re_max, im_min, im_max).

    Args:
        q: Potential in the q-gauge
        box: Search rectangle; defaults to scattering.eig_box
        config: Configuration (full or the scattering section)
        solver: Reusable solver for q

    Returns:
        Eigenvalues sorted by real part
    """
    settings = _scattering_settings(config)
    box = box if box is not None else settings["eig_box"]
    search = EigenvalueSearch(solver or JostSolver(q), settings)
    zeros = search.find(box)
    logger.info(f"Found {len(zeros)} eigenvalue(s) in box {list(box)}")
    return zeros


def alpha_breve_derivative(solver: JostSolver, lam: complex, nodes: int = 64) -> complex:
    """Cauchy-integral derivative of alpha_breve on a circle inside the upper half-plane."""
    radius = min(0.5 * lam.imag, 0.1)
    phi = 2.0 * np.pi * np.arange(nodes) / nodes
    values = solver.alpha_breve(lam + radius * np.exp(1j * phi))
    return complex(np.mean(values * np.exp(-1j * phi)) / radius)


def norming_constant(q: PotentialSample, lambda_k: complex, config: Optional[Dict[str, Any]] = None,
                     solver: Optional[JostSolver] = None) -> EigenData:
    """
    Norming constant C_k = B_k / alpha_breve'(lambda_k) of a simple zero.

    B_k is the least-squares constant in n1^-(x) = B_k lam_k exp(2 i lam_k x) n2^+(x)
    over grid points where both marched columns stay above
    scattering.resolution_floor times their own maximum. The reported residual
    is the worst row mismatch relative to the size of the two columns.

    Args:
        q: Potential in the q-gauge
        lambda_k: A zero of alpha_breve
        config: Configuration (full or the scattering section)
        solver: Reusable solver for q

    Returns:
        EigenData
    """
    settings = _scattering_settings(config)
    lam = complex(lambda_k)
    solver = solver or JostSolver(q)
    value = complex(solver.alpha_breve(lam)[0])
    if abs(value) > float(settings["proportionality_tol"]):
        raise ScatteringError(ErrorCode.ILL_CONDITIONED, f"|alpha_breve({lam:.6f})| = {abs(value):.3e} is not a zero",
                              {"lambda": str(lam), "alpha_breve": abs(value)})

    derivative = alpha_breve_derivative(solver, lam, int(settings["circle_nodes"]))
    if abs(derivative) < float(settings["derivative_floor"]):
        raise ScatteringError(ErrorCode.ILL_CONDITIONED,
                              f"alpha_breve'({lam:.6f}) = {abs(derivative):.3e}; zero is not simple",
                              {"lambda": str(lam), "derivative": abs(derivative)})

    polished = lam - value / derivative
    polished_value = complex(solver.alpha_breve(polished)[0])
    if abs(polished_value) < abs(value):
        lam, value = polished, polished_value

    left = solver.march(lam, Side.MINUS, Column.FIRST, store=True)[:, :, 0]
    right = solver.march(lam, Side.PLUS, Column.SECOND, store=True)[:, :, 0]
    # each march carries an absolute error of about (|alpha_breve| + eps) * max|column|
    # in the non-decaying mode; only rows where both marched columns clear that floor are used
    tol = float(settings["proportionality_tol"])
    floor = min(max(float(settings["resolution_floor"]), 100.0 * (abs(value) + 1e-15) / tol), 0.1)
    left_norm = np.linalg.norm(left, axis=1)
    right_norm = np.linalg.norm(right, axis=1)
    usable = (left_norm > floor * np.max(left_norm)) & (right_norm > floor * np.max(right_norm))
    if not np.any(usable):
        raise ScatteringError(ErrorCode.ILL_CONDITIONED, "no grid point resolves both Jost columns",
                              {"lambda": str(lam)})
    phase = np.exp(2j * lam * q.x[usable])
    v = left[usable]
    w = np.column_stack([lam * right[usable, 0], right[usable, 1]]) * phase[:, None]
    w_norm = np.linalg.norm(w, axis=1)
    w_hat = w / w_norm[:, None]
    v_hat = v / w_norm[:, None]
    B = complex(np.sum(np.conj(w_hat) * v_hat) / np.sum(np.abs(w_hat) ** 2))
    mismatch = np.linalg.norm(v - B * w, axis=1) / (np.linalg.norm(v, axis=1) + abs(B) * w_norm)
    residual = float(np.max(mismatch))
    if residual > tol:
        raise ScatteringError(ErrorCode.ILL_CONDITIONED,
                              f"Jost columns not proportional at {lam:.6f}: residual {residual:.3e}",
                              {"lambda": str(lam), "residual": residual})
    C = B / derivative
    logger.debug(f"Norming constant at {lam:.8f}: B={B:.8f}, alpha'={derivative:.8f}, C={C:.8f}")
    return EigenData(lam, B, derivative, C, residual)


def direct_map(q: PotentialSample, config: Optional[Dict[str, Any]] = None) -> ScatteringData:
    """
    Scattering data of a q-gauge potential.

    Args:
        q: Potential in the q-gauge
        config: Configuration (full or the scattering section)

    Returns:
        Validated ScatteringData on the configured symmetric lambda-grid
    """
    settings = _scattering_settings(config)
    if q.kind != PotentialKind.Q_GAUGE:
        raise ScatteringError(ErrorCode.DOMAIN, "direct_map needs a Q_GAUGE potential; gauge u first")
    solver = JostSolver(q)
    grid = UniformGrid.symmetric(float(settings["lambda_max"]), int(settings["n_lambda"]))

    try:
        tp = transmission(q, grid, solver)
        rho = reflection(tp, float(settings["alpha_floor"]))
        eigenvalues = find_eigenvalues(q, settings["eig_box"], settings, solver)
    except ScatteringError as e:
        if e.code in (ErrorCode.SPECTRAL_SINGULARITY, ErrorCode.NEAR_AXIS):
            logger.error(f"Genericity check failed: {e.message}")
            raise ScatteringError(ErrorCode.GENERICITY_FAIL, e.message, {"cause": e.code.value, **e.details})
        raise

    discrete = []
    for lam in eigenvalues:
        eig = norming_constant(q, lam, settings, solver)
        discrete.append(DiscreteDatum(eig.lambda_k, eig.C_k))

    sd = ScatteringData(grid, rho, tuple(discrete))
    try:
        validate_scattering_data(sd, float(settings["c2_threshold"]), float(settings["d_lambda_threshold"]))
    except ScatteringError as e:
        if e.code == ErrorCode.SPECTRAL_SINGULARITY:
            raise ScatteringError(ErrorCode.GENERICITY_FAIL, e.message, {"cause": e.code.value, **e.details})
        raise
    logger.info(f"Direct map done: {len(discrete)} eigenvalue(s), sup|rho|={np.max(np.abs(rho)):.3e}, "
                f"unitarity defect {tp.unitarity_defect:.2e}")
    return sd
