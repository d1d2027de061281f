# src/dnls_ist/core/types.py
"""
Core data types shared by every module of the toolkit.

The sign convention is fixed to epsilon = -1 everywhere. All containers are
frozen dataclasses whose numpy arrays are marked read-only, so instances can
be shared between worker threads without copying.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np

from ..utils.errors import ErrorCode, ScatteringError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

EPSILON = -1


class PotentialKind(str, Enum):
    """Which equation's variable a sample holds."""

    Q_GAUGE = "Q_GAUGE"
    U_GAUGE = "U_GAUGE"


class Side(str, Enum):
    MINUS = "MINUS"
    PLUS = "PLUS"


class Column(str, Enum):
    FIRST = "FIRST"
    SECOND = "SECOND"


def _frozen_array(values: Iterable, dtype=complex) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class UniformGrid:
    """Uniform grid header {x0, dx, n}."""

    x0: float
    dx: float
    n: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ScatteringError(ErrorCode.DOMAIN, f"grid spacing must be positive, got {self.dx}")
        if int(self.n) < 1:
            raise ScatteringError(ErrorCode.DOMAIN, f"grid needs at least one point, got {self.n}")
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "n", int(self.n))

    @property
    def points(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def end(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    @classmethod
    def symmetric(cls, half_width: float, n: int) -> "UniformGrid":
        """Grid on [-half_width, half_width] with n points."""
        return cls(-half_width, 2.0 * half_width / (n - 1), n)


@dataclass(frozen=True, eq=False)
class PotentialSample:
    """
    A complex field sampled on a uniform truncated x-grid.

    Args:
        x0: Left endpoint
        dx: Grid spacing
        values: Samples of q or u
        kind: Which variable the samples hold
        tail_tol: Largest modulus allowed at the two boundary samples
    """

    x0: float
    dx: float
    values: np.ndarray
    kind: PotentialKind = PotentialKind.Q_GAUGE
    tail_tol: float = 1e-6

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1 or values.size == 0:
            raise ScatteringError(ErrorCode.DOMAIN, "potential values must be a non-empty 1-d array")
        if not self.dx > 0:
            raise ScatteringError(ErrorCode.DOMAIN, f"dx must be positive, got {self.dx}")
        if not self.tail_tol > 0:
            raise ScatteringError(ErrorCode.DOMAIN, f"tail_tol must be positive, got {self.tail_tol}")
        if not np.all(np.isfinite(values)):
            raise ScatteringError(ErrorCode.DOMAIN, "potential values must be finite")
        edge = max(abs(values[0]), abs(values[-1]))
        if edge > self.tail_tol:
            raise ScatteringError(
                ErrorCode.DOMAIN,
                f"boundary samples exceed tail tolerance: {edge:.3e} > {self.tail_tol:.3e}",
                {"edge": float(edge), "tail_tol": float(self.tail_tol)},
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "kind", PotentialKind(self.kind))
        object.__setattr__(self, "tail_tol", float(self.tail_tol))

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def grid(self) -> UniformGrid:
        return UniformGrid(self.x0, self.dx, self.n)

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    @property
    def x_end(self) -> float:
        return self.grid.end

    def with_values(self, values: Sequence[complex], kind: Optional[PotentialKind] = None) -> "PotentialSample":
        return replace(self, values=np.asarray(values, dtype=complex), kind=kind or self.kind)

    @classmethod
    def from_function(cls, func, x0: float, x1: float, n: int,
                      kind: PotentialKind = PotentialKind.Q_GAUGE,
                      tail_tol: float = 1e-6) -> "PotentialSample":
        """Sample func on n uniform points of [x0, x1]."""
        grid = UniformGrid(x0, (x1 - x0) / (n - 1), n)
        return cls(grid.x0, grid.dx, np.asarray(func(grid.points), dtype=complex), kind, tail_tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PotentialSample):
            return NotImplemented
        return (self.x0 == other.x0 and self.dx == other.dx and self.kind == other.kind
                and self.tail_tol == other.tail_tol and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class DiscreteDatum:
    """One eigenvalue with its norming constant."""

    lam: complex
    C: complex

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "C", complex(self.C))
        if not self.lam.imag > 0:
            raise ScatteringError(ErrorCode.DOMAIN, f"eigenvalue must lie in the upper half-plane: {self.lam}")
        if self.C == 0:
            raise ScatteringError(ErrorCode.DOMAIN, f"norming constant must be nonzero for {self.lam}")


@dataclass(frozen=True, eq=False)
class ScatteringData:
    """
    Reflection coefficient on a symmetric real lambda-grid plus discrete data.

    Args:
        lambda_grid: Uniform symmetric grid on [-Lambda, Lambda]
        rho: Reflection coefficient samples on the grid
        discrete: Eigenvalue / norming constant pairs
        epsilon: Sign convention, always -1
    """

    lambda_grid: UniformGrid
    rho: np.ndarray
    discrete: Tuple[DiscreteDatum, ...] = ()
    epsilon: int = EPSILON

    def __post_init__(self):
        rho = _frozen_array(self.rho)
        if rho.ndim != 1 or rho.size != self.lambda_grid.n:
            raise ScatteringError(
                ErrorCode.DOMAIN,
                f"rho has {rho.size} samples but the grid has {self.lambda_grid.n}",
            )
        if self.epsilon != EPSILON:
            raise ScatteringError(ErrorCode.DOMAIN, f"only epsilon = -1 is supported, got {self.epsilon}")
        scale = max(abs(self.lambda_grid.x0), abs(self.lambda_grid.end), 1.0)
        if abs(self.lambda_grid.x0 + self.lambda_grid.end) > 1e-9 * scale:
            raise ScatteringError(ErrorCode.DOMAIN, "lambda grid must be symmetric about 0")
        discrete = tuple(d if isinstance(d, DiscreteDatum) else DiscreteDatum(*d) for d in self.discrete)
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "discrete", discrete)

    @property
    def lam(self) -> np.ndarray:
        return self.lambda_grid.points

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([d.lam for d in self.discrete], dtype=complex)

    @property
    def norming_constants(self) -> np.ndarray:
        return np.array([d.C for d in self.discrete], dtype=complex)

    @property
    def n_solitons(self) -> int:
        return len(self.discrete)

    @property
    def half_width(self) -> float:
        return self.lambda_grid.end

    def with_rho(self, rho: Sequence[complex]) -> "ScatteringData":
        return replace(self, rho=np.asarray(rho, dtype=complex))

    def with_discrete(self, discrete: Iterable) -> "ScatteringData":
        return replace(self, discrete=tuple(discrete))

    @classmethod
    def reflectionless(cls, pairs: Iterable, half_width: float = 5.0, n: int = 1001) -> "ScatteringData":
        """rho = 0 on a symmetric grid together with the given (lambda, C) pairs."""
        grid = UniformGrid.symmetric(half_width, n)
        return cls(grid, np.zeros(n, dtype=complex), tuple(pairs))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScatteringData):
            return NotImplemented
        return (self.lambda_grid == other.lambda_grid and self.epsilon == other.epsilon
                and self.discrete == other.discrete and np.array_equal(self.rho, other.rho))


@dataclass(frozen=True, eq=False)
class JostColumn:
    """One column of a normalized Jost solution n^± sampled on the x-grid."""

    lam: complex
    side: Side
    column: Column
    x: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", _frozen_array(self.x, dtype=float))
        object.__setattr__(self, "values", _frozen_array(self.values))

    @property
    def normalization(self) -> np.ndarray:
        """Values at the end where the column tends to a unit vector."""
        return self.values[0] if self.side == Side.MINUS else self.values[-1]


@dataclass(frozen=True, eq=False)
class Circle:
    """
    Counter-clockwise circle around an eigenvalue or its conjugate.

    Args:
        index: Position of the eigenvalue in ScatteringData.discrete
        conjugate: True for the circle around conj(lambda_k)
        center: Circle center
        radius: Circle radius
        nodes: Trapezoid nodes on the circle
        weights: dz weights for the nodes
    """

    index: int
    conjugate: bool
    center: complex
    radius: float
    nodes: np.ndarray
    weights: np.ndarray
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "nodes", _frozen_array(self.nodes))
        object.__setattr__(self, "weights", _frozen_array(self.weights))


@dataclass(frozen=True, eq=False)
class ContourSpec:
    """Real-line quadrature plus the circles of the augmented contour."""

    real_nodes: np.ndarray
    real_weights: np.ndarray
    circles: Tuple[Circle, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "real_nodes", _frozen_array(self.real_nodes, dtype=float))
        object.__setattr__(self, "real_weights", _frozen_array(self.real_weights, dtype=float))
        object.__setattr__(self, "circles", tuple(self.circles))

    @property
    def n_real(self) -> int:
        return self.real_nodes.size

    @property
    def size(self) -> int:
        return self.n_real + sum(c.nodes.size for c in self.circles)

    @property
    def real_spacing(self) -> float:
        return float(self.real_nodes[1] - self.real_nodes[0]) if self.n_real > 1 else 0.0

    def all_nodes(self) -> np.ndarray:
        return np.concatenate([self.real_nodes.astype(complex)] + [c.nodes for c in self.circles])

    def all_weights(self) -> np.ndarray:
        return np.concatenate([self.real_weights.astype(complex)] + [c.weights for c in self.circles])


@dataclass(frozen=True)
class PhaseParams:
    """Phase theta(lambda, xi) = 2 lambda^2 + lambda xi and its stationary point."""

    xi: float
    t: float

    def __post_init__(self):
        if not self.t > 0:
            raise ScatteringError(ErrorCode.DOMAIN, f"phase parameters need t > 0, got {self.t}")

    @classmethod
    def from_xt(cls, x: float, t: float) -> "PhaseParams":
        return cls(x / t, t)

    @property
    def lambda0(self) -> float:
        return -self.xi / 4.0

    def theta(self, lam):
        return 2.0 * lam ** 2 + lam * self.xi


@dataclass(frozen=True)
class ValidationReport:
    c2: float
    d_lambda: float
    c2_threshold: float
    d_lambda_threshold: float
    passed: bool
    message: str = ""


def min_pairwise_distance(eigenvalues: np.ndarray) -> float:
    """Smallest distance within {lambda_k} together with their conjugates."""
    points = np.concatenate([eigenvalues, np.conj(eigenvalues)])
    if points.size < 2:
        return float("inf")
    gaps = np.abs(points[:, None] - points[None, :])
    np.fill_diagonal(gaps, np.inf)
    return float(gaps.min())


def validate_scattering_data(sd: ScatteringData, c2_threshold: float = 1e-3,
                             d_lambda_threshold: float = 1e-6,
                             raise_on_fail: bool = True) -> ValidationReport:
    """
    Check the genericity bounds of scattering data.

    Args:
        sd: Scattering data
        c2_threshold: Lower bound for min(1 + lambda |rho|^2)
        d_lambda_threshold: Lower bound for the eigenvalue separation
        raise_on_fail: Raise ScatteringError instead of returning a failed report

    Returns:
        ValidationReport with c2 and d_Lambda
    """
    c2 = float(np.min(1.0 + sd.lam * np.abs(sd.rho) ** 2))
    d_lambda = min_pairwise_distance(sd.eigenvalues)

    if c2 <= c2_threshold:
        message = f"1 + lambda|rho|^2 drops to {c2:.3e} (threshold {c2_threshold:.1e})"
        if raise_on_fail:
            where = int(np.argmin(1.0 + sd.lam * np.abs(sd.rho) ** 2))
            raise ScatteringError(ErrorCode.SPECTRAL_SINGULARITY, message,
                                  {"c2": c2, "lambda": float(sd.lam[where])})
        return ValidationReport(c2, d_lambda, c2_threshold, d_lambda_threshold, False, message)

    if d_lambda <= d_lambda_threshold:
        message = f"eigenvalues only {d_lambda:.3e} apart (threshold {d_lambda_threshold:.1e})"
        if raise_on_fail:
            raise ScatteringError(ErrorCode.DEGENERATE_SPECTRUM, message, {"d_lambda": d_lambda})
        return ValidationReport(c2, d_lambda, c2_threshold, d_lambda_threshold, False, message)

    logger.debug(f"Scattering data valid: c2={c2:.6f}, d_lambda={d_lambda:.3e}, N={sd.n_solitons}")
    return ValidationReport(c2, d_lambda, c2_threshold, d_lambda_threshold, True, "ok")


def reflect_sign_convention(u: PotentialSample) -> PotentialSample:
    """
    Map a solution of the epsilon = +1 equation to epsilon = -1 via u(x) -> u(-x).

    The grid is mirrored so that the returned sample is again increasing in x.
    """
    return replace(u, x0=-u.x_end, values=u.values[::-1].copy())
