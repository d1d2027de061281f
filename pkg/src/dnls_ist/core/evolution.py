# src/dnls_ist/core/evolution.py
"""
Exact time evolution of scattering data.

    rho(lam, t) = exp(-4 i lam^2 t) rho(lam),   lambda_k(t) = lambda_k,
    C_k(t)      = exp(+4 i lambda_k^2 t) C_k.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from .types import DiscreteDatum, ScatteringData
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


def rho_phase(lam, t: float):
    return np.exp(-4j * np.asarray(lam) ** 2 * t)


def norming_phase(lam_k, t: float):
    return np.exp(4j * np.asarray(lam_k) ** 2 * t)


def evolve(sd: ScatteringData, t: float) -> ScatteringData:
    """
    Scattering data at time t.

    Args:
        sd: Data at time 0
        t: Evolution time (any sign)

    Returns:
        New ScatteringData on the same lambda-grid
    """
    if t == 0:
        return sd
    rho = sd.rho * rho_phase(sd.lam, t)
    discrete = tuple(DiscreteDatum(d.lam, d.C * complex(norming_phase(d.lam, t))) for d in sd.discrete)
    logger.debug(f"Evolved {sd.n_solitons} eigenvalue(s) and {sd.lambda_grid.n} rho samples to t={t}")
    return ScatteringData(sd.lambda_grid, rho, discrete, sd.epsilon)


class ReflectionInterpolant:
    """Cubic-spline rho(lam) from grid samples, zero outside the grid."""

    def __init__(self, sd: ScatteringData):
        self.lo = sd.lambda_grid.x0
        self.hi = sd.lambda_grid.end
        if sd.lambda_grid.n >= 4:
            self._re = CubicSpline(sd.lam, sd.rho.real)
            self._im = CubicSpline(sd.lam, sd.rho.imag)
        else:
            self._re = lambda s: np.interp(s, sd.lam, sd.rho.real)
            self._im = lambda s: np.interp(s, sd.lam, sd.rho.imag)

    def __call__(self, lam):
        lam = np.asarray(lam, dtype=float)
        inside = (lam >= self.lo) & (lam <= self.hi)
        clipped = np.clip(lam, self.lo, self.hi)
        return np.where(inside, self._re(clipped) + 1j * self._im(clipped), 0.0)


@dataclass(frozen=True, eq=False)
class LazyEvolution:
    """
    Time-0 data with phase factors applied at evaluation time.

    Keeps the base data exact for very large t; materialize() gives the
    eagerly evolved object for serialization.
    """

    sd: ScatteringData
    t: float

    @cached_property
    def _base_rho(self) -> Callable:
        return ReflectionInterpolant(self.sd)

    def rho_at(self, lam):
        return self._base_rho(lam) * rho_phase(lam, self.t)

    def rho_on_grid(self) -> np.ndarray:
        return self.sd.rho * rho_phase(self.sd.lam, self.t)

    def norming_constants(self) -> np.ndarray:
        return self.sd.norming_constants * norming_phase(self.sd.eigenvalues, self.t)

    def materialize(self) -> ScatteringData:
        return evolve(self.sd, self.t)
