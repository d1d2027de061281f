# src/dnls_ist/core/pde_reference.py
"""
Pseudo-spectral reference solver for

    i u_t + u_xx + i (|u|^2 u)_x = 0,

written as u_t = i u_xx - (|u|^2 u)_x on the periodic box [-L, L). The
linear part is integrated exactly (integrating factor); the nonlinear term
is advanced with classical RK4 in the interaction picture and dealiased by
the 2/3 rule.
"""
from dataclasses import dataclass, replace
from typing import Any, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.fft import fft, fftfreq, ifft
from scipy.integrate import trapezoid

from .types import PotentialKind, PotentialSample
from ..utils.errors import ErrorCode, ScatteringError
from ..utils.helpers import DEFAULT_CONFIG
from ..utils.logger import setup_logger

logger = setup_logger(__name__)


@dataclass(frozen=True)
class PDEConfig:
    """
    Discretization of the periodic reference solver.

    Args:
        L: Half-width of the periodic box
        n: Number of Fourier modes (power of two)
        dt: Time step
        t_end: Final time (negative integrates backwards)
        dealias: Fraction of the spectrum kept in the nonlinear term
        check_every: Steps between amplitude and mass checks
        blowup: Largest amplitude tolerated
        cfl: Bound on dt * 3 k_cut max|u|^2
    """

    L: float = 40.0
    n: int = 4096
    dt: float = 1e-4
    t_end: float = 1.0
    dealias: float = 2.0 / 3.0
    check_every: int = 100
    blowup: float = 1e3
    cfl: float = 2.8

    def __post_init__(self):
        n = int(self.n)
        if n <= 0 or n & (n - 1):
            raise ScatteringError(ErrorCode.PARAM, f"n must be a power of two, got {self.n}")
        if not self.L > 0 or not self.dt > 0:
            raise ScatteringError(ErrorCode.PARAM, f"L and dt must be positive, got L={self.L}, dt={self.dt}")
        if not 0.0 < self.dealias <= 1.0:
            raise ScatteringError(ErrorCode.PARAM, f"dealias must lie in (0, 1], got {self.dealias}")
        object.__setattr__(self, "n", n)

    @classmethod
    def from_config(cls, config: Optional[Dict[str, Any]] = None, **overrides) -> "PDEConfig":
        """Build from the pde section of a configuration, with keyword overrides."""
        settings = dict(DEFAULT_CONFIG["pde"])
        if config:
            settings.update(config.get("pde", config))
        settings.update({k: v for k, v in overrides.items() if v is not None})
        fields = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in settings.items() if k in fields})

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.n

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(self.n)


@dataclass(frozen=True)
class StepReport:
    mass_initial: float
    mass_final: float
    steps: int
    max_amplitude: float

    @property
    def drift(self) -> float:
        if self.mass_initial == 0:
            return abs(self.mass_final)
        return abs(self.mass_final - self.mass_initial) / self.mass_initial


def conserved_report(u: PotentialSample) -> Dict[str, float]:
    """Conserved quantities of a sample; currently the mass ||u||^2 by the trapezoid rule."""
    return {"mass": float(trapezoid(np.abs(u.values) ** 2, dx=u.dx))}


class DNLSSolver:
    """
    RK4 interaction-picture stepper on a fixed periodic grid.

    Args:
        cfg: Discretization
    """

    def __init__(self, cfg: PDEConfig):
        self.cfg = cfg
        self.x = cfg.x
        self.k = 2.0 * np.pi * fftfreq(cfg.n, d=cfg.dx)
        self.k_cut = cfg.dealias * np.max(np.abs(self.k))
        self.mask = np.abs(self.k) <= self.k_cut
        self.linear = -1j * self.k ** 2

    def resample(self, u: PotentialSample) -> np.ndarray:
        """Values of u on the periodic grid, zero outside the sample."""
        if u.kind != PotentialKind.U_GAUGE:
            raise ScatteringError(ErrorCode.DOMAIN, "the reference solver evolves U_GAUGE samples")
        if np.isclose(u.x0, self.x[0]) and np.isclose(u.dx, self.cfg.dx) and u.n in (self.cfg.n, self.cfg.n + 1):
            return np.array(u.values[: self.cfg.n], dtype=complex)
        if u.x0 < -self.cfg.L or u.x_end > self.cfg.L:
            logger.warning(f"Sample [{u.x0}, {u.x_end}] is truncated to the box [-{self.cfg.L}, {self.cfg.L})")
        real = np.interp(self.x, u.x, u.values.real, left=0.0, right=0.0)
        imag = np.interp(self.x, u.x, u.values.imag, left=0.0, right=0.0)
        return real + 1j * imag

    def nonlinear(self, v_hat: np.ndarray) -> np.ndarray:
        """-i k F[|u|^2 u] restricted to the dealiased band."""
        u = ifft(v_hat)
        return -1j * self.k * self.mask * fft(np.abs(u) ** 2 * u)

    def check_cfl(self, u: np.ndarray, dt: float) -> None:
        amplitude = float(np.max(np.abs(u))) if u.size else 0.0
        number = abs(dt) * 3.0 * self.k_cut * amplitude ** 2
        if number > self.cfg.cfl:
            logger.error(f"CFL number {number:.3f} exceeds {self.cfg.cfl}")
            raise ScatteringError(ErrorCode.CFL, f"dt * 3 k_cut max|u|^2 = {number:.3f} > {self.cfg.cfl}",
                                  {"cfl": number, "dt": dt, "amplitude": amplitude})

    def step(self, v_hat: np.ndarray, half: np.ndarray, h: float) -> np.ndarray:
        """One RK4IP step of size h; half = exp(h L / 2)."""
        u_i = half * v_hat
        k1 = half * self.nonlinear(v_hat) * h
        k2 = self.nonlinear(u_i + 0.5 * k1) * h
        k3 = self.nonlinear(u_i + 0.5 * k2) * h
        k4 = self.nonlinear(half * (u_i + k3)) * h
        return half * (u_i + k1 / 6.0 + k2 / 3.0 + k3 / 3.0) + k4 / 6.0

    def evolve(self, u0: np.ndarray, t_end: float,
               snapshot_times: Iterable[float] = ()) -> Tuple[np.ndarray, StepReport, List[np.ndarray]]:
        """
        Integrate from t = 0 to t_end.

        Returns:
            (final values, report, snapshots at the requested times)
        """
        cfg = self.cfg
        u0 = np.asarray(u0, dtype=complex)
        mass0 = float(trapezoid(np.abs(u0) ** 2, dx=cfg.dx))
        if t_end == 0:
            report = StepReport(mass0, mass0, 0, float(np.max(np.abs(u0), initial=0.0)))
            return u0.copy(), report, [u0.copy() for _ in snapshot_times]

        n_steps = int(np.ceil(abs(t_end) / cfg.dt))
        h = t_end / n_steps
        self.check_cfl(u0, h)
        half = np.exp(0.5 * h * self.linear)
        targets = sorted(int(round(abs(s) / abs(h))) for s in snapshot_times)
        snapshots: List[np.ndarray] = []
        while targets and targets[0] == 0:
            snapshots.append(u0.copy())
            targets.pop(0)
        v_hat = fft(u0)
        peak = float(np.max(np.abs(u0), initial=0.0))
        for n in range(1, n_steps + 1):
            v_hat = self.step(v_hat, half, h)
            if n % cfg.check_every == 0 or n == n_steps or (targets and n == targets[0]):
                u = ifft(v_hat)
                amplitude = float(np.max(np.abs(u)))
                peak = max(peak, amplitude)
                if not np.isfinite(amplitude) or amplitude > cfg.blowup:
                    logger.error(f"Amplitude {amplitude:.3e} exceeds the blow-up bound at t={n * h:.6g}")
                    raise ScatteringError(ErrorCode.BLOWUP, f"sup|u| = {amplitude:.3e} > {cfg.blowup}",
                                          {"t": n * h, "amplitude": amplitude})
                self.check_cfl(u, h)
                while targets and n == targets[0]:
                    snapshots.append(u.copy())
                    targets.pop(0)
                if n % cfg.check_every == 0:
                    mass = float(trapezoid(np.abs(u) ** 2, dx=cfg.dx))
                    logger.debug(f"t={n * h:.6g}: sup|u|={amplitude:.6g}, mass drift {abs(mass - mass0):.3e}")
        u = ifft(v_hat)
        report = StepReport(mass0, float(trapezoid(np.abs(u) ** 2, dx=cfg.dx)), n_steps, peak)
        return u, report, snapshots


def _as_sample(values: np.ndarray, cfg: PDEConfig, tail_tol: float) -> PotentialSample:
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > tail_tol:
        logger.warning(f"Solution reached the periodic boundary: edge amplitude {edge:.3e}")
        tail_tol = 2.0 * edge
    return PotentialSample(-cfg.L, cfg.dx, values, PotentialKind.U_GAUGE, tail_tol)


def step_dnls(u: PotentialSample, cfg: PDEConfig) -> PotentialSample:
    """
    Evolve a u-gauge sample to cfg.t_end.

    Args:
        u: Initial data, effectively supported inside [-L, L)
        cfg: Discretization and final time

    Returns:
        u(t_end) on the periodic grid

    Raises:
        ScatteringError(BLOWUP / CFL)
    """
    solver = DNLSSolver(cfg)
    values, report, _ = solver.evolve(solver.resample(u), cfg.t_end)
    logger.info(f"DNLS evolved to t={cfg.t_end} in {report.steps} steps, mass drift {report.drift:.3e}")
    return _as_sample(values, cfg, u.tail_tol)


def evolve_snapshots(u: PotentialSample, cfg: PDEConfig, times: Iterable[float]) -> Dict[float, PotentialSample]:
    """Samples at each requested time in [0, cfg.t_end] from a single run."""
    times = sorted(set(float(s) for s in times))
    solver = DNLSSolver(cfg)
    _, report, snapshots = solver.evolve(solver.resample(u), cfg.t_end, times)
    logger.debug(f"Collected {len(snapshots)} snapshot(s), mass drift {report.drift:.3e}")
    return {s: _as_sample(v, cfg, u.tail_tol) for s, v in zip(times, snapshots)}


def spectral_derivative(values: np.ndarray, dx: float, order: int = 1) -> np.ndarray:
    k = 2.0 * np.pi * fftfreq(values.size, d=dx)
    return ifft((1j * k) ** order * fft(values))


def dnls_residual(previous: np.ndarray, current: np.ndarray, following: np.ndarray, dt: float, dx: float) -> np.ndarray:
    """i u_t + u_xx + i (|u|^2 u)_x with a centered time difference and spectral x-derivatives."""
    u_t = (following - previous) / (2.0 * dt)
    return (1j * u_t + spectral_derivative(current, dx, 2)
            + 1j * spectral_derivative(np.abs(current) ** 2 * current, dx))


def gauge_dnls_residual(previous: np.ndarray, current: np.ndarray, following: np.ndarray,
                        dt: float, dx: float) -> np.ndarray:
    """i q_t + q_xx - i q^2 conj(q)_x + |q|^4 q / 2 for the gauge-transformed equation."""
    q_t = (following - previous) / (2.0 * dt)
    q_bar_x = spectral_derivative(np.conj(current), dx)
    return (1j * q_t + spectral_derivative(current, dx, 2) - 1j * current ** 2 * q_bar_x
            + 0.5 * np.abs(current) ** 4 * current)


def with_time(cfg: PDEConfig, t_end: float) -> PDEConfig:
    return replace(cfg, t_end=float(t_end))
