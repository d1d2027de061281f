# src/dnls_ist/core/solitons.py
"""
Reflectionless solutions and the u <-> q gauge transformation.

The solitary wave of iu_t + u_xx + i(|u|^2 u)_x = 0 is

    u(x, t) = phi(y) exp(i[omega t + (c/2) y - (3/4) F(y)]) exp(-i phi0),
    y = x - x0 - c t,  phi^2 = 2k^2 / (2 sqrt(omega) cosh(k y) - c),  k^2 = 4 omega - c^2,

with F(y) the integral of phi^2 from -inf to y. Its spectral data are a
single eigenvalue lam = nu + i mu with omega = 4|lam|^2, c = -4 nu.

N-soliton solutions come from the residue-only Riemann-Hilbert problem,
solved through the partial-fraction ansatz

    N1(z) = 1 + sum A_k / (z - lam_k),   N2(z) = sum B_k / (z - conj(lam_k)).
"""
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .types import DiscreteDatum, PotentialKind, PotentialSample, ScatteringData
from ..utils.errors import ErrorCode, ScatteringError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

CONDITION_LIMIT = 1e13


@dataclass(frozen=True)
class SolitonParams:
    """
    Solitary-wave parameters (omega, c, x_offset, phi0).

    Args:
        omega: Frequency, 4 omega > c^2
        c: Velocity
        x_offset: Position at t = 0
        phi0: Phase offset
    """

    omega: float
    c: float
    x_offset: float = 0.0
    phi0: float = 0.0

    def __post_init__(self):
        if not 4.0 * self.omega - self.c ** 2 > 0:
            raise ScatteringError(ErrorCode.PARAM, f"need 4 omega > c^2, got omega={self.omega}, c={self.c}",
                                  {"omega": self.omega, "c": self.c})

    @property
    def k(self) -> float:
        return float(np.sqrt(4.0 * self.omega - self.c ** 2))

    @property
    def r(self) -> float:
        root = 2.0 * np.sqrt(self.omega)
        return float(np.sqrt((root + self.c) / (root - self.c)))

    @property
    def eigenvalue(self) -> complex:
        nu = -self.c / 4.0
        return complex(nu, self.k / 4.0)

    @property
    def norming_constant(self) -> complex:
        lam = self.eigenvalue
        nu, mu = lam.real, lam.imag
        modulus = np.sqrt(4.0 * mu ** 2 * np.exp(4.0 * mu * self.x_offset) / abs(lam))
        phase = self.phi0 - np.angle(lam) - 0.5 * np.pi - 2.0 * nu * self.x_offset
        return complex(modulus * np.exp(1j * phase))

    @classmethod
    def from_spectral(cls, lam: complex, C: complex) -> "SolitonParams":
        """Parameters of the soliton generated by the single datum (lam, C)."""
        lam = complex(lam)
        if not lam.imag > 0 or C == 0:
            raise ScatteringError(ErrorCode.PARAM, f"invalid spectral datum ({lam}, {C})")
        nu, mu = lam.real, lam.imag
        x0 = np.log(abs(lam) * abs(C) ** 2 / (4.0 * mu ** 2)) / (4.0 * mu)
        phi0 = np.angle(lam) + np.angle(C) + 0.5 * np.pi + 2.0 * nu * x0
        return cls(4.0 * abs(lam) ** 2, -4.0 * nu, float(x0), float(phi0))


def _profile(p: SolitonParams, y):
    """phi(y) and F(y) = integral of phi^2 up to y, both in closed form."""
    k = p.k
    phi2 = 2.0 * k ** 2 / (2.0 * np.sqrt(p.omega) * np.cosh(k * y) - p.c)
    mass_left = 4.0 * (np.arctan(p.r * np.tanh(0.5 * k * y)) + np.arctan(p.r))
    return np.sqrt(phi2), mass_left


def one_soliton_u(p: SolitonParams, x, t: float = 0.0):
    """Solitary wave u(x, t) of the DNLS equation."""
    y = np.asarray(x, dtype=float) - p.x_offset - p.c * t
    phi, mass_left = _profile(p, y)
    return phi * np.exp(1j * (p.omega * t + 0.5 * p.c * y - 0.75 * mass_left - p.phi0))


def one_soliton_q(p: SolitonParams, x, t: float = 0.0):
    """Gauge transform of one_soliton_u, in closed form."""
    y = np.asarray(x, dtype=float) - p.x_offset - p.c * t
    phi, mass_left = _profile(p, y)
    return phi * np.exp(1j * (p.omega * t + 0.5 * p.c * y + 0.25 * mass_left - p.phi0))


def soliton_l2_norm(omega: float, c: float) -> float:
    """Squared L2 norm 8 arctan(sqrt((2 sqrt(omega) + c) / (2 sqrt(omega) - c)))."""
    return 8.0 * float(np.arctan(SolitonParams(omega, c).r))


@dataclass(frozen=True)
class ReflectionlessData:
    """Residue data {(lambda_k, C_k)} of a pure soliton solution."""

    pairs: Tuple[DiscreteDatum, ...] = ()

    def __post_init__(self):
        pairs = tuple(d if isinstance(d, DiscreteDatum) else DiscreteDatum(*d) for d in self.pairs)
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_scattering(cls, sd: ScatteringData) -> "ReflectionlessData":
        return cls(sd.discrete)

    @classmethod
    def of(cls, pairs: Iterable) -> "ReflectionlessData":
        return cls(tuple(pairs))

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([d.lam for d in self.pairs], dtype=complex)

    @property
    def norming_constants(self) -> np.ndarray:
        return np.array([d.C for d in self.pairs], dtype=complex)

    @property
    def n(self) -> int:
        return len(self.pairs)


class SolitonMatrix:
    """
    Solution P(z) of the residue-only problem at fixed (x, t), batched over x.

    Rows of the 2N x 2N system whose coupling coefficient exceeds one in
    modulus are divided by that coefficient, so the assembled matrices stay
    bounded however far the solitons have separated.

    Args:
        data: Reflectionless data
        x: Position(s)
        t: Time
    """

    def __init__(self, data: ReflectionlessData, x, t: float = 0.0):
        self.data = data
        self.x = np.atleast_1d(np.asarray(x, dtype=float))
        self.t = float(t)
        n = data.n
        nx = self.x.size
        if n == 0:
            self.A = self.B = self.A2 = self.B2 = np.zeros((nx, 0), dtype=complex)
            self.gamma = np.zeros(nx, dtype=complex)
            return
        lam = data.eigenvalues
        log_e = (np.log(data.norming_constants)[None, :] + 2j * lam[None, :] * self.x[:, None]
                 + 4j * lam[None, :] ** 2 * self.t)
        log_c = np.log(lam)[None, :] + log_e
        log_d = np.log(-1.0 + 0j) + np.conj(log_e)
        scale_c = log_c.real > 0
        scale_d = log_d.real > 0
        c = np.where(scale_c, 0.0, np.exp(np.where(scale_c, 0.0, log_c)))
        d = np.where(scale_d, 0.0, np.exp(np.where(scale_d, 0.0, log_d)))
        inv_c = np.where(scale_c, np.exp(-np.where(scale_c, log_c, 0.0)), 0.0)
        inv_d = np.where(scale_d, np.exp(-np.where(scale_d, log_d, 0.0)), 0.0)

        L = 1.0 / (lam[:, None] - np.conj(lam)[None, :])
        K = 1.0 / (np.conj(lam)[:, None] - lam[None, :])
        eye = np.eye(n)
        M = np.zeros((nx, 2 * n, 2 * n), dtype=complex)
        M[:, :n, :n] = np.where(scale_c[:, :, None], inv_c[:, :, None] * eye, eye)
        M[:, :n, n:] = -np.where(scale_c[:, :, None], L[None], c[:, :, None] * L[None])
        M[:, n:, n:] = np.where(scale_d[:, :, None], inv_d[:, :, None] * eye, eye)
        M[:, n:, :n] = -np.where(scale_d[:, :, None], K[None], d[:, :, None] * K[None])

        try:
            condition = np.linalg.cond(M)
        except np.linalg.LinAlgError as e:
            raise ScatteringError(ErrorCode.SINGULAR_SYSTEM, f"soliton system is singular: {e}")
        if not np.all(np.isfinite(condition)) or np.max(condition) > CONDITION_LIMIT:
            worst = int(np.nanargmax(np.where(np.isfinite(condition), condition, np.inf)))
            raise ScatteringError(ErrorCode.SINGULAR_SYSTEM,
                                  f"soliton system condition number {condition[worst]:.3e}",
                                  {"x": float(self.x[worst]), "t": self.t})

        rhs1 = np.zeros((nx, 2 * n), dtype=complex)
        rhs1[:, n:] = np.where(scale_d, 1.0, d)
        first = np.linalg.solve(M, rhs1[..., None])[..., 0]
        self.A, self.B = first[:, :n], first[:, n:]
        self.gamma = -np.conj(np.sum(self.B, axis=1))

        rhs2 = np.zeros((nx, 2 * n), dtype=complex)
        rhs2[:, :n] = np.where(scale_c, 1.0, c)
        rhs2[:, n:] = np.where(scale_d, 1.0, d) * self.gamma[:, None]
        second = np.linalg.solve(M, rhs2[..., None])[..., 0]
        self.A2, self.B2 = second[:, :n], second[:, n:]

    def q(self) -> np.ndarray:
        """Potential q(x, t) = 2i sum B_k."""
        return 2j * np.sum(self.B, axis=1)

    def __call__(self, z) -> np.ndarray:
        """P(z), shape (nx, nz, 2, 2)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        lam = self.data.eigenvalues
        pole = 1.0 / (z[:, None] - lam[None, :])
        conj_pole = 1.0 / (z[:, None] - np.conj(lam)[None, :])
        out = np.empty((self.x.size, z.size, 2, 2), dtype=complex)
        out[..., 0, 0] = 1.0 + np.einsum("xk,zk->xz", self.A, pole)
        out[..., 0, 1] = np.einsum("xk,zk->xz", self.B, conj_pole)
        out[..., 1, 0] = self.gamma[:, None] + np.einsum("xk,zk->xz", self.A2, pole)
        out[..., 1, 1] = 1.0 + np.einsum("xk,zk->xz", self.B2, conj_pole)
        return out


def nsoliton_matrix(d: ReflectionlessData, x: float, t: float, z) -> np.ndarray:
    """
    P^sol(z) for reflectionless data at a single (x, t).

    Args:
        d: Reflectionless data
        x: Position
        t: Time
        z: Scalar or array of points away from lambda_k and their conjugates

    Returns:
        (2, 2) matrix for scalar z, (nz, 2, 2) otherwise
    """
    points = np.asarray(z, dtype=complex)
    lam = d.eigenvalues
    if lam.size and np.min(np.abs(np.concatenate([points.ravel()[:, None] - lam[None, :],
                                                  points.ravel()[:, None] - np.conj(lam)[None, :]], axis=1))) == 0:
        raise ScatteringError(ErrorCode.DOMAIN, "P^sol is evaluated at a pole")
    values = SolitonMatrix(d, x, t)(points.ravel())[0]
    return values[0] if points.ndim == 0 else values.reshape(points.shape + (2, 2))


def nsoliton_q(d: ReflectionlessData, x, t: float = 0.0):
    """q_sol(x, t) = lim 2 i z N12, vectorized over x."""
    values = SolitonMatrix(d, x, t).q()
    return values[0] if np.ndim(x) == 0 else values.reshape(np.shape(x))


def gauge(u: PotentialSample) -> PotentialSample:
    """
    q = u exp(i integral_{-inf}^x |u|^2), mapping DNLS to its gauge form.

    The integral starts at the left grid end, where u is below tail_tol.
    """
    if u.kind != PotentialKind.U_GAUGE:
        raise ScatteringError(ErrorCode.DOMAIN, "gauge expects a U_GAUGE sample")
    mass = cumulative_trapezoid(np.abs(u.values) ** 2, dx=u.dx, initial=0.0)
    return u.with_values(u.values * np.exp(1j * mass), PotentialKind.Q_GAUGE)


def gauge_inverse(q: PotentialSample) -> PotentialSample:
    """u = q exp(-i integral_{-inf}^x |q|^2)."""
    if q.kind != PotentialKind.Q_GAUGE:
        raise ScatteringError(ErrorCode.DOMAIN, "gauge_inverse expects a Q_GAUGE sample")
    mass = cumulative_trapezoid(np.abs(q.values) ** 2, dx=q.dx, initial=0.0)
    return q.with_values(q.values * np.exp(-1j * mass), PotentialKind.U_GAUGE)


def gauge_inverse_values(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    """gauge_inverse on a bare (possibly non-uniform) grid."""
    mass = cumulative_trapezoid(np.abs(q) ** 2, x, initial=0.0)
    return q * np.exp(-1j * mass)


def planted_potential(d: ReflectionlessData, x0: float, x1: float, n: int, t: float = 0.0,
                      tail_tol: float = 1e-6) -> PotentialSample:
    """q-gauge sample of the N-soliton with data d on [x0, x1]."""
    x = np.linspace(x0, x1, n)
    return PotentialSample(x0, (x1 - x0) / (n - 1), nsoliton_q(d, x, t), PotentialKind.Q_GAUGE, tail_tol)
