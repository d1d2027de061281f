# src/dnls_ist/core/fixtures.py
"""
Bundled test potentials and scattering data.

Every fixture is generated from closed-form expressions, so the files
written by scripts/generate_fixtures.py can always be rebuilt.
"""
from pathlib import Path
from typing import Callable, Dict, Union

import numpy as np

from .solitons import ReflectionlessData, SolitonParams, nsoliton_q, planted_potential
from .types import DiscreteDatum, PotentialKind, PotentialSample, ScatteringData, UniformGrid
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

X_MAX = 30.0
N_X = 2401


def _datum(omega: float, c: float, x0: float = 0.0, phi0: float = 0.0) -> DiscreteDatum:
    p = SolitonParams(omega, c, x0, phi0)
    return DiscreteDatum(p.eigenvalue, p.norming_constant)


# omega, c, x0, phi0 per soliton; velocities are distinct
PLANTED = {
    1: ((1.0, 0.0, 0.0, 0.0),),
    2: ((1.0, 1.0, -3.0, 0.0), (1.2, -0.8, 3.0, 1.0)),
    3: ((1.0, 1.2, -5.0, 0.0), (0.9, 0.0, 0.0, 0.5), (1.1, -1.0, 5.0, 2.0)),
}


def planted_data(n_solitons: int) -> ReflectionlessData:
    """Reflectionless data of the bundled 1-, 2- or 3-soliton."""
    return ReflectionlessData(tuple(_datum(*row) for row in PLANTED[n_solitons]))


def planted_sample(n_solitons: int, x_max: float = X_MAX, n: int = N_X) -> PotentialSample:
    return planted_potential(planted_data(n_solitons), -x_max, x_max, n)


def gaussian_sample(amplitude: float = 0.3, width: float = 1.0, x_max: float = 12.0, n: int = 961) -> PotentialSample:
    """q0 = A exp(-x^2 / w^2); small amplitude carries no eigenvalues."""
    return PotentialSample.from_function(lambda x: amplitude * np.exp(-(x / width) ** 2), -x_max, x_max, n)


def sech_sample(amplitude: float = 0.5, chirp: float = 0.5, x_max: float = 20.0, n: int = 1601) -> PotentialSample:
    """q0 = A sech(x) exp(i chirp x)."""
    return PotentialSample.from_function(lambda x: amplitude / np.cosh(x) * np.exp(1j * chirp * x), -x_max, x_max, n)


def soliton_radiation_sample(n_solitons: int = 1, eta: float = 0.05, x_max: float = X_MAX,
                             n: int = N_X) -> PotentialSample:
    """Planted soliton(s) plus a small off-center Gaussian bump."""
    x = np.linspace(-x_max, x_max, n)
    values = nsoliton_q(planted_data(n_solitons), x) + eta * np.exp(-(x - 1.0) ** 2) * np.exp(0.7j * x)
    return PotentialSample(-x_max, 2.0 * x_max / (n - 1), values, PotentialKind.Q_GAUGE)


def synthetic_scattering(amplitude: float = 0.3, half_width: float = 5.0, n: int = 1001) -> ScatteringData:
    """rho(lam) = A exp(-lam^2 + i lam) without eigenvalues."""
    grid = UniformGrid.symmetric(half_width, n)
    lam = grid.points
    return ScatteringData(grid, amplitude * np.exp(-lam ** 2 + 1j * lam))


def zero_scattering(half_width: float = 5.0, n: int = 1001) -> ScatteringData:
    return ScatteringData.reflectionless((), half_width, n)


FIXTURES: Dict[str, Callable[[], Union[PotentialSample, ScatteringData]]] = {
    "gaussian": gaussian_sample,
    "sech": sech_sample,
    "planted1": lambda: planted_sample(1),
    "planted2": lambda: planted_sample(2),
    "planted3": lambda: planted_sample(3),
    "soliton_radiation": lambda: soliton_radiation_sample(1),
    "two_soliton_radiation": lambda: soliton_radiation_sample(2),
    "synthetic_rho": synthetic_scattering,
    "zero_rho": zero_scattering,
}


def load_fixture(name: str) -> Union[PotentialSample, ScatteringData]:
    if name not in FIXTURES:
        raise KeyError(f"Unknown fixture '{name}'. Available: {sorted(FIXTURES)}")
    return FIXTURES[name]()


def write_fixtures(directory: Union[str, Path]) -> Dict[str, Path]:
    """Write every fixture as <name>.json under directory."""
    from ..connectors.serialization import save

    directory = Path(directory)
    written = {name: save(build(), directory / f"{name}.json") for name, build in FIXTURES.items()}
    logger.info(f"Wrote {len(written)} fixture(s) to {directory}")
    return written
