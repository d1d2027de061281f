# src/dnls_ist/core/pipeline.py
"""
Main pipeline orchestrating scattering, evolution, reconstruction,
asymptotics and the reference solver under one configuration.
"""
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from .asymptotics import AsymptoticProfile, ConeSelection, asymptotic_profile, mass_trace
from .direct_scattering import direct_map
from .evolution import evolve
from .pde_reference import PDEConfig, conserved_report, step_dnls
from .rhp_inverse import inverse_map
from .solitons import ReflectionlessData, gauge, gauge_inverse, nsoliton_q
from .types import PotentialKind, PotentialSample, ScatteringData, UniformGrid
from .verification import SUITES, VerifyReport, verify_suite
from ..utils.helpers import merge_config, resolve_config, validate_config
from ..utils.logger import set_console_level, setup_logger

logger = setup_logger(__name__)


class IstPipeline:
    """
    Config-driven facade over the toolkit.
    """

    def __init__(self, config_path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None,
                 use_file: bool = True):
        """
        Initialize the pipeline.

        Args:
            config_path: Path to configuration file (defaults to config/config.json)
            overrides: Values taking precedence over the file
            use_file: Read no file and start from the built-in defaults when False
        """
        self.config = merge_config(resolve_config(config_path, use_file), overrides)
        validate_config(self.config)
        set_console_level(self.config["logging"]["level"])
        logger.info("IST pipeline initialized successfully")

    def scatter(self, potential: PotentialSample) -> ScatteringData:
        """
        Scattering data of a potential; u-gauge samples are gauged first.

        Args:
            potential: q- or u-gauge sample

        Returns:
            Validated ScatteringData
        """
        q = gauge(potential) if potential.kind == PotentialKind.U_GAUGE else potential
        sd = direct_map(q, self.config)
        logger.info(f"Scattering data ready: N={sd.n_solitons}, trace mass {mass_trace(sd):.6f}")
        return sd

    def evolve(self, sd: ScatteringData, t: float) -> ScatteringData:
        return evolve(sd, t)

    def reconstruct(self, sd: ScatteringData, x_grid: Union[UniformGrid, Sequence[float]], t: float = 0.0,
                    kind: PotentialKind = PotentialKind.Q_GAUGE) -> PotentialSample:
        """
        q(x, t) (or u when kind is U_GAUGE) from time-0 scattering data.
        """
        q = inverse_map(sd, x_grid, t, self.config)
        return gauge_inverse(q) if kind == PotentialKind.U_GAUGE else q

    def soliton(self, data: ReflectionlessData, x: Sequence[float], t: float = 0.0) -> np.ndarray:
        return np.asarray(nsoliton_q(data, np.asarray(x, dtype=float), t))

    def asymptotics(self, sd: ScatteringData, x: Sequence[float], t: float, cone: ConeSelection) -> AsymptoticProfile:
        return asymptotic_profile(sd, x, t, cone, self.config)

    def pde(self, u: PotentialSample, t_end: float, **overrides) -> PotentialSample:
        """
        Evolve a u-gauge sample with the reference solver.

        Args:
            u: Initial data
            t_end: Final time
            overrides: PDEConfig fields (L, n, dt, ...) replacing configured values
        """
        cfg = PDEConfig.from_config(self.config, t_end=t_end, **overrides)
        before = conserved_report(u)["mass"]
        result = step_dnls(u, cfg)
        after = conserved_report(result)["mass"]
        logger.info(f"PDE run finished: mass {before:.8f} -> {after:.8f}")
        return result

    def verify(self, suites: Optional[Iterable[str]] = None) -> List[VerifyReport]:
        """
        Run verification suites.

        Args:
            suites: Suite names (defaults to all)

        Returns:
            One VerifyReport per suite
        """
        names = list(suites) if suites else list(SUITES)
        reports = [verify_suite(name, self.config) for name in names]
        failed = [r.suite for r in reports if not r.passed]
        if failed:
            logger.error(f"Verification failed for: {', '.join(failed)}")
        else:
            logger.info(f"All {len(reports)} verification suite(s) passed")
        return reports
