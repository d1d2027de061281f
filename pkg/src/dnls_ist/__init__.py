"""
DNLS IST - inverse scattering toolkit for the derivative nonlinear Schrodinger equation
"""

__version__ = "1.0.1"
__author__ = "DNLS IST"

# Import main classes for easier access
try:
    from .core.pipeline import IstPipeline
    from .core.types import PotentialKind, PotentialSample, ScatteringData, UniformGrid
    from .core.direct_scattering import direct_map
    from .core.evolution import evolve
    from .core.rhp_inverse import inverse_map
    from .core.solitons import ReflectionlessData, SolitonParams, nsoliton_q
    from .core.asymptotics import ConeSelection, asymptotic_q, asymptotic_u, phase_shifts
    from .core.pde_reference import PDEConfig, step_dnls
    from .core.verification import VerifyReport, verify_suite
    from .utils.errors import ErrorCode, ScatteringError
    from .utils.logger import setup_logger
    from .utils.helpers import load_config, validate_config

    __all__ = [
        'IstPipeline',
        'PotentialKind',
        'PotentialSample',
        'ScatteringData',
        'UniformGrid',
        'direct_map',
        'evolve',
        'inverse_map',
        'ReflectionlessData',
        'SolitonParams',
        'nsoliton_q',
        'ConeSelection',
        'asymptotic_q',
        'asymptotic_u',
        'phase_shifts',
        'PDEConfig',
        'step_dnls',
        'VerifyReport',
        'verify_suite',
        'ErrorCode',
        'ScatteringError',
        'setup_logger',
        'load_config',
        'validate_config',
    ]
except ImportError:
    # Handle import errors gracefully during development
    pass
