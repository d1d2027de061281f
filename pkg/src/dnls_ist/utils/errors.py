# src/dnls_ist/utils/errors.py
"""
Domain errors raised by the scattering, inverse and asymptotic modules.
"""
from enum import Enum
from typing import Any, Dict, Optional


class ErrorCode(str, Enum):
    """Machine-readable failure categories."""

    SPECTRAL_SINGULARITY = "SPECTRAL_SINGULARITY"
    DEGENERATE_SPECTRUM = "DEGENERATE_SPECTRUM"
    PARSE_ERROR = "PARSE_ERROR"
    NO_CONVERGENCE = "NO_CONVERGENCE"
    DOMAIN = "DOMAIN"
    WINDING_MISMATCH = "WINDING_MISMATCH"
    NEAR_AXIS = "NEAR_AXIS"
    ILL_CONDITIONED = "ILL_CONDITIONED"
    GENERICITY_FAIL = "GENERICITY_FAIL"
    PARAM = "PARAM"
    SINGULAR_SYSTEM = "SINGULAR_SYSTEM"
    GEOMETRY = "GEOMETRY"
    SOLVER_FAIL = "SOLVER_FAIL"
    ON_CUT = "ON_CUT"
    ZERO_REFLECTION = "ZERO_REFLECTION"
    PRECISION_LOSS = "PRECISION_LOSS"
    REGION = "REGION"
    DEGENERATE_VELOCITIES = "DEGENERATE_VELOCITIES"
    BLOWUP = "BLOWUP"
    CFL = "CFL"


class ScatteringError(Exception):
    """
    Error carrying an ErrorCode and optional diagnostic details.

    Args:
        code: Failure category
        message: Human readable description
        details: Offending indices, fields or measured values
    """

    def __init__(self, code: ErrorCode, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(f"[{code.value}] {message}")
        self.code = code
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"code": self.code.value, "message": self.message, "details": self.details}


# CLI exit codes
EXIT_OK = 0
EXIT_DOMAIN_ERROR = 1
EXIT_USAGE_ERROR = 2
