# src/dnls_ist/connectors/serialization.py
"""
JSON and CSV connectors for potentials, scattering data and sampled profiles.

Complex numbers are stored as two-element [re, im] arrays and grids as
{x0, dx, n} headers. Floats go through json's shortest repr, so a
serialize/deserialize cycle is bit-exact.
"""
import json
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import numpy as np
import pandas as pd

from ..core.types import (
    DiscreteDatum,
    EPSILON,
    PotentialKind,
    PotentialSample,
    ScatteringData,
    UniformGrid,
)
from ..utils.errors import ErrorCode, ScatteringError
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

SCHEMA_VERSION = 1
PathLike = Union[str, Path]


def _pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def _complex(item: Any, field: str) -> complex:
    if not isinstance(item, (list, tuple)) or len(item) != 2:
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"field '{field}' must be a [re, im] pair",
                              {"field": field})
    try:
        return complex(float(item[0]), float(item[1]))
    except (TypeError, ValueError):
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"field '{field}' holds non-numeric entries",
                              {"field": field})


def _require(payload: Mapping[str, Any], key: str, context: str) -> Any:
    if not isinstance(payload, Mapping):
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"'{context}' must be an object", {"field": context})
    if key not in payload:
        field = f"{context}.{key}" if context else key
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"missing field '{field}'", {"field": field})
    return payload[key]


def _complex_list(items: Any, field: str) -> np.ndarray:
    if not isinstance(items, list):
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"field '{field}' must be a list", {"field": field})
    return np.array([_complex(item, f"{field}[{i}]") for i, item in enumerate(items)], dtype=complex)


def scattering_to_dict(sd: ScatteringData) -> Dict[str, Any]:
    grid = sd.lambda_grid
    return {
        "lambda_grid": {"x0": grid.x0, "dx": grid.dx, "n": grid.n},
        "rho": [_pair(r) for r in sd.rho],
        "discrete": [{"lambda": _pair(d.lam), "C": _pair(d.C)} for d in sd.discrete],
        "epsilon": sd.epsilon,
    }


def scattering_from_dict(payload: Mapping[str, Any]) -> ScatteringData:
    header = _require(payload, "lambda_grid", "")
    try:
        grid = UniformGrid(float(_require(header, "x0", "lambda_grid")),
                           float(_require(header, "dx", "lambda_grid")),
                           int(_require(header, "n", "lambda_grid")))
    except (TypeError, ValueError) as e:
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"bad lambda_grid header: {e}", {"field": "lambda_grid"})
    rho = _complex_list(_require(payload, "rho", ""), "rho")
    discrete_items = payload.get("discrete", [])
    if not isinstance(discrete_items, list):
        raise ScatteringError(ErrorCode.PARSE_ERROR, "field 'discrete' must be a list", {"field": "discrete"})
    discrete = []
    for i, item in enumerate(discrete_items):
        lam = _complex(_require(item, "lambda", f"discrete[{i}]"), f"discrete[{i}].lambda")
        norming = _complex(_require(item, "C", f"discrete[{i}]"), f"discrete[{i}].C")
        discrete.append(DiscreteDatum(lam, norming))
    epsilon = payload.get("epsilon", EPSILON)
    try:
        return ScatteringData(grid, rho, tuple(discrete), int(epsilon))
    except ScatteringError as e:
        raise ScatteringError(ErrorCode.PARSE_ERROR, e.message, e.details)


def potential_to_dict(ps: PotentialSample) -> Dict[str, Any]:
    return {
        "x0": ps.x0,
        "dx": ps.dx,
        "kind": ps.kind.value,
        "tail_tol": ps.tail_tol,
        "values": [_pair(v) for v in ps.values],
    }


def potential_from_dict(payload: Mapping[str, Any]) -> PotentialSample:
    values = _complex_list(_require(payload, "values", ""), "values")
    kind_name = payload.get("kind", PotentialKind.Q_GAUGE.value)
    try:
        kind = PotentialKind(kind_name)
    except ValueError:
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"unknown potential kind '{kind_name}'", {"field": "kind"})
    try:
        return PotentialSample(float(_require(payload, "x0", "")), float(_require(payload, "dx", "")),
                               values, kind, float(payload.get("tail_tol", 1e-6)))
    except ScatteringError as e:
        raise ScatteringError(ErrorCode.PARSE_ERROR, e.message, e.details)


def serialize(obj: Union[ScatteringData, PotentialSample]) -> bytes:
    """Encode scattering data or a potential sample as UTF-8 JSON."""
    if isinstance(obj, ScatteringData):
        payload = scattering_to_dict(obj)
    elif isinstance(obj, PotentialSample):
        payload = potential_to_dict(obj)
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return (json.dumps(payload, indent=1) + "\n").encode("utf-8")


def _decode(data: Union[bytes, str]) -> Dict[str, Any]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ScatteringError(ErrorCode.PARSE_ERROR, f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}",
                              {"line": e.lineno, "column": e.colno})


def deserialize(data: Union[bytes, str]) -> Union[ScatteringData, PotentialSample]:
    """Decode either schema; the presence of 'rho' selects scattering data."""
    payload = _decode(data)
    if not isinstance(payload, dict):
        raise ScatteringError(ErrorCode.PARSE_ERROR, "top-level JSON value must be an object")
    if "lambda_grid" in payload:
        return scattering_from_dict(payload)
    if "values" in payload:
        return potential_from_dict(payload)
    raise ScatteringError(ErrorCode.PARSE_ERROR, "object is neither scattering data nor a potential",
                          {"keys": sorted(payload)})


def deserialize_scattering(data: Union[bytes, str]) -> ScatteringData:
    return scattering_from_dict(_decode(data))


def deserialize_potential(data: Union[bytes, str]) -> PotentialSample:
    return potential_from_dict(_decode(data))


def save(obj: Union[ScatteringData, PotentialSample], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(serialize(obj))
    logger.info(f"Wrote {type(obj).__name__} to {path}")
    return path


def load_scattering(path: PathLike) -> ScatteringData:
    sd = deserialize_scattering(Path(path).read_bytes())
    logger.info(f"Loaded scattering data from {path} (N={sd.n_solitons}, grid n={sd.lambda_grid.n})")
    return sd


def load_potential(path: PathLike) -> PotentialSample:
    ps = deserialize_potential(Path(path).read_bytes())
    logger.info(f"Loaded {ps.kind.value} potential from {path} ({ps.n} samples)")
    return ps


def profile_frame(x: np.ndarray, values: np.ndarray) -> pd.DataFrame:
    """Columns x, Re, Im for a sampled complex field."""
    values = np.asarray(values, dtype=complex)
    return pd.DataFrame({"x": np.asarray(x, dtype=float), "Re": values.real, "Im": values.imag})


def asymptotic_frame(x: np.ndarray, q: np.ndarray, u: np.ndarray, dispersive: np.ndarray) -> pd.DataFrame:
    """Columns x, Re_q, Im_q, Re_u, Im_u, abs_dispersive."""
    q = np.asarray(q, dtype=complex)
    u = np.asarray(u, dtype=complex)
    return pd.DataFrame({
        "x": np.asarray(x, dtype=float),
        "Re_q": q.real,
        "Im_q": q.imag,
        "Re_u": u.real,
        "Im_u": u.imag,
        "abs_dispersive": np.abs(np.asarray(dispersive, dtype=complex)),
    })


def write_csv(frame: pd.DataFrame, path: PathLike, manifest: Optional[Dict[str, Any]] = None) -> Path:
    """Write a frame as CSV, optionally with a JSON manifest next to it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g")
    if manifest is not None:
        manifest_path = path.with_suffix(".json")
        manifest_path.write_text(json.dumps({"schema_version": SCHEMA_VERSION, "csv": path.name,
                                             "columns": list(frame.columns), **manifest}, indent=2))
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_profile(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path)
