# tests/test_serialization.py
"""
Tests for the JSON and CSV connectors.
"""
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.connectors.serialization import (
    deserialize,
    deserialize_scattering,
    load_potential,
    load_scattering,
    profile_frame,
    save,
    serialize,
    write_csv,
)
from dnls_ist.core.types import PotentialKind, PotentialSample, ScatteringData, UniformGrid
from dnls_ist.utils.errors import ErrorCode, ScatteringError


def _scattering() -> ScatteringData:
    rng = np.random.default_rng(7)
    grid = UniformGrid.symmetric(3.0, 61)
    rho = 0.1 * (rng.standard_normal(61) + 1j * rng.standard_normal(61))
    return ScatteringData(grid, rho, ((0.3 + 0.7j, 1.0 / 3.0 - 2.0j), (-0.2 + 0.4j, np.pi)))


def test_scattering_round_trip_is_bit_exact():
    sd = _scattering()
    back = deserialize(serialize(sd))
    assert isinstance(back, ScatteringData)
    assert back == sd
    assert np.array_equal(back.rho, sd.rho)
    print("✓ Scattering data survives serialization bit-exactly")


def test_potential_round_trip_keeps_kind(tmp_path):
    u = PotentialSample.from_function(lambda x: np.exp(-x ** 2) * np.exp(0.3j * x), -8.0, 8.0, 81,
                                      PotentialKind.U_GAUGE)
    path = save(u, tmp_path / "u0.json")
    back = load_potential(path)
    assert back == u
    assert back.kind == PotentialKind.U_GAUGE


def test_save_and_load_scattering(tmp_path):
    sd = _scattering()
    path = save(sd, tmp_path / "nested" / "sd.json")
    assert path.exists()
    assert load_scattering(path) == sd


def test_missing_field_names_the_field():
    payload = json.loads(serialize(_scattering()))
    del payload["lambda_grid"]["dx"]
    with pytest.raises(ScatteringError) as e:
        deserialize_scattering(json.dumps(payload))
    assert e.value.code == ErrorCode.PARSE_ERROR
    assert e.value.details["field"] == "lambda_grid.dx"

    payload = json.loads(serialize(_scattering()))
    del payload["rho"]
    with pytest.raises(ScatteringError) as e:
        deserialize_scattering(json.dumps(payload))
    assert e.value.details["field"] == "rho"


def test_malformed_entries_are_parse_errors():
    payload = json.loads(serialize(_scattering()))
    payload["discrete"][1]["C"] = [1.0]
    with pytest.raises(ScatteringError) as e:
        deserialize(json.dumps(payload))
    assert e.value.code == ErrorCode.PARSE_ERROR
    assert e.value.details["field"] == "discrete[1].C"

    payload = json.loads(serialize(_scattering()))
    payload["rho"] = payload["rho"][:-1]
    with pytest.raises(ScatteringError) as e:
        deserialize(json.dumps(payload))
    assert e.value.code == ErrorCode.PARSE_ERROR


def test_invalid_json_reports_position():
    with pytest.raises(ScatteringError) as e:
        deserialize(b'{"lambda_grid": ')
    assert e.value.code == ErrorCode.PARSE_ERROR
    assert "line" in e.value.details

    with pytest.raises(ScatteringError):
        deserialize(b'{"neither": 1}')


def test_serialize_rejects_other_objects():
    with pytest.raises(TypeError):
        serialize({"rho": []})


def test_csv_with_manifest(tmp_path):
    x = np.linspace(-1.0, 1.0, 5)
    frame = profile_frame(x, np.exp(1j * x))
    path = write_csv(frame, tmp_path / "q.csv", {"command": "test", "t": 2.0})
    back = pd.read_csv(path)
    assert list(back.columns) == ["x", "Re", "Im"]
    assert np.allclose(back["Re"] + 1j * back["Im"], np.exp(1j * x), atol=1e-15)
    manifest = json.loads(path.with_suffix(".json").read_text())
    assert manifest["schema_version"] == 1
    assert manifest["csv"] == "q.csv"
    assert manifest["t"] == 2.0
