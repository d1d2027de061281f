# tests/test_cli.py
"""
Tests for the dnls-ist command line: exit codes, file outputs and error payloads.
"""
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.connectors.cli import main
from dnls_ist.connectors.serialization import load_potential, load_scattering, save
from dnls_ist.core.fixtures import gaussian_sample, planted_data, zero_scattering
from dnls_ist.core.solitons import SolitonParams, nsoliton_q, one_soliton_u
from dnls_ist.core.types import PotentialKind, PotentialSample, ScatteringData
from dnls_ist.utils.errors import EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE_ERROR


def _planted_file(tmp_path: Path) -> Path:
    sd = ScatteringData.reflectionless(planted_data(1).pairs)
    return save(sd, tmp_path / "planted.json")


def test_usage_errors(capsys):
    assert main(["--help"]) == EXIT_OK
    assert main(["transmogrify"]) == EXIT_USAGE_ERROR
    assert main(["--no-config", "asympt", "--sdata", "x.json", "--t", "20", "--cone", "1,0,0,1",
                 "--out", "p.csv"]) == EXIT_USAGE_ERROR
    assert main(["--no-config", "asympt", "--sdata", "x.json", "--t", "20", "--cone", "a,b",
                 "--out", "p.csv"]) == EXIT_USAGE_ERROR
    assert "--cone" in capsys.readouterr().err


def test_scatter_and_evolve(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"logging": {"level": "WARNING"},
                                  "scattering": {"n_lambda": 81, "lambda_max": 4.0}}))
    q0 = save(gaussian_sample(), tmp_path / "q0.json")

    sd_path = tmp_path / "sd.json"
    assert main(["--config", str(config), "scatter", "--input", str(q0), "--out", str(sd_path)]) == EXIT_OK
    sd = load_scattering(sd_path)
    assert sd.lambda_grid.n == 81
    assert sd.n_solitons == 0

    evolved_path = tmp_path / "sd_t.json"
    assert main(["--config", str(config), "evolve", "--sdata", str(sd_path), "--t", "2.0",
                 "--out", str(evolved_path)]) == EXIT_OK
    evolved = load_scattering(evolved_path)
    assert np.allclose(np.abs(evolved.rho), np.abs(sd.rho))
    print("✓ scatter and evolve write scattering data")


def test_reconstruct_writes_csv_and_manifest(tmp_path):
    sd_path = save(zero_scattering(), tmp_path / "zero.json")
    out = tmp_path / "q.csv"
    code = main(["--no-config", "reconstruct", "--sdata", str(sd_path), "--t", "1.0",
                 "--xmin", "-2", "--xmax", "2", "--nx", "5", "--out", str(out)])
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["x", "Re", "Im"]
    assert np.allclose(frame["x"], [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert np.allclose(frame["Re"], 0.0) and np.allclose(frame["Im"], 0.0)

    manifest = json.loads((tmp_path / "q.json").read_text())
    assert manifest["command"] == "reconstruct"
    assert manifest["kind"] == PotentialKind.Q_GAUGE.value
    assert manifest["csv"] == "q.csv"


def test_reconstruct_to_json_sample(tmp_path):
    sd_path = _planted_file(tmp_path)
    out = tmp_path / "q_sample.json"
    code = main(["--no-config", "reconstruct", "--sdata", str(sd_path), "--xmin", "-20", "--xmax", "20",
                 "--nx", "41", "--out", str(out)])
    assert code == EXIT_OK
    sample = load_potential(out)
    assert isinstance(sample, PotentialSample)
    assert np.max(np.abs(sample.values - nsoliton_q(planted_data(1), sample.x))) < 1e-7


def test_soliton_command(tmp_path):
    sd_path = _planted_file(tmp_path)
    out = tmp_path / "sol.csv"
    assert main(["--no-config", "soliton", "--sdata", str(sd_path), "--t", "0.5",
                 "--xmin", "-3", "--xmax", "3", "--nx", "7", "--out", str(out)]) == EXIT_OK
    frame = pd.read_csv(out)
    expected = nsoliton_q(planted_data(1), frame["x"].to_numpy(), 0.5)
    assert np.allclose(frame["Re"] + 1j * frame["Im"], expected, atol=1e-12)
    assert json.loads((tmp_path / "sol.json").read_text())["n_solitons"] == 1


def test_domain_error_is_reported_as_json(tmp_path, capsys):
    sd_path = _planted_file(tmp_path)
    code = main(["--no-config", "asympt", "--sdata", str(sd_path), "--t", "1.0", "--cone", "-0.5,0.5,-5,5",
                 "--out", str(tmp_path / "prof.csv")])
    assert code == EXIT_DOMAIN_ERROR
    err = capsys.readouterr().err
    payload = json.loads(err[err.index('{"error"'):].splitlines()[0])
    assert payload["error"]["code"] == "DOMAIN"
    assert not (tmp_path / "prof.csv").exists()


def test_cone_with_negative_velocities(tmp_path):
    params = SolitonParams(1.0, -1.0)
    sd_path = save(ScatteringData.reflectionless([(params.eigenvalue, params.norming_constant)]),
                   tmp_path / "left_mover.json")
    for cone in (["--cone", "-1.5,-0.5,-10,10"], ["--cone=-1.5,-0.5,-10,10"]):
        out = tmp_path / "prof.csv"
        code = main(["--no-config", "asympt", "--sdata", str(sd_path), "--t", "20", *cone,
                     "--xmin", "-40", "--xmax", "-10", "--nx", "11", "--out", str(out)])
        assert code == EXIT_OK
        assert len(pd.read_csv(out)) == 11
        assert json.loads((tmp_path / "prof.json").read_text())["cone"] == [-1.5, -0.5, -10.0, 10.0]


def test_bad_inputs(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["--no-config", "evolve", "--sdata", str(broken), "--t", "1", "--out",
                 str(tmp_path / "o.json")]) == EXIT_DOMAIN_ERROR
    assert main(["--no-config", "evolve", "--sdata", str(tmp_path / "missing.json"), "--t", "1",
                 "--out", str(tmp_path / "o.json")]) == EXIT_USAGE_ERROR
    assert main(["--no-config", "reconstruct", "--sdata", str(broken), "--nx", "1",
                 "--out", str(tmp_path / "o.csv")]) == EXIT_DOMAIN_ERROR


def test_pde_command(tmp_path):
    params = SolitonParams(1.0, 0.0)
    u0 = PotentialSample.from_function(lambda x: one_soliton_u(params, x), -20.0, 20.0, 401,
                                       PotentialKind.U_GAUGE)
    u0_path = save(u0, tmp_path / "u0.json")
    out = tmp_path / "u.json"
    assert main(["--no-config", "pde", "--input", str(u0_path), "--t", "0.1", "--L", "20", "--n", "512",
                 "--dt", "1e-3", "--out", str(out)]) == EXIT_OK
    result = load_potential(out)
    assert result.kind == PotentialKind.U_GAUGE
    assert result.n == 512
    # linear resampling of the 401-point input limits the agreement
    assert np.max(np.abs(result.values - one_soliton_u(params, result.x, 0.1))) < 5e-2
