# tests/test_pde_reference.py
"""
Tests for the pseudo-spectral reference solver.
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Add src directory to Python path
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from dnls_ist.core.pde_reference import (
    DNLSSolver,
    PDEConfig,
    conserved_report,
    dnls_residual,
    evolve_snapshots,
    gauge_dnls_residual,
    spectral_derivative,
    step_dnls,
    with_time,
)
from dnls_ist.core.solitons import SolitonParams, one_soliton_q, one_soliton_u, soliton_l2_norm
from dnls_ist.core.types import PotentialKind, PotentialSample
from dnls_ist.utils.errors import ErrorCode, ScatteringError
from dnls_ist.utils.helpers import DEFAULT_CONFIG

SOLITON = SolitonParams(1.0, 0.0)


def _small_config(t_end: float = 0.5, dt: float = 1e-3) -> PDEConfig:
    return PDEConfig(L=20.0, n=512, dt=dt, t_end=t_end)


def _soliton_sample(cfg: PDEConfig) -> PotentialSample:
    return PotentialSample(cfg.x[0], cfg.dx, one_soliton_u(SOLITON, cfg.x), PotentialKind.U_GAUGE)


def test_config_validation():
    for bad in ({"n": 1000}, {"dt": 0.0}, {"L": -1.0}, {"dealias": 1.5}):
        with pytest.raises(ScatteringError) as e:
            PDEConfig(**bad)
        assert e.value.code == ErrorCode.PARAM
    cfg = _small_config()
    assert cfg.dx == pytest.approx(40.0 / 512)
    assert cfg.x[0] == -20.0 and cfg.x.size == 512
    print("✓ PDEConfig validates its discretization")


def test_from_config_ignores_unset_overrides():
    cfg = PDEConfig.from_config(DEFAULT_CONFIG, L=20.0, n=None, t_end=2.0)
    assert cfg.L == 20.0
    assert cfg.n == DEFAULT_CONFIG["pde"]["n"]
    assert cfg.dt == DEFAULT_CONFIG["pde"]["dt"]
    assert cfg.t_end == 2.0
    assert with_time(cfg, -1.0).t_end == -1.0
    # a bare pde section works as well
    assert PDEConfig.from_config({"n": 256}).n == 256


def test_one_soliton_travels_exactly():
    cfg = _small_config()
    u0 = _soliton_sample(cfg)
    assert conserved_report(u0)["mass"] == pytest.approx(soliton_l2_norm(1.0, 0.0), rel=1e-8)

    result = step_dnls(u0, cfg)
    assert result.kind == PotentialKind.U_GAUGE
    assert result.n == cfg.n
    assert np.max(np.abs(result.values - one_soliton_u(SOLITON, result.x, 0.5))) < 1e-5

    solver = DNLSSolver(cfg)
    _, report, _ = solver.evolve(solver.resample(u0), cfg.t_end)
    assert report.steps == 500
    assert report.drift < 1e-6
    assert report.max_amplitude == pytest.approx(2.0, rel=1e-3)
    print("✓ One-soliton evolution matches the closed form")


def test_backward_evolution_returns_to_the_start():
    cfg = _small_config(t_end=0.2)
    u0 = _soliton_sample(cfg)
    forward = step_dnls(u0, cfg)
    back = step_dnls(forward, with_time(cfg, -0.2))
    assert np.max(np.abs(back.values - u0.values)) < 1e-7


def test_cfl_violation_is_reported():
    cfg = _small_config(dt=0.1)
    with pytest.raises(ScatteringError) as e:
        step_dnls(_soliton_sample(cfg), cfg)
    assert e.value.code == ErrorCode.CFL
    assert e.value.details["cfl"] > cfg.cfl


def test_zero_time_is_the_identity():
    cfg = _small_config(t_end=0.0)
    u0 = _soliton_sample(cfg)
    assert np.array_equal(step_dnls(u0, cfg).values, u0.values)


def test_resample():
    cfg = _small_config()
    solver = DNLSSolver(cfg)
    q = PotentialSample.from_function(lambda x: np.exp(-x ** 2), -10.0, 10.0, 401)
    with pytest.raises(ScatteringError) as e:
        solver.resample(q)
    assert e.value.code == ErrorCode.DOMAIN

    u = q.with_values(q.values, PotentialKind.U_GAUGE)
    values = solver.resample(u)
    assert values.shape == (cfg.n,)
    assert np.max(np.abs(values - np.exp(-cfg.x ** 2))) < 1e-3
    assert np.all(values[np.abs(cfg.x) > 10.0] == 0)


def test_snapshots_from_one_run():
    cfg = _small_config()
    snapshots = evolve_snapshots(_soliton_sample(cfg), cfg, [0.5, 0.0, 0.25])
    assert list(snapshots) == [0.0, 0.25, 0.5]
    for t, sample in snapshots.items():
        assert np.max(np.abs(sample.values - one_soliton_u(SOLITON, sample.x, t))) < 1e-5


def test_spectral_derivative():
    n = 64
    dx = 2.0 * np.pi / n
    x = dx * np.arange(n)
    assert np.max(np.abs(spectral_derivative(np.sin(x), dx) - np.cos(x))) < 1e-12
    assert np.max(np.abs(spectral_derivative(np.sin(x), dx, 2) + np.sin(x))) < 1e-11


def test_exact_solitons_have_small_residuals():
    # wide enough that the periodic wrap sees no tail
    cfg = PDEConfig(L=40.0, n=1024, dt=1e-4)
    dt = 1e-4
    x = cfg.x
    u = [one_soliton_u(SOLITON, x, t) for t in (-dt, 0.0, dt)]
    assert np.max(np.abs(dnls_residual(*u, dt, cfg.dx))) < 1e-6
    q = [one_soliton_q(SOLITON, x, t) for t in (-dt, 0.0, dt)]
    assert np.max(np.abs(gauge_dnls_residual(*q, dt, cfg.dx))) < 1e-6
    # the u-soliton is not a solution of the gauge-transformed equation
    assert np.max(np.abs(gauge_dnls_residual(*u, dt, cfg.dx))) > 1e-2
    print("✓ Closed-form solitons solve their equations")
