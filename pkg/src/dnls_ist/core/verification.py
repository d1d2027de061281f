# src/dnls_ist/core/verification.py
"""
Desk-scale verification suites.

Each suite runs one group of acceptance checks and returns a VerifyReport
whose JSON form is stable (schema_version). Sizes come from the verify
section of the configuration so that tests can run reduced variants.
"""
import json
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import mpmath
import numpy as np
import pandas as pd
from scipy.integrate import quad

from .asymptotics import (
    ConeSelection,
    KappaFunction,
    asymptotic_q,
    delta_evaluator,
    dispersive_term,
    pc_betas,
    pc_coeffs,
    pc_expansion_residual,
    pc_model_matrix,
    phase_shifts,
)
from .direct_scattering import direct_map, transmission
from .fixtures import (
    gaussian_sample,
    load_fixture,
    planted_data,
    planted_sample,
    sech_sample,
    soliton_radiation_sample,
    synthetic_scattering,
)
from .parabolic_cylinder import parabolic_cylinder, recurrence_residual
from .pde_reference import DNLSSolver, PDEConfig, evolve_snapshots
from .rhp_inverse import inverse_map
from .solitons import (
    ReflectionlessData,
    SolitonParams,
    gauge,
    gauge_inverse,
    nsoliton_q,
    one_soliton_q,
    one_soliton_u,
    soliton_l2_norm,
)
from .types import PotentialKind, PotentialSample, ScatteringData, UniformGrid
from ..utils.errors import ScatteringError
from ..utils.helpers import DEFAULT_CONFIG, merge_config
from ..utils.logger import setup_logger

logger = setup_logger(__name__)

SCHEMA_VERSION = 1


@dataclass
class CheckResult:
    name: str
    measured: float
    target: float
    tolerance: float
    passed: bool
    detail: str = ""


@dataclass
class VerifyReport:
    """Outcome of one suite; passes iff every check passes."""

    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    elapsed: float = 0.0
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def below(self, name: str, measured: float, tolerance: float, detail: str = "") -> CheckResult:
        """Record a check measured <= tolerance."""
        measured = float(measured)
        result = CheckResult(name, measured, 0.0, float(tolerance), bool(measured <= tolerance), detail)
        self.checks.append(result)
        return result

    def above(self, name: str, measured: float, minimum: float, detail: str = "") -> CheckResult:
        """Record a check measured >= minimum."""
        measured = float(measured)
        result = CheckResult(name, measured, float(minimum), 0.0, bool(measured >= minimum), detail)
        self.checks.append(result)
        return result

    def near(self, name: str, measured: float, target: float, tolerance: float, detail: str = "") -> CheckResult:
        """Record a check |measured - target| <= tolerance."""
        measured = float(measured)
        passed = bool(abs(measured - target) <= tolerance)
        result = CheckResult(name, measured, float(target), float(tolerance), passed, detail)
        self.checks.append(result)
        return result

    def fail(self, name: str, detail: str) -> CheckResult:
        result = CheckResult(name, float("nan"), 0.0, 0.0, False, detail)
        self.checks.append(result)
        return result

    def to_dict(self) -> Dict[str, Any]:
        checks = []
        for c in self.checks:
            entry = asdict(c)
            entry["measured"] = None if not np.isfinite(c.measured) else c.measured
            checks.append(entry)
        return {"schema_version": self.schema_version, "suite": self.suite, "passed": self.passed,
                "elapsed_seconds": round(self.elapsed, 3), "checks": checks}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([asdict(c) for c in self.checks],
                            columns=["name", "measured", "target", "tolerance", "passed", "detail"])


def _full_config(config: Optional[Dict[str, Any]]) -> Dict[str, Any]:
    return merge_config(DEFAULT_CONFIG, config)


def _slope(times: Sequence[float], values: Sequence[float]) -> float:
    return float(np.polyfit(np.log(times), np.log(values), 1)[0])


def _match_eigenvalues(found: np.ndarray, expected: np.ndarray) -> np.ndarray:
    """Index into found for each expected eigenvalue (nearest neighbour)."""
    return np.array([int(np.argmin(np.abs(found - z))) for z in expected], dtype=int)


def _values_at(sample: PotentialSample, x: np.ndarray) -> np.ndarray:
    return (np.interp(x, sample.x, sample.values.real, left=0.0, right=0.0)
            + 1j * np.interp(x, sample.x, sample.values.imag, left=0.0, right=0.0))


def _fit_peak(x: np.ndarray, values: np.ndarray, center: float, window: float) -> float:
    """Position of the largest |values| near center, refined by a parabola through three samples."""
    idx = np.flatnonzero(np.abs(x - center) <= window)
    i = idx[int(np.argmax(np.abs(values[idx])))]
    if i == 0 or i == x.size - 1:
        return float(x[i])
    y0, y1, y2 = np.abs(values[i - 1: i + 2]) ** 2
    curvature = y0 - 2.0 * y1 + y2
    shift = 0.5 * (y0 - y2) / curvature if curvature != 0 else 0.0
    return float(x[i] + shift * (x[1] - x[0]))


def _wrapped(angle: float) -> float:
    return float(np.angle(np.exp(1j * angle)))


def suite_unitarity(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """sup | |alpha|^2 + lam |beta|^2 - 1 | on the lambda-grid for five fixture potentials."""
    cfg = _full_config(config)
    report = VerifyReport("unitarity")
    grid = UniformGrid.symmetric(float(cfg["scattering"]["lambda_max"]), int(cfg["scattering"]["n_lambda"]))
    samples = {"gaussian": gaussian_sample(), "sech": sech_sample(),
               "planted1": planted_sample(1), "planted2": planted_sample(2), "planted3": planted_sample(3)}
    for name, q in samples.items():
        report.below(f"unitarity_{name}", transmission(q, grid).unitarity_defect, 1e-6)
    return report


def suite_roundtrip(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """Plant-and-recover on 1-3 solitons, inverse(direct(q0)) round trips and node-doubling convergence."""
    cfg = _full_config(config)
    verify = cfg["verify"]
    report = VerifyReport("roundtrip")

    for n in (1, 2, 3):
        expected = planted_data(n)
        try:
            sd = direct_map(planted_sample(n), cfg)
        except ScatteringError as e:
            report.fail(f"planted{n}_direct_map", str(e))
            continue
        if sd.n_solitons != n:
            report.fail(f"planted{n}_count", f"found {sd.n_solitons} eigenvalue(s), expected {n}")
            continue
        order = _match_eigenvalues(sd.eigenvalues, expected.eigenvalues)
        report.below(f"planted{n}_eigenvalues", np.max(np.abs(sd.eigenvalues[order] - expected.eigenvalues)), 1e-6)
        relative = np.abs(sd.norming_constants[order] / expected.norming_constants - 1.0)
        report.below(f"planted{n}_norming", np.max(relative), 1e-4)
        report.below(f"planted{n}_rho", np.max(np.abs(sd.rho)), 1e-5)

    half_width = float(verify["roundtrip_half_width"])
    x = np.linspace(-half_width, half_width, int(verify["roundtrip_points"]))
    for name, q0, tolerance in (("gaussian", gaussian_sample(), 1e-4),
                                ("soliton_radiation", soliton_radiation_sample(1), 1e-3)):
        try:
            q_rec = inverse_map(direct_map(q0, cfg), x, 0.0, cfg).values
        except ScatteringError as e:
            report.fail(f"roundtrip_{name}", str(e))
            continue
        report.below(f"roundtrip_{name}", np.max(np.abs(q_rec - _values_at(q0, x))), tolerance)

    sd = direct_map(gaussian_sample(), cfg)
    nodes = [int(n) for n in verify["convergence_nodes"]]
    x_check = x[:: max(1, x.size // 5)]
    reference = inverse_map(sd, x_check, 0.0, merge_config(cfg, {"inverse": {"real_nodes": nodes[-1]}})).values
    errors = []
    for n in nodes[:-1]:
        approx = inverse_map(sd, x_check, 0.0, merge_config(cfg, {"inverse": {"real_nodes": n}})).values
        errors.append(max(float(np.max(np.abs(approx - reference))), 1e-300))
    if len(errors) >= 2 and errors[-1] > 1e-13:
        rate = float(np.log2(errors[-2] / errors[-1]) / np.log2(nodes[-2] / nodes[-3]))
        report.above("convergence_rate", rate, 1.8, f"errors {errors}")
    else:
        report.below("convergence_floor", errors[-1], 1e-10, "coarsest pair already at round-off")
    return report


def suite_soliton_xcheck(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """N = 1 synthesis against the closed form, the L2 formula and the PDE oracle."""
    cfg = _full_config(config)
    report = VerifyReport("soliton-xcheck")

    x = np.linspace(-10.0, 10.0, 201)
    for params in (SolitonParams(1.0, 0.0), SolitonParams(1.2, 0.8, 1.5, 0.7)):
        data = ReflectionlessData(((params.eigenvalue, params.norming_constant),))
        for t in (0.0, 1.0, 10.0):
            shifted = x + params.c * t
            error = np.max(np.abs(nsoliton_q(data, shifted, t) - one_soliton_q(params, shifted, t)))
            report.below(f"nsoliton_vs_closed_form_c{params.c}_t{t:g}", error, 1e-8)

    for omega, c in ((1.0, 0.0), (1.0, 1.0), (1.0, 1.9)):
        params = SolitonParams(omega, c)
        k = params.k
        mass, _ = quad(lambda y: 2.0 * k ** 2 / (2.0 * np.sqrt(omega) * np.cosh(k * y) - c),
                       -np.inf, np.inf, epsabs=1e-12, epsrel=1e-12, limit=400)
        report.below(f"l2_norm_omega{omega:g}_c{c:g}", abs(mass - soliton_l2_norm(omega, c)), 1e-6)
    approach = [soliton_l2_norm(1.0, c) for c in np.linspace(0.0, 1.999, 25)]
    monotone = bool(np.all(np.diff(approach) > 0) and approach[-1] < 4.0 * np.pi)
    report.below("l2_norm_monotone_to_4pi", 0.0 if monotone else 1.0, 0.5, f"last {approach[-1]:.6f}")

    pde_cfg = PDEConfig.from_config(cfg, t_end=1.0)
    params = SolitonParams(1.0, 0.0)
    u0 = PotentialSample(-pde_cfg.L, pde_cfg.dx, one_soliton_u(params, pde_cfg.x), PotentialKind.U_GAUGE)
    solver = DNLSSolver(pde_cfg)
    values, step_report, _ = solver.evolve(solver.resample(u0), pde_cfg.t_end)
    report.below("pde_vs_closed_form_t1", np.max(np.abs(values - one_soliton_u(params, pde_cfg.x, 1.0))), 1e-6)
    report.below("pde_mass_drift_t1", step_report.drift, 1e-8)
    return report


def suite_delta(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """Jump, symmetry, bound and large-z checks of delta for the synthetic and the zero reflection data."""
    cfg = _full_config(config)
    lambda0 = float(cfg["verify"]["delta_lambda0"])
    report = VerifyReport("delta")
    for name in ("synthetic_rho", "zero_rho"):
        sd: ScatteringData = load_fixture(name)
        delta = delta_evaluator(sd, lambda0, cfg)
        kappa_fn: KappaFunction = delta.kappa_fn

        lam = sd.lam
        inside = lam[(lam < lambda0) & (lam > max(delta.lower, -2.0))]
        cut_points = inside[np.linspace(0, inside.size - 1, min(20, inside.size)).astype(int)] if inside.size else []
        jump = 0.0
        for s in cut_points:
            ratio = delta(s, side=1) / delta(s, side=-1)
            jump = max(jump, abs(ratio - np.exp(-2.0 * np.pi * kappa_fn(s))))
        report.below(f"{name}_jump", jump, 1e-6, f"{len(cut_points)} point(s)")

        points = np.array([0.3 + 0.2j, -1.0 + 0.05j, lambda0 + 1e-3j, 2.0 + 1.0j, -3.0 + 0.5j])
        symmetry = np.max(np.abs(delta(points) * np.conj(delta(np.conj(points))) - 1.0))
        report.below(f"{name}_symmetry", symmetry, 1e-10)

        bound = np.exp(np.pi * kappa_fn.sup_norm)
        moduli = np.abs(delta(points))
        excess = max(float(np.max(moduli / bound)), float(np.max(1.0 / (moduli * bound))))
        report.below(f"{name}_modulus_bound", excess, 1.0 + 1e-12)

        z = 1e4 * np.exp(0.3j)
        coefficient = z * np.expm1(delta.log_delta(z))
        if abs(delta.delta1) > 0:
            expansion = delta.delta1 + delta.delta2 / z
            report.below(f"{name}_large_z", abs(coefficient - expansion) / abs(delta.delta1), 1e-5)
        else:
            report.below(f"{name}_large_z", abs(coefficient), 1e-12)
    return report


def suite_pc_model(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """Gamma identity, D_a(z) against mpmath and its recurrence, and the 1/t local-model expansion."""
    cfg = _full_config(config)
    verify = cfg["verify"]
    report = VerifyReport("pc-model")

    worst = 0.0
    for k in np.logspace(-3, 0, 13):
        rho_abs = np.sqrt(1.0 - np.exp(-2.0 * np.pi * k))
        kappa_value, beta12, beta21 = pc_betas(-1.0, rho_abs)
        worst = max(worst, abs(beta12 * beta21 - kappa_value), abs(kappa_value - k))
    report.below("beta_product_identity", worst, 1e-10)

    report.below("D0_at_1", abs(parabolic_cylinder(0.0, 1.0) - np.exp(-0.25)), 1e-14)
    orders = [0.3j, -1.0 + 0.4j, 0.7 - 0.2j, 1j]
    arguments = [0.8 + 0.3j, 2.5 - 1.0j, -3.0 + 1.5j, 9.0 * np.exp(0.25j * np.pi), 10.0 * np.exp(-0.75j * np.pi)]
    report.below("D_recurrence", max(recurrence_residual(a, z) for a in orders for z in arguments), 1e-9)
    mismatch = 0.0
    for a in orders:
        for z in arguments:
            exact = complex(mpmath.pcfd(a, z))
            mismatch = max(mismatch, abs(parabolic_cylinder(a, z) - exact) / max(abs(exact), 1e-300))
    report.below("D_vs_mpmath", mismatch, 1e-9)

    # kappa(lambda0) near 0.1 keeps the diagonal zeta^-2 term ahead of the off-diagonal zeta^-3 one
    sd = synthetic_scattering(amplitude=float(verify["pc_amplitude"]))
    lambda0 = float(verify["pc_lambda0"])
    times = [float(t) for t in verify["pc_times"]]
    residuals = [pc_expansion_residual(sd, -4.0 * t * lambda0, t, config=cfg) for t in times]
    report.near("pc_expansion_slope", _slope(times, residuals), -1.0, 0.1, f"residuals {residuals}")

    t = times[0]
    coeffs = pc_coeffs(sd, -4.0 * t * lambda0, t, cfg)
    zeta = np.array([3.0 + 2.0j, -4.0 + 1.0j, 2.0 - 5.0j, -1.0 - 1.0j])
    determinant = np.linalg.det(pc_model_matrix(zeta, sd, -4.0 * t * lambda0, t, cfg, coeffs))
    report.below("pc_determinant", np.max(np.abs(determinant - 1.0)), 1e-8)
    return report


def _pde_run(q0: PotentialSample, times: Sequence[float], cfg: Dict[str, Any]) -> Dict[float, PotentialSample]:
    verify = cfg["verify"]
    pde_cfg = PDEConfig.from_config(cfg, L=verify["resolution_L"], n=verify["resolution_n"],
                                    dt=verify["resolution_dt"], t_end=max(times))
    return evolve_snapshots(gauge_inverse(q0), pde_cfg, times)


def suite_resolution(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """PDE against asymptotic_q inside a soliton cone: decay slope and size relative to the dispersive term."""
    cfg = _full_config(config)
    verify = cfg["verify"]
    report = VerifyReport("resolution")
    q0 = soliton_radiation_sample(2)
    sd = direct_map(q0, cfg)
    cone = ConeSelection(*[float(v) for v in verify["resolution_cone"]])
    times = [float(t) for t in verify["resolution_times"]]
    snapshots = _pde_run(q0, times, cfg)

    differences, dispersive = [], 0.0
    for t in times:
        q_pde = gauge(snapshots[t])
        window = np.flatnonzero((q_pde.x >= cone.x1 + cone.v1 * t) & (q_pde.x <= cone.x2 + cone.v2 * t))
        idx = window[np.linspace(0, window.size - 1, min(int(verify["resolution_points"]), window.size)).astype(int)]
        x = q_pde.x[idx]
        predicted = asymptotic_q(sd, x, t, cfg)
        differences.append(float(np.max(np.abs(q_pde.values[idx] - predicted))))
        if t == times[-1]:
            dispersive = max(abs(dispersive_term(sd, position, t, cfg)) for position in x)
        logger.debug(f"Resolution t={t}: sup difference {differences[-1]:.3e}")

    report.near("resolution_slope", _slope(times, differences), -0.5, 0.15, f"differences {differences}")
    report.below("resolution_vs_dispersive", differences[-1] / max(dispersive, 1e-300), 5.0,
                 f"dispersive {dispersive:.3e}")
    return report


def suite_stability(config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """Perturbed 2-soliton: Lipschitz ratio of the scattering data and predicted positions and phases."""
    cfg = _full_config(config)
    verify = cfg["verify"]
    report = VerifyReport("stability")
    base = planted_data(2)
    q_sol = planted_sample(2)
    u_sol = gauge_inverse(q_sol)
    t_final = float(verify["stability_time"])

    ratios = []
    for eta in [float(e) for e in verify["stability_etas"]]:
        u0 = u_sol.with_values(u_sol.values + eta * np.exp(-u_sol.x ** 2))
        q0 = gauge(u0)
        try:
            sd = direct_map(q0, cfg)
        except ScatteringError as e:
            report.fail(f"stability_eta{eta:g}_direct_map", str(e))
            continue
        if sd.n_solitons != base.n:
            report.fail(f"stability_eta{eta:g}_count", f"found {sd.n_solitons} eigenvalue(s)")
            continue
        order = _match_eigenvalues(sd.eigenvalues, base.eigenvalues)
        change = (np.max(np.abs(sd.rho)) + np.sum(np.abs(sd.eigenvalues[order] - base.eigenvalues))
                  + np.sum(np.abs(sd.norming_constants[order] - base.norming_constants)))
        ratios.append(change / eta)
        ordered = sd.with_discrete(tuple(sd.discrete[i] for i in order))

        snapshot = _pde_run(q0, [t_final], cfg)[t_final]
        dx = snapshot.dx
        for k in range(base.n):
            shift = phase_shifts(ordered, k, +1, cfg)
            center = shift.x_shift + shift.c * t_final
            peak = _fit_peak(snapshot.x, snapshot.values, center, 10.0)
            report.below(f"stability_eta{eta:g}_position{k}", abs(peak - center), 5.0 * eta + dx)
            measured = np.angle(_values_at(snapshot, np.array([center]))[0])
            predicted = np.angle(shift.u_profile(center, t_final))
            report.below(f"stability_eta{eta:g}_phase{k}", abs(_wrapped(measured - predicted)),
                         5.0 * eta + abs(shift.c) * dx)
    if len(ratios) >= 2:
        spread = max(ratios) / max(min(ratios), 1e-300)
        report.below("stability_lipschitz_ratio", spread, 2.0, f"K values {ratios}")
    return report


SUITES: Dict[str, Callable[[Optional[Dict[str, Any]]], VerifyReport]] = {
    "unitarity": suite_unitarity,
    "roundtrip": suite_roundtrip,
    "soliton-xcheck": suite_soliton_xcheck,
    "resolution": suite_resolution,
    "stability": suite_stability,
    "delta": suite_delta,
    "pc-model": suite_pc_model,
}


def verify_suite(name: str, config: Optional[Dict[str, Any]] = None) -> VerifyReport:
    """
    Run one verification suite.

    Args:
        name: One of SUITES
        config: Configuration overrides

    Returns:
        VerifyReport (failed checks are listed, not raised)
    """
    if name not in SUITES:
        raise ValueError(f"Unknown suite '{name}'. Available: {', '.join(SUITES)}")
    logger.info(f"Running verification suite '{name}'")
    start = time.perf_counter()
    try:
        report = SUITES[name](config)
    except ScatteringError as e:
        logger.error(f"Suite '{name}' aborted: {e}")
        report = VerifyReport(name)
        report.fail(f"{name}_aborted", str(e))
    report.elapsed = time.perf_counter() - start
    status = "passed" if report.passed else "FAILED"
    logger.info(f"Suite '{name}' {status}: {sum(c.passed for c in report.checks)}/{len(report.checks)} "
                f"check(s) in {report.elapsed:.1f}s")
    return report
