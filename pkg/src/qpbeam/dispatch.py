"""Command orchestration shared by the HTTP service and the CLI client."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .config import RunConfig, parse_config
from .errors import ConfigError
from .fourier import NormSpec, coefficient_dump, sobolev_norm
from .frequency import certify_nonresonance, minimal_gamma
from .iteration import build_schedule, run
from .linear_solvers import symbol_floor
from .reports import (
    certificate_csv,
    grid_samples_csv,
    run_report_csv,
    spectrum_csv,
)

COMMANDS = ("solve", "check-frequency", "verify", "spectrum")


@dataclass
class DispatchResult:
    """Outcome of one command: exit status, artifacts by filename, summary values."""

    status: int
    summary: dict
    artifacts: dict[str, str] = dataclass_field(default_factory=dict)
    log: list[str] = dataclass_field(default_factory=list)


def _apply_overrides(
    config: RunConfig, tol: float | None, levels: int | None
) -> RunConfig:
    if tol is None and levels is None:
        return config
    from dataclasses import replace

    params = config.params
    if tol is not None:
        params = replace(params, tol=tol)
    if levels is not None:
        params = replace(params, levels=levels)
    return RunConfig(params, config.omega, config.forcing_spec, config.raw)


def dispatch(
    command: str,
    config_text: str,
    tol: float | None = None,
    levels: int | None = None,
) -> DispatchResult:
    """Run one subcommand against a configuration text."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {COMMANDS}")
    config = _apply_overrides(parse_config(config_text), tol, levels)
    if command == "solve":
        return _solve(config)
    if command == "check-frequency":
        return _check_frequency(config)
    if command == "spectrum":
        return _spectrum(config)
    return _verify(config)


def _solve(config: RunConfig) -> DispatchResult:
    p = config.params
    schedule = build_schedule(
        p.N0, p.levels, p.M, p.rho0, p.epsilon, p.delta, p.gamma, p.s, p.tau
    )
    g = config.forcing()
    report = run(
        g,
        config.omega,
        schedule,
        tol=p.tol,
        method=p.method,
        grid_points=p.grid,
    )
    artifacts = {"report.csv": run_report_csv(report)}
    log = [
        f"verdict: {report.verdict}",
        f"levels: {len(report.levels)}",
        f"final residual (max): {report.final_residual_max:.3e}",
    ]
    if report.u_physical is not None:
        artifacts["solution.coef"] = coefficient_dump(report.u_physical)
        artifacts["solution_grid.csv"] = grid_samples_csv(
            report.u_physical, p.plot_grid
        )
    status = 0 if report.converged else 1
    summary = {
        "verdict": report.verdict,
        "failure": report.failure,
        "levels": [
            {
                "level": lev.level,
                "cutoff": lev.cutoff,
                "rho": lev.rho,
                "increment": lev.increment_norm,
                "residual": lev.residual,
                "contraction": lev.contraction,
                "prior_ok": lev.prior_ok,
                "shape_ok": lev.shape_ok,
            }
            for lev in report.levels
        ],
        "theta0": report.theta0,
        "theta1": report.theta1,
        "averaged_residual": report.averaged_residual,
        "u0_bound_ratio": report.u0_bound_ratio,
        "final_residual_max": report.final_residual_max,
        "final_residual_rms": report.final_residual_rms,
        "solution_norm": (
            sobolev_norm(report.u_physical, NormSpec(0.0, p.s))
            if report.u_physical is not None
            else 0.0
        ),
    }
    return DispatchResult(status, summary, artifacts, log)


def _check_frequency(config: RunConfig) -> DispatchResult:
    p = config.params
    cert = certify_nonresonance(config.omega, p.gamma, p.M, p.rho0, p.k_max)
    artifacts = {"certificate.csv": certificate_csv(cert)}
    summary = {
        "valid": cert.valid,
        "gamma": cert.gamma,
        "worst_ratio": cert.worst_ratio,
        "worst_k": list(cert.worst_k),
        "worst_divisor": cert.worst_divisor,
        "minimal_gamma": minimal_gamma(config.omega, p.M, p.rho0, p.k_max),
    }
    log = [
        f"certificate {'valid' if cert.valid else 'INVALID'} "
        f"(worst ratio {cert.worst_ratio:.4g} at k = {cert.worst_k})"
    ]
    return DispatchResult(0 if cert.valid else 1, summary, artifacts, log)


def _spectrum(config: RunConfig) -> DispatchResult:
    p = config.params
    floor = symbol_floor(
        p.epsilon,
        p.delta,
        0.0,
        p.j_floor,
        sigma_max=p.sigma_max,
        j_max=p.j_scan,
        d=p.d,
    )
    table = spectrum_csv(config.omega, p.epsilon, 0.0, min(p.k_max, 12), 4, floor)
    summary = {
        "min_abs_symbol": floor.min_abs_symbol,
        "uniform_bound_ok": floor.uniform_bound_ok,
        "violations": len(floor.violations),
        "checked": floor.checked,
        "case_margins": dict(floor.case_margins),
    }
    log = [
        f"symbol floor scan: {floor.checked} points, "
        f"min |Theta| = {floor.min_abs_symbol:.4g}, "
        f"{len(floor.violations)} violations"
    ]
    return DispatchResult(0 if floor.ok else 1, summary, {"spectrum.csv": table}, log)


def _verify(config: RunConfig) -> DispatchResult:
    from .verify import verification_suite

    checks = verification_suite(config)
    lines = []
    for check in checks:
        mark = "pass" if check.passed else "FAIL"
        lines.append(
            f"[{mark}] {check.name}: value {check.value:.3e} "
            f"(threshold {check.threshold:.3e})"
        )
    ok = all(c.passed for c in checks)
    summary = {
        "ok": ok,
        "checks": [
            {
                "name": c.name,
                "passed": c.passed,
                "value": c.value,
                "threshold": c.threshold,
            }
            for c in checks
        ],
    }
    return DispatchResult(0 if ok else 1, summary, {}, lines)
