"""Self-contained verification battery driven by the oracle machinery.

Runs a fixed, seeded set of cross-checks of every fast path against its
independent oracle at small sizes; the CLI ``verify`` subcommand and the
service endpoint expose it.  Exits green only if every check passes.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .config import RunConfig
from .fourier import (
    NormSpec,
    TruncationBox,
    galerkin_project,
    multiply,
    phase_antiderivative,
    phase_derivative,
    project_spatial,
    sobolev_norm,
    synthesize_on_grid,
)
from .averaged import average_bound_ratio, residual_average, solve_average
from .linear_solvers import (
    DiagonalSymbol,
    invert_diagonal,
    invert_linearized,
    invert_reduced,
    symbol_floor,
)
from .nonlinearity import damping_coefficient
from .oracles import (
    basis_vector_to_field,
    field_to_basis_vector,
    finite_difference_check,
    grid_product_oracle,
    grid_quadrature_damping,
    linearized_matrix,
    random_field,
    random_phase_field,
    solve_dense,
)
from .reduction import build_conjugation, conjugation_defect, homological_residual


class CheckResult(NamedTuple):
    name: str
    passed: bool
    value: float
    threshold: float


def _check(name: str, value: float, threshold: float) -> CheckResult:
    return CheckResult(name, bool(value <= threshold), float(value), float(threshold))


def verification_suite(config: RunConfig | None = None) -> list[CheckResult]:
    """The oracle battery at desk scale; deterministic (fixed seed)."""
    rng = np.random.default_rng(2024)
    if config is not None:
        nu, d, s = config.params.nu, config.params.d, config.params.s
        omega = config.omega
        delta = config.params.delta
        eps = config.params.epsilon
        gamma = config.params.gamma
        rho0 = config.params.rho0
        M = config.params.M
    else:
        from .frequency import golden_frequency

        nu, d, s = 2, 1, 2.0
        omega = golden_frequency()
        delta, eps, gamma, rho0, M = 0.05, 0.0375, 2.0, 0.5, 3
    box = TruncationBox(nu, d, 8, 2)
    checks: list[CheckResult] = []

    u = random_field(box, rng, support=4, norm=1.0)
    w = random_field(box, rng, support=4, norm=1.0)
    checks.append(_check("product grid oracle", grid_product_oracle(u, w), 1e-10))

    vals = synthesize_on_grid(u, tuple(2 * e + 1 for e in u.extents))
    parseval = abs(
        math.sqrt(float(np.mean(vals**2))) - sobolev_norm(u, NormSpec(0.0, 0.0))
    )
    checks.append(_check("grid Parseval identity", parseval, 1e-10))

    du = phase_derivative(u, omega)
    roundtrip = sobolev_norm(phase_antiderivative(du, omega) - u, NormSpec(0.0, 0.0))
    checks.append(_check("phase derivative roundtrip", roundtrip, 1e-11))

    v = random_field(box, rng, support=3, norm=0.3)
    b_fast = damping_coefficient(v).field
    b_grid = grid_quadrature_damping(v)
    diff = b_fast - b_grid
    checks.append(
        _check(
            "damping quadrature oracle",
            float(np.abs(diff.coeffs).max()),
            1e-10,
        )
    )

    h = random_field(box, rng, support=3, norm=0.3)
    checks.append(
        _check(
            "derivative finite differences",
            finite_difference_check(v, h, omega, 1e-4),
            1e-6,
        )
    )

    symbol = DiagonalSymbol(eps, 0.0, tuple(omega.values), delta)
    rhs = random_field(box, rng, support=6, j_extent=1, norm=1.0)
    x = invert_diagonal(symbol, rhs)
    diag_round = sobolev_norm(symbol.apply(x) - rhs, NormSpec(0.0, s)) / sobolev_norm(
        rhs, NormSpec(0.0, s)
    )
    checks.append(_check("diagonal inverse roundtrip", diag_round, 1e-12))

    small_v = random_field(box, rng, support=3, norm=0.05, norm_spec=(0.0, s + 4))
    matrix, basis = linearized_matrix(small_v, omega, eps, box.cutoff, like=rhs)
    rhs_low = galerkin_project(project_spatial(rhs, "complement"), box.cutoff, "low")
    dense = basis_vector_to_field(
        box, basis, solve_dense(matrix, field_to_basis_vector(rhs_low, basis))
    )
    fast = invert_linearized(
        small_v, omega, eps, delta, box.cutoff, rhs_low, method="conjugation"
    ).field
    rel = sobolev_norm(dense - fast, NormSpec(0.0, s)) / sobolev_norm(
        dense, NormSpec(0.0, s)
    )
    checks.append(_check("linearized inverse vs dense", rel, 1e-8))

    reduced = invert_reduced(small_v, omega, eps, delta, rhs_low)
    data = build_conjugation(small_v, omega, eps)
    checks.append(
        _check("reduced inverse residual", reduced.residual, 1e-9)
    )

    floor = symbol_floor(eps, delta, 0.0, 4, sigma_max=6.0, j_max=8.0, d=d)
    checks.append(
        _check("symbol floor violations", float(len(floor.violations)), 0.0)
    )
    checks.append(
        _check(
            "symbol uniform bound",
            0.0 if floor.uniform_bound_ok else 1.0,
            0.0,
        )
    )

    checks.append(
        _check(
            "homological equation residual",
            homological_residual(data, omega),
            1e-8,
        )
    )
    checks.append(
        _check(
            "conjugation defect",
            conjugation_defect(small_v, omega, eps, data=data),
            1e-8,
        )
    )

    g0 = random_phase_field(box, rng, support=6, norm=1.0)
    u0 = solve_average(g0, omega, eps)
    checks.append(
        _check("averaged equation residual", residual_average(u0, g0, omega, eps, s), 1e-12)
    )
    lam = (M - 1) / M
    checks.append(
        _check(
            "averaged norm bound",
            average_bound_ratio(u0, g0, delta, gamma, rho0, lam, s),
            1.0,
        )
    )
    return checks
