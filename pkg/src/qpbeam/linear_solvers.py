"""Diagonal symbols and the inversion ladder for the linearized operator.

Four inverses, from trivial to full: the constant-coefficient diagonal,
the conjugated operator (diagonal plus order-zero remainder) by Neumann
iteration, and the projected linearized operator either through the
conjugation route or by a dense Galerkin solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NonContractionError, SymbolFloorError
from .fourier import (
    FourierField,
    NormSpec,
    _build,
    _index_grids,
    _phase_dot,
    _omega_array,
    galerkin_project,
    multiply,
    sobolev_norm,
    sobolev_threshold,
    spatial_mean_norm,
)
from .nonlinearity import derivative_operator
from .reduction import ReductionData, apply_multiplier, build_conjugation, remainder_operator

# Uniform bound constant of the diagonal symbol: |Theta|^{-1} <= K0 / delta.
K0 = 1.0e6

NEUMANN_TOL = 1e-10
NEUMANN_MAX_ITER = 200


def diagonal_symbol_value(eps: float, mu: float, omega, k, j) -> complex:
    """Symbol -(omega.k)^2 + |j|^4 + i eps (omega.k)(1 + eps^{1/2} mu) at one mode."""
    om = np.asarray(getattr(omega, "values", omega), dtype=float)
    sigma = float(np.dot(om, np.asarray(k, dtype=float)))
    j4 = float(np.sum(np.asarray(j, dtype=float) ** 2)) ** 2
    return complex(-(sigma**2) + j4, eps * sigma * (1.0 + math.sqrt(eps) * mu))


@dataclass(frozen=True)
class DiagonalSymbol:
    """Mode-indexed multiplier of the constant-coefficient operator."""

    eps: float
    mu: float
    omega: tuple[float, ...]
    delta: float

    def __post_init__(self):
        if not (0 < self.eps <= self.delta):
            raise ValueError("need 0 < eps <= delta")

    def value(self, k, j) -> complex:
        return diagonal_symbol_value(self.eps, self.mu, self.omega, k, j)

    def _values_on(self, u: FourierField) -> np.ndarray:
        dot = _phase_dot(u, _omega_array(self.omega, u.box.nu))
        _, _, j_l2sq = _index_grids(u.extents, u.box.nu)
        return (
            -(dot**2)
            + j_l2sq**2
            + 1j * self.eps * dot * (1.0 + math.sqrt(self.eps) * self.mu)
        )

    def apply(self, u: FourierField) -> FourierField:
        return _build(u.box, self._values_on(u) * u.coeffs, u.hermitian)


def _zero_mean_or_raise(h: FourierField) -> np.ndarray:
    """Coefficients with the spatial-mean plane zeroed; reject a genuine mean."""
    from .fourier import require_zero_spatial_mean

    require_zero_spatial_mean(h, what="diagonal inversion input")
    nu = h.box.nu
    arr = h.coeffs.copy()
    sl = tuple([slice(None)] * nu + [slice(e, e + 1) for e in h.extents[nu:]])
    arr[sl] = 0.0
    return arr


def invert_diagonal(symbol: DiagonalSymbol, h: FourierField) -> FourierField:
    """Exact inverse of the diagonal operator on the zero-spatial-mean subspace.

    Verifies the uniform bound |Theta|^{-1} <= K0/delta on every active
    mode whenever the standing assumption delta^{1/2} |mu| <= 1/2 holds.
    """
    arr = _zero_mean_or_raise(h)
    values = symbol._values_on(h)
    _, _, j_l2sq = _index_grids(h.extents, h.box.nu)
    active = (j_l2sq > 0) & (np.abs(arr) > 0)
    if active.any():
        min_theta = float(np.abs(values[active]).min())
        if math.sqrt(symbol.delta) * abs(symbol.mu) <= 0.5:
            floor = symbol.delta / K0
            if min_theta < floor * (1.0 - 1e-12):
                raise SymbolFloorError(
                    f"|Theta| = {min_theta:.3e} below the guaranteed floor "
                    f"delta/K0 = {floor:.3e}"
                )
        elif min_theta == 0.0:
            raise SymbolFloorError("diagonal symbol vanished on an active mode")
    out = np.zeros_like(arr)
    nonzero = np.abs(values) > 0
    np.divide(arr, values, out=out, where=nonzero)
    out = np.where(j_l2sq > 0, out, 0.0)
    return _build(h.box, out, h.hermitian)


# ---------------------------------------------------------------------------
# symbol floor scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SymbolFloorReport:
    """Scan record for the piecewise lower bounds of the diagonal symbol."""

    eps: float
    delta: float
    mu: float
    j_floor: int
    sigma_max: float
    j_max: float
    checked: int
    min_abs_symbol: float
    case_margins: dict
    violations: tuple
    uniform_bound_ok: bool

    @property
    def ok(self) -> bool:
        return not self.violations and self.uniform_bound_ok


def _spatial_quartics(d: int, j_max: float) -> list[float]:
    """Distinct values of |j|^4 over nonzero integer j with |j|_2 <= j_max."""
    from itertools import product as iproduct

    limit = int(math.floor(j_max))
    quartics = set()
    for j in iproduct(range(-limit, limit + 1), repeat=d):
        n2 = sum(x * x for x in j)
        if 0 < n2 <= j_max**2:
            quartics.add(float(n2) ** 2)
    return sorted(quartics)


def symbol_floor(
    eps: float,
    delta: float,
    mu: float,
    j_floor: int,
    sigma_max: float = 6.0,
    j_max: float = 8.0,
    d: int = 1,
    sigma_step: float = 1e-3,
) -> SymbolFloorReport:
    """Verify the piecewise lower bounds of |Theta|^2 over a (sigma, j) scan.

    Case a (1 <= |j|^4 <= j_floor): off the resonant bands the bound is
    1e-6 (below) or 1e-6 j_floor^2 (above); on the bands it is
    (1/16) delta^2 (1 - 1e-3)^2.  Case b (|j|^4 > j_floor): 1/4 j_floor^2
    away from the band, (1/32) delta^2 j_floor on it.  Requires the
    standing assumption delta^{1/2} |mu| <= 1/2.
    """
    if not (0 < delta / 2 <= eps <= delta):
        raise ValueError("need eps in [delta/2, delta]")
    if j_floor <= 1:
        raise ValueError("j_floor must exceed 1")
    if math.sqrt(delta) * abs(mu) > 0.5:
        raise ValueError("standing assumption sqrt(delta)|mu| <= 1/2 violated")

    sigmas = np.arange(-sigma_max, sigma_max + sigma_step / 2, sigma_step)
    # include the band edges exactly
    edges = [1 - 1e-3, 1 + 1e-3]
    sigmas = np.unique(np.concatenate([sigmas, edges, [-e for e in edges]]))
    quartics = _spatial_quartics(d, j_max)

    min_abs = math.inf
    margins: dict[str, float] = {}
    violations: list[tuple] = []
    checked = 0
    for j4 in quartics:
        theta2 = (j4 - sigmas**2) ** 2 + (eps**1.5 * mu * sigmas + eps * sigmas) ** 2
        if j4 <= j_floor:
            below = np.abs(sigmas) < 1 - 1e-3
            above = np.abs(sigmas) > (1 + 1e-3) * math.sqrt(j_floor)
            band = ~(below | above)
            cases = (
                ("a-below", below, 1e-6),
                ("a-above", above, 1e-6 * j_floor**2),
                ("a-band", band, delta**2 * (1 - 1e-3) ** 2 / 16.0),
            )
        else:
            away = np.abs(j4 - sigmas**2) >= 0.5 * j_floor
            cases = (
                ("b-away", away, 0.25 * j_floor**2),
                ("b-band", ~away, delta**2 * j_floor / 32.0),
            )
        for label, mask, bound in cases:
            if not mask.any():
                continue
            vals = theta2[mask]
            checked += int(mask.sum())
            margin = float(vals.min() - bound)
            margins[label] = min(margins.get(label, math.inf), margin)
            if margin < 0:
                worst = int(np.argmin(vals))
                sigma_bad = float(sigmas[mask][worst])
                violations.append((sigma_bad, j4, bound, float(vals[worst])))
        min_abs = min(min_abs, float(np.sqrt(theta2.min())))

    return SymbolFloorReport(
        eps=eps,
        delta=delta,
        mu=mu,
        j_floor=j_floor,
        sigma_max=sigma_max,
        j_max=j_max,
        checked=checked,
        min_abs_symbol=min_abs,
        case_margins=margins,
        violations=tuple(violations),
        uniform_bound_ok=min_abs >= delta / K0,
    )


# ---------------------------------------------------------------------------
# Neumann inversion of the conjugated operator
# ---------------------------------------------------------------------------


class NeumannResult(NamedTuple):
    field: FourierField
    iterations: int
    residual: float
    contraction: float
    bound_ratio: float


def _neumann_solve(
    symbol: DiagonalSymbol,
    remainder: Callable[[FourierField], FourierField],
    h: FourierField,
    tol: float,
    max_iter: int,
    spec: NormSpec,
) -> NeumannResult:
    """Solve (D + R~) x = h by x <- D^{-1}(h - R~ x) with residual control."""
    h_norm = sobolev_norm(h, spec)
    if h_norm == 0.0:
        return NeumannResult(invert_diagonal(symbol, h), 0, 0.0, 0.0, 0.0)
    x = invert_diagonal(symbol, h)
    prev_res = math.inf
    rises = 0
    contraction = 0.0
    for iteration in range(1, max_iter + 1):
        correction = remainder(x)
        residual_field = symbol.apply(x) + correction - h
        res = sobolev_norm(residual_field, spec) / h_norm
        if res <= tol:
            bound_ratio = sobolev_norm(x, spec) / h_norm
            return NeumannResult(x, iteration, res, contraction, bound_ratio)
        contraction = res / prev_res if prev_res < math.inf else contraction
        if res >= prev_res:
            rises += 1
            if rises >= 2:
                raise NonContractionError(
                    f"Neumann iteration stagnated at residual {res:.3e} "
                    f"(contraction factor {contraction:.3f}); reduce delta^(1/2)*gamma",
                    factor=contraction,
                )
        else:
            rises = 0
        prev_res = res
        x = invert_diagonal(symbol, h - correction)
    raise NonContractionError(
        f"Neumann iteration did not reach tol {tol:.1e} in {max_iter} steps "
        f"(last residual {prev_res:.3e})",
        factor=contraction,
    )


def invert_reduced(
    v: FourierField,
    omega,
    eps: float,
    delta: float,
    h: FourierField,
    tol: float = NEUMANN_TOL,
    max_iter: int = NEUMANN_MAX_ITER,
    data: ReductionData | None = None,
    s: float | None = None,
) -> NeumannResult:
    """Invert the conjugated operator D + R~ by Neumann iteration."""
    if data is None:
        data = build_conjugation(v, omega, eps)
    s_eff = sobolev_threshold(h.box.nu, h.box.d) if s is None else s
    symbol = DiagonalSymbol(eps, data.mu, tuple(np.asarray(getattr(omega, "values", omega), float)), delta)
    remainder = remainder_operator(v, omega, eps, data)
    return _neumann_solve(symbol, remainder, h, tol, max_iter, NormSpec(0.0, s_eff))


class LinearizedSolveResult(NamedTuple):
    field: FourierField
    method: str
    residual: float
    defect_rounds: int
    neumann_iterations: int


def linearized_apply(
    v: FourierField, omega, eps: float, cutoff: int
) -> Callable[[FourierField], FourierField]:
    """Projected linearized operator x -> L x + eps^{3/2} P(DN(v)[x]) on the low ball."""
    from .fourier import bilaplacian, phase_derivative

    derivative = derivative_operator(v, omega)

    def apply(x: FourierField) -> FourierField:
        dx = phase_derivative(x, omega)
        main = phase_derivative(dx, omega) + bilaplacian(x) + eps * dx
        coupled = eps**1.5 * galerkin_project(derivative(x), cutoff, "low")
        return main + coupled

    return apply


def invert_linearized(
    v: FourierField,
    omega,
    eps: float,
    delta: float,
    cutoff: int,
    h: FourierField,
    method: str = "conjugation",
    tol: float = NEUMANN_TOL,
    max_defect_rounds: int = 25,
    s: float | None = None,
    data: ReductionData | None = None,
    prior_spec: NormSpec | None = None,
) -> LinearizedSolveResult:
    """Solve the projected linearized equation on the Galerkin ball.

    ``conjugation`` follows the multiplier route (conjugate, invert the
    reduced operator by Neumann iteration, project back) and polishes with
    defect-correction rounds until the projected residual meets ``tol``.
    ``direct`` assembles the dense Galerkin matrix and factorizes it; the
    two must agree and the dense route is the ground truth in tests.
    """
    if prior_spec is not None and sobolev_norm(v, prior_spec) > 1.0 + 1e-12:
        raise ValueError("linearized inversion requires the prior bound ||v|| <= 1")
    s_eff = sobolev_threshold(h.box.nu, h.box.d) if s is None else s
    spec = NormSpec(0.0, s_eff)
    h = galerkin_project(h, cutoff, "low")
    h_norm = sobolev_norm(h, spec)
    operator = linearized_apply(v, omega, eps, cutoff)

    if method == "direct":
        from .oracles import linearized_matrix, solve_dense

        matrix, basis = linearized_matrix(v, omega, eps, cutoff, like=h)
        rhs = np.array([h.coefficient(m) for m in basis])
        solution = solve_dense(matrix, rhs)
        x = _field_from_basis(h.box, basis, solution, h.hermitian)
        res = (
            sobolev_norm(operator(x) - h, spec) / h_norm if h_norm else 0.0
        )
        return LinearizedSolveResult(x, "direct", res, 0, 0)

    if method != "conjugation":
        raise ValueError("method must be 'conjugation' or 'direct'")

    if data is None:
        data = build_conjugation(v, omega, eps)
    symbol = DiagonalSymbol(
        eps, data.mu, tuple(np.asarray(getattr(omega, "values", omega), float)), delta
    )
    remainder = remainder_operator(v, omega, eps, data)

    def padded_inverse(rhs: FourierField) -> tuple[FourierField, int]:
        conjugated = apply_multiplier(rhs, data, inverse=True)
        inner = _neumann_solve(symbol, remainder, conjugated, tol, NEUMANN_MAX_ITER, spec)
        back = apply_multiplier(inner.field, data)
        return galerkin_project(back, cutoff, "low"), inner.iterations

    if h_norm == 0.0:
        from .fourier import zero_field

        return LinearizedSolveResult(zero_field(h.box), "conjugation", 0.0, 0, 0)

    x, iters = padded_inverse(h)
    rounds = 0
    res_field = h - operator(x)
    res = sobolev_norm(res_field, spec) / h_norm
    while res > tol and rounds < max_defect_rounds:
        corr, extra = padded_inverse(res_field)
        iters += extra
        x = x + corr
        rounds += 1
        res_field = h - operator(x)
        new_res = sobolev_norm(res_field, spec) / h_norm
        if new_res >= res:
            raise NonContractionError(
                f"defect correction stagnated at residual {new_res:.3e}",
                factor=new_res / res,
            )
        res = new_res
    if res > tol:
        raise NonContractionError(
            f"linearized solve stopped at residual {res:.3e} after "
            f"{max_defect_rounds} defect rounds",
            factor=None,
        )
    return LinearizedSolveResult(x, "conjugation", res, rounds, iters)


def _field_from_basis(box, basis, values, hermitian) -> FourierField:
    entries_ext = [0] * box.ndim
    for k, j in basis:
        for ax, val in enumerate(k + j):
            entries_ext[ax] = max(entries_ext[ax], abs(val))
    arr = np.zeros(tuple(2 * e + 1 for e in entries_ext), dtype=complex)
    for (k, j), value in zip(basis, values):
        idx = tuple(x + e for x, e in zip(k + j, entries_ext))
        arr[idx] = value
    return _build(box, arr, hermitian)


def inverse_norm_proxy(
    omega,
    eps: float,
    delta: float,
    cutoff: int,
    j_max: int = 2,
    nu: int | None = None,
) -> float:
    """max over single-mode probes of 1/|Theta| with mu = 0; tracks delta^{-1}."""
    om = np.asarray(getattr(omega, "values", omega), dtype=float)
    n = len(om) if nu is None else nu
    worst = 0.0
    from itertools import product as iproduct

    for k in iproduct(range(-cutoff, cutoff + 1), repeat=n):
        l1 = sum(abs(x) for x in k)
        if l1 > cutoff:
            continue
        sigma = float(np.dot(om, k))
        for j in range(1, j_max + 1):
            if max(1, l1, j) > cutoff:
                continue
            theta = complex(-(sigma**2) + float(j) ** 4, eps * sigma)
            worst = max(worst, 1.0 / abs(theta))
    return worst
