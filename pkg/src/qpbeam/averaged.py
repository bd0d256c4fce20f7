"""Closed-form solve of the spatial-average equation."""

from __future__ import annotations

import numpy as np

from .errors import SmallDivisorError
from .fourier import (
    FourierField,
    NormSpec,
    _build,
    _index_grids,
    _omega_array,
    _phase_dot,
    phase_derivative,
    sobolev_norm,
)


def solve_average(
    g0: FourierField, omega, eps: float, divisor_floor: float | None = None
) -> FourierField:
    """Unique zero-mean solution of the phase-only averaged equation.

    Mode-wise, ``u0_k = eps^{5/4} g0_k / (-(omega.k)^2 + i eps (omega.k))``
    for k /= 0.  Requires ``g0`` phase-only with zero phase average.
    """
    if not g0.is_phase_only:
        raise ValueError("averaged equation takes a phase-only right-hand side")
    nu = g0.box.nu
    zero = (0,) * nu, (0,) * g0.box.d
    mean = g0.coefficient(zero)
    scale = float(np.abs(g0.coeffs).max()) if g0.coeffs.size else 0.0
    if abs(mean) > 1e-12 * max(1.0, scale):
        raise ValueError(f"g0 must have zero phase average, got {mean}")

    om = _omega_array(omega, nu)
    floor = divisor_floor if divisor_floor is not None else 1e-14 * np.abs(om).max()
    dot = _phase_dot(g0, om)
    k_l1 = _index_grids(g0.extents, nu)[0]
    resonant = (k_l1 > 0) & (np.abs(dot) < floor) & (np.abs(g0.coeffs) > 0)
    if resonant.any():
        idx = np.unravel_index(np.argmax(resonant), g0.coeffs.shape)
        k = tuple(int(i - e) for i, e in zip(idx[:nu], g0.extents))
        raise SmallDivisorError(k, float(np.abs(dot[idx])), floor)

    denom = -(dot**2) + 1j * eps * dot
    out = np.zeros_like(g0.coeffs)
    np.divide(eps**1.25 * g0.coeffs, denom, out=out, where=np.abs(denom) > 0)
    out = np.where(k_l1 > 0, out, 0.0)
    return _build(g0.box, out, g0.hermitian)


def residual_average(
    u0: FourierField, g0: FourierField, omega, eps: float, s: float
) -> float:
    """Norm of (omega.grad)^2 u0 + eps (omega.grad) u0 - eps^{5/4} g0 at width 0."""
    du = phase_derivative(u0, omega)
    residual = phase_derivative(du, omega) + eps * du - eps**1.25 * g0
    return sobolev_norm(residual, NormSpec(0.0, s))


def average_bound_ratio(
    u0: FourierField,
    g0: FourierField,
    delta: float,
    gamma: float,
    rho0: float,
    lam: float,
    s: float,
) -> float:
    """||u0|| at the shrunk width over its guaranteed bound delta^{5/4} gamma^2 ||g0||."""
    top = sobolev_norm(u0, NormSpec(lam * rho0, s))
    bound = delta**1.25 * gamma**2 * sobolev_norm(g0, NormSpec(rho0, s))
    return top / bound if bound > 0 else 0.0
