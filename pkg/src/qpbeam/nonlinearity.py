"""The nonlocal damping nonlinearity, its derivative, and Taylor remainder.

The cubic map is ``N(v) = b(phi) * (omega . grad_phi) v`` with the
phase-dependent damping coefficient ``b(phi) = integral |grad v|^2 dx``.
Spatial integrals are evaluated in mode space by Parseval, exact on
truncations; grid quadrature appears only in test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fourier import (
    FourierField,
    _build,
    _convolve,
    multiply,
    phase_derivative,
    require_zero_spatial_mean,
    synthesize_on_grid,
)


@dataclass(frozen=True)
class DampingCoefficient:
    """Phase-only damping coefficient b(phi) >= 0 and the cutoff of its source."""

    field: FourierField
    source_cutoff: int

    @property
    def mean(self) -> float:
        """Phase average of b; equals the zero Fourier mode."""
        nu = self.field.box.nu
        return float(
            self.field.coefficient(((0,) * nu, (0,) * self.field.box.d)).real
        )

    def min_on_grid(self, points_per_axis: int = 64) -> float:
        """Smallest sampled value of b(phi); nonnegative up to roundoff."""
        e = self.field.extents
        sizes = tuple(max(points_per_axis, 2 * ext + 1) for ext in e)
        return float(synthesize_on_grid(self.field, sizes).min())


def _spatial_gradient_arrays(v: FourierField) -> list[np.ndarray]:
    """Raw coefficient arrays of the spatial partial derivatives of v."""
    out = []
    ndim = v.coeffs.ndim
    for axis in range(v.box.d):
        ax = v.box.nu + axis
        e = v.extents[ax]
        shape = [1] * ndim
        shape[ax] = 2 * e + 1
        mult = 1j * np.arange(-e, e + 1, dtype=float).reshape(shape)
        out.append(v.coeffs * mult)
    return out


def _phase_contraction(a_arrays, b_arrays, box) -> np.ndarray:
    """Sum over spatial axes of the j-total = 0 slice of conv(a_i, b_i)."""
    acc = None
    for a, b in zip(a_arrays, b_arrays):
        conv = _convolve(a, b)
        sl = [slice(None)] * box.nu
        for ax in range(box.nu, box.nu + box.d):
            centre = (conv.shape[ax] - 1) // 2
            sl.append(slice(centre, centre + 1))
        piece = conv[tuple(sl)]
        acc = piece if acc is None else acc + piece
    return acc


def cross_damping(v: FourierField, h: FourierField) -> FourierField:
    """Phase-only field ``integral grad v . grad h dx`` (symmetric in v, h)."""
    if v.box != h.box:
        raise ValueError("cross_damping operands must share a box")
    grads_v = _spatial_gradient_arrays(v)
    grads_h = _spatial_gradient_arrays(h)
    arr = _phase_contraction(grads_v, grads_h, v.box)
    if arr is None:
        raise ValueError("fields must have at least one spatial axis")
    # grad e^{ijx} . grad e^{-ijx} = -(ij).(ij)* picks up a sign through the
    # reflected index in the convolution, so the contraction above already
    # carries |j|^2 with the correct sign.
    arr = (2.0 * np.pi) ** v.box.d * arr
    return _build(v.box, arr, v.hermitian and h.hermitian)


def damping_coefficient(v: FourierField) -> DampingCoefficient:
    """b(phi) = integral |grad v|^2 dx, computed by padded mode convolution."""
    require_zero_spatial_mean(v, what="damping source")
    return DampingCoefficient(cross_damping(v, v), v.box.cutoff)


def mean_damping(v: FourierField) -> float:
    """Phase average of the damping coefficient; nonnegative."""
    return damping_coefficient(v).mean


def nonlinearity(v: FourierField, omega) -> FourierField:
    """N(v) = b(phi) (omega.grad_phi) v; cubic, zero spatial mean in, zero out."""
    b = damping_coefficient(v)
    return multiply(b.field, phase_derivative(v, omega))


def nonlinearity_derivative(v: FourierField, h: FourierField, omega) -> FourierField:
    """Frechet derivative DN(v)[h], linear in h.

    DN(v)[h] = 2 (omega.grad) v * integral grad v . grad h dx
             + (omega.grad) h * integral |grad v|^2 dx.
    """
    require_zero_spatial_mean(v, what="derivative base point")
    require_zero_spatial_mean(h, what="derivative direction")
    term1 = 2.0 * multiply(cross_damping(v, h), phase_derivative(v, omega))
    term2 = multiply(cross_damping(v, v), phase_derivative(h, omega))
    return term1 + term2


def cross_coupling(v: FourierField, h: FourierField, omega) -> FourierField:
    """Rank-structured part of the derivative: 2 (omega.grad) v * integral grad v.grad h."""
    return 2.0 * multiply(cross_damping(v, h), phase_derivative(v, omega))


def derivative_operator(v: FourierField, omega) -> Callable[[FourierField], FourierField]:
    """Closure applying DN(v)[.] with the damping of v precomputed."""
    require_zero_spatial_mean(v, what="derivative base point")
    b_field = cross_damping(v, v)
    dv = phase_derivative(v, omega)

    def apply(h: FourierField) -> FourierField:
        return 2.0 * multiply(cross_damping(v, h), dv) + multiply(
            b_field, phase_derivative(h, omega)
        )

    return apply


def taylor_remainder(v: FourierField, h: FourierField, omega) -> FourierField:
    """Quadratic-and-higher remainder N(v+h) - N(v) - DN(v)[h], in closed form.

    The closed form
    ``(omega.grad)v * integral |grad h|^2 + 2 (omega.grad)h * integral grad v.grad h
    + (omega.grad)h * integral |grad h|^2``
    avoids the cancellation of the direct difference.
    """
    term1 = multiply(cross_damping(h, h), phase_derivative(v, omega))
    term2 = 2.0 * multiply(cross_damping(v, h), phase_derivative(h, omega))
    term3 = multiply(cross_damping(h, h), phase_derivative(h, omega))
    return term1 + term2 + term3


def taylor_remainder_direct(v: FourierField, h: FourierField, omega) -> FourierField:
    """Remainder via the literal difference; cross-check route for tests."""
    return nonlinearity(v + h, omega) - nonlinearity(v, omega) - nonlinearity_derivative(
        v, h, omega
    )
