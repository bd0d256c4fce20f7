"""Independent oracles: dense Galerkin matrices, direct solves, finite differences.

Everything here deliberately avoids the fast paths it is used to check:
dense matrices are factorized by LAPACK, products are cross-checked on
fine grids, and derivatives by central differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as iproduct
from typing import NamedTuple

import numpy as np

from .errors import DenseCapError
from .fourier import (
    FourierField,
    NormSpec,
    TruncationBox,
    _build,
    field_from_modes,
    galerkin_project,
    multiply,
    sobolev_norm,
    sobolev_threshold,
    synthesize_on_grid,
    unit_mode_field,
)
from .linear_solvers import linearized_apply
from .nonlinearity import nonlinearity, nonlinearity_derivative

DENSE_CAP = 4000


def galerkin_basis(
    box: TruncationBox, cutoff: int, j_extents: tuple[int, ...]
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Zero-spatial-mean modes with <k,j> <= cutoff and |j_i| <= j_extents[i].

    The spatial extents bound the slab actually excited by a given forcing;
    the linearized operator closes on it because the coupling only creates
    spatial modes already present in v.
    """
    modes = []
    for k in iproduct(range(-cutoff, cutoff + 1), repeat=box.nu):
        if sum(abs(x) for x in k) > cutoff:
            continue
        for j in iproduct(*[range(-e, e + 1) for e in j_extents]):
            n2 = sum(x * x for x in j)
            if n2 == 0 or n2 > cutoff**2:
                continue
            modes.append((k, j))
    modes.sort()
    if len(modes) > DENSE_CAP:
        raise DenseCapError(
            f"dense basis has {len(modes)} modes, above the cap {DENSE_CAP}"
        )
    return modes


def dense_operator(apply_fn, box: TruncationBox, basis) -> np.ndarray:
    """Column m = operator applied to the m-th basis exponential."""
    n = len(basis)
    matrix = np.zeros((n, n), dtype=complex)
    index = {mode: i for i, mode in enumerate(basis)}
    for col, mode in enumerate(basis):
        image = apply_fn(unit_mode_field(box, mode))
        nz = np.argwhere(image.coeffs != 0)
        for pos in nz:
            out_mode = tuple(int(p - e) for p, e in zip(pos, image.extents))
            key = (out_mode[: box.nu], out_mode[box.nu :])
            row = index.get(key)
            if row is not None:
                matrix[row, col] = image.coeffs[tuple(pos)]
    return matrix


def linearized_matrix(
    v: FourierField, omega, eps: float, cutoff: int, like: FourierField | None = None
) -> tuple[np.ndarray, list]:
    """Dense matrix of the projected linearized operator over the Galerkin basis."""
    j_extents = list(v.extents[v.box.nu :])
    if like is not None:
        j_extents = [max(a, b) for a, b in zip(j_extents, like.extents[like.box.nu :])]
    j_extents = [min(e if e > 0 else 1, cutoff) for e in j_extents]
    basis = galerkin_basis(v.box, cutoff, tuple(j_extents))
    apply_fn = linearized_apply(v, omega, eps, cutoff)
    return dense_operator(apply_fn, v.box, basis), basis


def solve_dense(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Direct factorization solve with a residual guarantee."""
    solution = np.linalg.solve(matrix, rhs)
    rhs_norm = float(np.linalg.norm(rhs))
    if rhs_norm > 0:
        residual = float(np.linalg.norm(matrix @ solution - rhs)) / rhs_norm
        if residual > 1e-10:
            raise np.linalg.LinAlgError(
                f"dense solve residual {residual:.3e} exceeds 1e-10"
            )
    return solution


def field_to_basis_vector(u: FourierField, basis) -> np.ndarray:
    return np.array([u.coefficient(m) for m in basis])


def basis_vector_to_field(box, basis, values, hermitian=True) -> FourierField:
    extents = [0] * box.ndim
    for k, j in basis:
        for ax, val in enumerate(k + j):
            extents[ax] = max(extents[ax], abs(val))
    arr = np.zeros(tuple(2 * e + 1 for e in extents), dtype=complex)
    for (k, j), value in zip(basis, values):
        arr[tuple(x + e for x, e in zip(k + j, extents))] = value
    return _build(box, arr, hermitian)


def finite_difference_check(
    v: FourierField, h: FourierField, omega, t: float, s: float | None = None
) -> float:
    """Relative error of the central difference against the derivative map."""
    s_eff = sobolev_threshold(v.box.nu, v.box.d) if s is None else s
    spec = NormSpec(0.0, s_eff)
    difference = (0.5 / t) * (
        nonlinearity(v + t * h, omega) - nonlinearity(v + (-t) * h, omega)
    )
    exact = nonlinearity_derivative(v, h, omega)
    denom = sobolev_norm(exact, spec)
    if denom == 0.0:
        return sobolev_norm(difference, spec)
    return sobolev_norm(difference - exact, spec) / denom


def grid_product_oracle(
    u: FourierField, w: FourierField, oversample: int = 2
) -> float:
    """Max coefficient deviation of multiply() from a fine-grid pointwise product."""
    ext_u, ext_w = u.extents, w.extents
    out_ext = tuple(a + b for a, b in zip(ext_u, ext_w))
    sizes = tuple(max(oversample * (2 * e + 1), 3) for e in out_ext)
    values = synthesize_on_grid(u, sizes) * synthesize_on_grid(w, sizes)
    from .fourier import _analyze_from_grid, _mask_to_storage, _clip_to_support

    coeffs = _analyze_from_grid(values, out_ext)
    grid_product = FourierField(
        u.box, _clip_to_support(_mask_to_storage(coeffs, u.box)), True
    )
    fast = multiply(u, w)
    diff = grid_product - fast
    return float(np.abs(diff.coeffs).max()) if diff.coeffs.size else 0.0


def grid_quadrature_damping(v: FourierField, points: int = 48) -> FourierField:
    """Damping coefficient by trapezoidal quadrature of |grad v|^2 on a grid.

    Independent of the mode-space convolution route: synthesises the
    spatial gradient, integrates over x pointwise in phi, and transforms
    the phase samples back to coefficients.
    """
    from .fourier import _analyze_from_grid

    nu, d = v.box.nu, v.box.d
    sizes = tuple(max(points, 2 * e + 1) for e in v.extents)
    total = None
    for axis in range(d):
        ax = nu + axis
        e = v.extents[ax]
        shape = [1] * v.coeffs.ndim
        shape[ax] = 2 * e + 1
        mult = 1j * np.arange(-e, e + 1, dtype=float).reshape(shape)
        grad_field = _build(v.box, v.coeffs * mult, False)
        grad_vals = synthesize_on_grid(grad_field, sizes)
        piece = grad_vals**2
        total = piece if total is None else total + piece
    x_axes = tuple(range(nu, nu + d))
    cell = (2.0 * np.pi) ** d / np.prod([sizes[a] for a in x_axes])
    b_vals = total.sum(axis=x_axes) * cell
    # b carries twice the phase support of v
    phase_ext = tuple(
        min(2 * e, (g - 1) // 2) for e, g in zip(v.extents[:nu], b_vals.shape)
    )
    coeffs = _analyze_from_grid(b_vals, phase_ext).reshape(
        tuple(2 * e + 1 for e in phase_ext) + (1,) * d
    )
    return _build(v.box, coeffs, True)


# ---------------------------------------------------------------------------
# random field corpus
# ---------------------------------------------------------------------------


def random_field(
    box: TruncationBox,
    rng: np.random.Generator,
    support: int | None = None,
    j_extent: int = 1,
    decay: float = 0.3,
    norm: float | None = None,
    norm_spec: NormSpec | tuple[float, float] = (0.0, 0.0),
    zero_spatial_mean: bool = True,
) -> FourierField:
    """Reality-symmetric random field with exponentially decaying spectrum."""
    cutoff = box.cutoff if support is None else support
    entries = []
    for k in iproduct(range(-cutoff, cutoff + 1), repeat=box.nu):
        if sum(abs(x) for x in k) > cutoff:
            continue
        for j in iproduct(*[range(-j_extent, j_extent + 1)] * box.d):
            n2 = sum(x * x for x in j)
            if zero_spatial_mean and n2 == 0:
                continue
            if n2 > cutoff**2 or max(1, sum(abs(x) for x in k)) > cutoff:
                continue
            idx = k + j
            if idx < tuple(-x for x in idx):
                continue  # conjugate partner filled by symmetry completion
            weight = math.exp(-decay * (sum(abs(x) for x in k) + sum(abs(x) for x in j)))
            value = weight * complex(rng.standard_normal(), rng.standard_normal())
            if idx == tuple(-x for x in idx):
                value = complex(value.real)
            entries.append(((k, j), value))
    field = field_from_modes(entries, box)
    if norm is not None:
        current = sobolev_norm(field, NormSpec(*norm_spec))
        if current > 0:
            field = (norm / current) * field
    return field


def random_phase_field(
    box: TruncationBox,
    rng: np.random.Generator,
    support: int,
    decay: float = 0.3,
    zero_mean: bool = True,
    norm: float | None = None,
    norm_spec: NormSpec | tuple[float, float] = (0.0, 0.0),
) -> FourierField:
    """Reality-symmetric random phase-only field."""
    entries = []
    zero_j = (0,) * box.d
    for k in iproduct(range(-support, support + 1), repeat=box.nu):
        l1 = sum(abs(x) for x in k)
        if l1 > support or (zero_mean and l1 == 0):
            continue
        if k < tuple(-x for x in k):
            continue
        weight = math.exp(-decay * l1)
        value = weight * complex(rng.standard_normal(), rng.standard_normal())
        if k == tuple(-x for x in k):
            value = complex(value.real)
        entries.append(((k, zero_j), value))
    field = field_from_modes(entries, box)
    if norm is not None:
        current = sobolev_norm(field, NormSpec(*norm_spec))
        if current > 0:
            field = (norm / current) * field
    return field
