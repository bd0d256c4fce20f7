"""Truncated Fourier series on T^nu x T^d with analytic-Sobolev norms.

Fields are finite trigonometric polynomials stored as dense complex
coefficient arrays over the minimal hyperrectangle that bounds their
support.  A field belongs to a :class:`TruncationBox` whose nominal
cutoff ``N`` defines the Galerkin scale ``<k,j> <= N`` and whose padded
storage ball ``<k,j> <= pad*N`` bounds every stored mode.  Products are
exact convolutions followed by truncation to the storage ball, so every
kept coefficient of a product is the exact coefficient of the product of
the two polynomials.

Conventions (fixed here once for the whole package):

* ``|k|`` and ``|j|`` inside exponential weights are l1 norms,
* ``|j|^2`` and ``|j|^4`` inside differential symbols are l2 norms,
* ``<k,j> = max(1, |k|_1, |j|_2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (
    AliasingError,
    BoxMismatchError,
    GridOverflowError,
    ModeOutsideBoxError,
    SmallDivisorError,
    SpatialMeanError,
)

EXP_GRID_CAP = 100.0
CONSISTENCY_TOL = 1e-9


class ModeIndex(NamedTuple):
    """Lattice index of one Fourier mode: phase part ``k``, spatial part ``j``."""

    k: tuple[int, ...]
    j: tuple[int, ...]


class NormSpec(NamedTuple):
    """Analytic-Sobolev norm parameters: width ``rho >= 0``, index ``s >= 0``."""

    rho: float
    s: float


def sobolev_threshold(nu: int, d: int) -> int:
    """Smallest Sobolev index granting the algebra property: floor((nu+d)/2) + 1."""
    return (nu + d) // 2 + 1


@dataclass(frozen=True)
class TruncationBox:
    """Truncation geometry: nominal cutoff and padded storage ball.

    Modes kept by the nominal box satisfy ``<k,j> <= cutoff``; the storage
    ball extends to ``pad * cutoff`` so products of nominal-box fields stay
    exact.
    """

    nu: int
    d: int
    cutoff: int
    pad: int = 2

    def __post_init__(self):
        if self.nu < 1 or self.d < 1:
            raise ValueError("nu and d must be positive integers")
        if self.cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        if self.pad < 1:
            raise ValueError("pad factor must be >= 1")

    @property
    def ndim(self) -> int:
        return self.nu + self.d

    @property
    def storage_cutoff(self) -> int:
        return self.pad * self.cutoff

    def with_pad(self, pad: int) -> "TruncationBox":
        return TruncationBox(self.nu, self.d, self.cutoff, pad)

    def with_cutoff(self, cutoff: int) -> "TruncationBox":
        return TruncationBox(self.nu, self.d, cutoff, self.pad)


@lru_cache(maxsize=256)
def _index_grids(extents: tuple[int, ...], nu: int):
    """Per-mode |k|_1, |j|_1, |j|_2^2 arrays for a coefficient rectangle."""
    ndim = len(extents)
    k_l1 = np.zeros((1,) * ndim)
    j_l1 = np.zeros((1,) * ndim)
    j_l2sq = np.zeros((1,) * ndim)
    for ax, ext in enumerate(extents):
        idx = np.abs(np.arange(-ext, ext + 1, dtype=float))
        shape = [1] * ndim
        shape[ax] = 2 * ext + 1
        idx = idx.reshape(shape)
        if ax < nu:
            k_l1 = k_l1 + idx
        else:
            j_l1 = j_l1 + idx
            j_l2sq = j_l2sq + idx**2
    for arr in (k_l1, j_l1, j_l2sq):
        arr.flags.writeable = False
    return k_l1, j_l1, j_l2sq


def _angle_bracket(extents: tuple[int, ...], nu: int) -> np.ndarray:
    k_l1, _, j_l2sq = _index_grids(extents, nu)
    return np.maximum(1.0, np.maximum(k_l1, np.sqrt(j_l2sq)))


def _ball_mask(extents: tuple[int, ...], nu: int, cutoff: int) -> np.ndarray:
    """Boolean mask of modes with <k,j> <= cutoff on the rectangle."""
    k_l1, _, j_l2sq = _index_grids(extents, nu)
    return (k_l1 <= cutoff) & (j_l2sq <= cutoff**2)


@dataclass(frozen=True)
class FourierField:
    """Immutable truncated Fourier series.

    ``coeffs`` is a complex array of odd lengths per axis; the entry at
    index ``(k_1+e_1, ..., j_d+e_{nu+d})`` is the coefficient of
    ``exp(i(k.phi + j.x))``.  ``hermitian`` records whether the field
    satisfies the reality symmetry ``c(-k,-j) = conj(c(k,j))``; internal
    complex probes (oracle columns) may switch it off.
    """

    box: TruncationBox
    coeffs: np.ndarray
    hermitian: bool = True

    def __post_init__(self):
        arr = self.coeffs
        if arr.ndim != self.box.ndim:
            raise ValueError("coefficient array rank does not match box")
        if any(n % 2 == 0 for n in arr.shape):
            raise ValueError("coefficient array lengths must be odd")
        arr.flags.writeable = False

    # -- geometry ----------------------------------------------------------

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple((n - 1) // 2 for n in self.coeffs.shape)

    @property
    def is_phase_only(self) -> bool:
        return all(e == 0 for e in self.extents[self.box.nu :])

    def coefficient(self, mode) -> complex:
        """Coefficient at ``mode = (k, j)``; zero outside the stored rectangle."""
        k, j = mode
        idx = tuple(k) + tuple(j)
        pos = []
        for v, e in zip(idx, self.extents):
            if abs(v) > e:
                return 0.0 + 0.0j
            pos.append(v + e)
        return complex(self.coeffs[tuple(pos)])

    def support_l1(self) -> tuple[int, int]:
        """Largest |k|_1 and |j|_1 carried by a nonzero coefficient."""
        nz = self.coeffs != 0
        if not nz.any():
            return 0, 0
        k_l1, j_l1, _ = _index_grids(self.extents, self.box.nu)
        k_full = np.broadcast_to(k_l1, self.coeffs.shape)
        j_full = np.broadcast_to(j_l1, self.coeffs.shape)
        return int(k_full[nz].max()), int(j_full[nz].max())

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "FourierField") -> "FourierField":
        _require_same_box(self, other)
        a, b = _aligned(self.coeffs, other.coeffs)
        return _build(self.box, a + b, self.hermitian and other.hermitian)

    def __sub__(self, other: "FourierField") -> "FourierField":
        _require_same_box(self, other)
        a, b = _aligned(self.coeffs, other.coeffs)
        return _build(self.box, a - b, self.hermitian and other.hermitian)

    def __neg__(self) -> "FourierField":
        return _build(self.box, -self.coeffs, self.hermitian)

    def __rmul__(self, scalar) -> "FourierField":
        herm = self.hermitian and (np.imag(scalar) == 0)
        return _build(self.box, complex(scalar) * self.coeffs, bool(herm))

    __mul__ = __rmul__

    def rebox(self, box: TruncationBox) -> "FourierField":
        """Reinterpret the field on another box with the same (nu, d)."""
        if (box.nu, box.d) != (self.box.nu, self.box.d):
            raise BoxMismatchError("cannot rebox across different torus dimensions")
        arr = _mask_to_storage(self.coeffs, box)
        return _build(box, arr, self.hermitian)


def _require_same_box(u: FourierField, w: FourierField):
    if u.box != w.box:
        raise BoxMismatchError(f"box mismatch: {u.box} vs {w.box}")


def _aligned(a: np.ndarray, b: np.ndarray):
    """Zero-pad both rectangles to their union."""
    if a.shape == b.shape:
        return a, b
    shape = tuple(max(m, n) for m, n in zip(a.shape, b.shape))
    return _embed(a, shape), _embed(b, shape)


def _embed(arr: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    if arr.shape == shape:
        return arr
    out = np.zeros(shape, dtype=complex)
    sl = tuple(
        slice((n - m) // 2, (n - m) // 2 + m) for m, n in zip(arr.shape, shape)
    )
    out[sl] = arr
    return out


def _clip_to_support(arr: np.ndarray) -> np.ndarray:
    """Shrink the rectangle to the centred bounding box of nonzero entries."""
    extents = []
    for ax in range(arr.ndim):
        other = tuple(i for i in range(arr.ndim) if i != ax)
        profile = np.abs(arr).max(axis=other) if other else np.abs(arr)
        nz = np.nonzero(profile)[0]
        e = (arr.shape[ax] - 1) // 2
        if nz.size == 0:
            extents.append(0)
        else:
            extents.append(max(abs(int(nz[0]) - e), abs(int(nz[-1]) - e)))
    shape = tuple(2 * e + 1 for e in extents)
    if shape == arr.shape:
        return arr
    sl = tuple(
        slice((n - m) // 2, (n - m) // 2 + m) for m, n in zip(shape, arr.shape)
    )
    return np.ascontiguousarray(arr[sl])


def _mask_to_storage(arr: np.ndarray, box: TruncationBox) -> np.ndarray:
    """Zero modes beyond the storage ball and clip axes to its bounding rectangle."""
    cut = box.storage_cutoff
    e = tuple((n - 1) // 2 for n in arr.shape)
    if any(ext > cut for ext in e):
        shape = tuple(2 * min(ext, cut) + 1 for ext in e)
        sl = tuple(
            slice((n - m) // 2, (n - m) // 2 + m) for m, n in zip(shape, arr.shape)
        )
        arr = arr[sl]
    extents = tuple((n - 1) // 2 for n in arr.shape)
    mask = _ball_mask(extents, box.nu, cut)
    if not mask.all():
        arr = np.where(mask, arr, 0.0)
    return arr


def _build(box: TruncationBox, arr: np.ndarray, hermitian: bool) -> FourierField:
    arr = _mask_to_storage(np.asarray(arr, dtype=complex), box)
    return FourierField(box, _clip_to_support(arr), hermitian)


def _reverse_conj(arr: np.ndarray) -> np.ndarray:
    return np.conj(arr[tuple(slice(None, None, -1) for _ in range(arr.ndim))])


def _hermitianize(arr: np.ndarray) -> np.ndarray:
    return 0.5 * (arr + _reverse_conj(arr))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def zero_field(box: TruncationBox) -> FourierField:
    return FourierField(box, np.zeros((1,) * box.ndim, dtype=complex))


def constant_field(box: TruncationBox, value: float) -> FourierField:
    arr = np.full((1,) * box.ndim, complex(value))
    return FourierField(box, arr, hermitian=np.imag(value) == 0)


def field_from_modes(
    entries: Iterable[tuple], box: TruncationBox
) -> FourierField:
    """Build a field from ``(mode, coefficient)`` pairs.

    Duplicate modes are summed and missing conjugate partners are filled
    in so the result satisfies the reality symmetry.  Inconsistent
    explicit partners or a non-real (0,0) coefficient are rejected.
    """
    acc: dict[tuple, complex] = {}
    cut = box.storage_cutoff
    for mode, value in entries:
        k, j = mode
        k = tuple(int(x) for x in k)
        j = tuple(int(x) for x in j)
        if len(k) != box.nu or len(j) != box.d:
            raise ValueError(f"mode {(k, j)} has wrong arity for box {box}")
        bracket = max(1.0, sum(abs(x) for x in k), float(np.hypot.reduce([float(x) for x in j]) if j else 0.0))
        if bracket > cut:
            raise ModeOutsideBoxError((k, j), cut)
        acc[k + j] = acc.get(k + j, 0.0 + 0.0j) + complex(value)

    full = dict(acc)
    for idx, value in acc.items():
        partner = tuple(-x for x in idx)
        if partner == idx:
            if abs(value.imag) > CONSISTENCY_TOL * max(1.0, abs(value)):
                raise ValueError(f"self-conjugate mode {idx} must be real, got {value}")
            full[idx] = complex(value.real)
        elif partner not in acc:
            full[partner] = np.conj(value)
        else:
            if abs(acc[partner] - np.conj(value)) > CONSISTENCY_TOL * max(
                1.0, abs(value)
            ):
                raise ValueError(
                    f"conjugate pair {idx}/{partner} inconsistent: "
                    f"{value} vs {acc[partner]}"
                )

    extents = [0] * box.ndim
    for idx in full:
        for ax, v in enumerate(idx):
            extents[ax] = max(extents[ax], abs(v))
    arr = np.zeros(tuple(2 * e + 1 for e in extents), dtype=complex)
    for idx, value in full.items():
        arr[tuple(v + e for v, e in zip(idx, extents))] = value
    return _build(box, arr, hermitian=True)


def trig_field(box: TruncationBox, kind: str, k, j, amplitude: float = 1.0) -> FourierField:
    """Real cosine or sine of ``k.phi + j.x`` scaled by ``amplitude``."""
    k = tuple(int(x) for x in k)
    j = tuple(int(x) for x in j)
    if kind == "cos":
        c = 0.5 * amplitude
    elif kind == "sin":
        c = -0.5j * amplitude
    else:
        raise ValueError("kind must be 'cos' or 'sin'")
    return field_from_modes([((k, j), c)], box)


def unit_mode_field(box: TruncationBox, mode) -> FourierField:
    """Single complex exponential (not reality-symmetric); oracle probe."""
    k, j = mode
    idx = tuple(int(x) for x in k) + tuple(int(x) for x in j)
    bracket = max(
        1.0,
        sum(abs(x) for x in idx[: box.nu]),
        float(np.sqrt(sum(float(x) ** 2 for x in idx[box.nu :]))),
    )
    if bracket > box.storage_cutoff:
        raise ModeOutsideBoxError(mode, box.storage_cutoff)
    extents = tuple(abs(v) for v in idx)
    arr = np.zeros(tuple(2 * e + 1 for e in extents), dtype=complex)
    arr[tuple(v + e for v, e in zip(idx, extents))] = 1.0
    return FourierField(box, arr, hermitian=False)


# ---------------------------------------------------------------------------
# products
# ---------------------------------------------------------------------------


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact full linear convolution of centred coefficient arrays.

    Axes on which either operand is a singleton reduce to broadcasting, so
    phase-only multipliers never mix spatial planes.
    """
    fft_axes = [i for i in range(a.ndim) if a.shape[i] > 1 and b.shape[i] > 1]
    if not fft_axes:
        return a * b
    sizes = [a.shape[i] + b.shape[i] - 1 for i in fft_axes]
    fa = np.fft.fftn(a, s=sizes, axes=fft_axes)
    fb = np.fft.fftn(b, s=sizes, axes=fft_axes)
    out = np.fft.ifftn(fa * fb, axes=fft_axes)
    # np.fft zero-pads at the tail; a centred (na+nb-1) output needs no roll
    # because index arithmetic (ka+ea)+(kb+eb) lands at k+(ea+eb) directly.
    return out


def multiply(u: FourierField, w: FourierField) -> FourierField:
    """Product of two fields: exact convolution, truncated to the storage ball."""
    _require_same_box(u, w)
    out = _convolve(u.coeffs, w.coeffs)
    out = _mask_to_storage(out, u.box)
    herm = u.hermitian and w.hermitian
    if herm:
        out = _hermitianize(out)
    return FourierField(u.box, _clip_to_support(out), herm)


# ---------------------------------------------------------------------------
# norms and projections
# ---------------------------------------------------------------------------


def sobolev_norm(u: FourierField, spec: NormSpec | tuple[float, float]) -> float:
    """Weighted l2 coefficient norm with weight exp(2 rho(|k|+|j|)) <k,j>^(2s)."""
    rho, s = spec
    if rho < 0 or s < 0:
        raise ValueError("norm parameters must be nonnegative")
    k_l1, j_l1, _ = _index_grids(u.extents, u.box.nu)
    weight = np.exp(2.0 * rho * (k_l1 + j_l1)) * _angle_bracket(u.extents, u.box.nu) ** (
        2.0 * s
    )
    return float(np.sqrt(np.sum(np.abs(u.coeffs) ** 2 * weight)))


def project_spatial(u: FourierField, part: str) -> FourierField:
    """Spatial-average projection: ``mean`` keeps j = 0 modes, ``complement`` drops them."""
    if part not in ("mean", "complement"):
        raise ValueError("part must be 'mean' or 'complement'")
    nu = u.box.nu
    sl = tuple([slice(None)] * nu + [slice(e, e + 1) for e in u.extents[nu:]])
    if part == "mean":
        arr = np.zeros_like(u.coeffs)
        arr[sl] = u.coeffs[sl]
    else:
        arr = u.coeffs.copy()
        arr[sl] = 0.0
    return _build(u.box, arr, u.hermitian)


def spatial_mean_norm(u: FourierField) -> float:
    """l2 mass of the j = 0 modes; zero for fields in the zero-mean subspace."""
    nu = u.box.nu
    sl = tuple([slice(None)] * nu + [slice(e, e + 1) for e in u.extents[nu:]])
    return float(np.sqrt(np.sum(np.abs(u.coeffs[sl]) ** 2)))


def galerkin_project(u: FourierField, cutoff: int, part: str) -> FourierField:
    """Scale projection: ``low`` keeps <k,j> <= cutoff, ``tail`` keeps the rest."""
    if part not in ("low", "tail"):
        raise ValueError("part must be 'low' or 'tail'")
    mask = _ball_mask(u.extents, u.box.nu, cutoff)
    arr = np.where(mask if part == "low" else ~mask, u.coeffs, 0.0)
    return _build(u.box, arr, u.hermitian)


# ---------------------------------------------------------------------------
# differential operators
# ---------------------------------------------------------------------------


def _omega_array(omega, nu: int) -> np.ndarray:
    values = np.asarray(getattr(omega, "values", omega), dtype=float)
    if values.shape != (nu,):
        raise ValueError(f"frequency vector must have length {nu}")
    return values


def _phase_dot(u: FourierField, omega: np.ndarray) -> np.ndarray:
    """Per-mode omega.k over the field's rectangle."""
    ndim = u.coeffs.ndim
    dot = np.zeros((1,) * ndim)
    for ax in range(u.box.nu):
        e = u.extents[ax]
        shape = [1] * ndim
        shape[ax] = 2 * e + 1
        dot = dot + omega[ax] * np.arange(-e, e + 1, dtype=float).reshape(shape)
    return dot


def phase_derivative(u: FourierField, omega) -> FourierField:
    """Directional phase derivative: coefficient map c -> i(omega.k) c."""
    om = _omega_array(omega, u.box.nu)
    return _build(u.box, 1j * _phase_dot(u, om) * u.coeffs, u.hermitian)


def phase_antiderivative(
    u: FourierField, omega, divisor_floor: float | None = None
) -> FourierField:
    """Zero-average primitive along the flow: c -> c / (i omega.k), k = 0 plane dropped.

    Raises :class:`SmallDivisorError` when a nonzero stored coefficient sits
    at a resonant ``k`` with ``|omega.k|`` below the floor (default
    ``1e-14 * max|omega|``).
    """
    om = _omega_array(omega, u.box.nu)
    floor = divisor_floor if divisor_floor is not None else 1e-14 * np.abs(om).max()
    dot = _phase_dot(u, om)
    nonres = np.abs(dot) > 0
    k_l1 = _index_grids(u.extents, u.box.nu)[0]
    k_zero = k_l1 == 0

    bad = (~k_zero) & (np.abs(dot) < floor) & (np.abs(u.coeffs) > 0)
    if bad.any():
        flat = np.argmax(bad)
        idx = np.unravel_index(flat, u.coeffs.shape)
        k = tuple(int(i - e) for i, e in zip(idx[: u.box.nu], u.extents))
        raise SmallDivisorError(k, float(np.abs(dot[idx])), floor)

    out = np.zeros_like(u.coeffs)
    np.divide(u.coeffs, 1j * dot, out=out, where=nonres)
    out = np.where(k_zero, 0.0, out)
    return _build(u.box, out, u.hermitian)


def bilaplacian(u: FourierField) -> FourierField:
    """Fourth-order spatial operator: coefficient map c -> |j|_2^4 c."""
    _, _, j_l2sq = _index_grids(u.extents, u.box.nu)
    return _build(u.box, (j_l2sq**2) * u.coeffs, u.hermitian)


# ---------------------------------------------------------------------------
# grid transforms
# ---------------------------------------------------------------------------


def synthesize_on_grid(u: FourierField, grid_sizes: Sequence[int]) -> np.ndarray:
    """Real point values on the uniform grid ``x_t = 2 pi t / G`` per axis."""
    sizes = tuple(int(g) for g in grid_sizes)
    if len(sizes) != u.box.ndim:
        raise ValueError("grid rank does not match field rank")
    for g, e in zip(sizes, u.extents):
        if g < 2 * e + 1:
            raise AliasingError(
                f"grid size {g} cannot resolve modes up to {e} (needs >= {2 * e + 1})"
            )
    emb = np.zeros(sizes, dtype=complex)
    idx = np.ix_(*[np.arange(-e, e + 1) % g for e, g in zip(u.extents, sizes)])
    emb[idx] = u.coeffs
    values = np.fft.ifftn(emb) * np.prod(sizes)
    return values.real


def _analyze_from_grid(
    values: np.ndarray, extents: tuple[int, ...]
) -> np.ndarray:
    """Inverse of :func:`synthesize_on_grid` restricted to the given rectangle."""
    spec = np.fft.fftn(values) / np.prod(values.shape)
    idx = np.ix_(*[np.arange(-e, e + 1) % g for e, g in zip(extents, values.shape)])
    return spec[idx]


def _pow2_at_least(n: int) -> int:
    g = 1
    while g < n:
        g *= 2
    return g


def expm1_phase_field(
    w: FourierField, oversample: int = 4, cap: float = EXP_GRID_CAP
) -> FourierField:
    """Deviation exp(w) - 1 of a real phase-only field, to full relative accuracy.

    Synthesises ``w`` on an oversampled phase grid, applies ``expm1``
    pointwise and transforms back.  Keeping the deviation (rather than
    exp(w) itself) preserves the quadratic smallness of ``exp(w) - 1``
    down to machine precision, which the conjugation diagnostics rely on.
    """
    if not w.is_phase_only:
        raise ValueError("exponent must be phase-only")
    if not w.hermitian:
        raise ValueError("exponent must be a real field")
    s_w, _ = w.support_l1()
    if s_w == 0:
        # constant exponent: exp(c) - 1 exactly
        value = np.expm1(w.coeffs.reshape(-1)[0].real)
        return constant_field(w.box, value)
    out_l1 = min(w.box.storage_cutoff, 6 * s_w + 8)
    nu = w.box.nu
    out_ext = tuple(min(out_l1, w.box.storage_cutoff) for _ in range(nu)) + (0,) * w.box.d
    sizes = tuple(
        _pow2_at_least(max(oversample * (2 * e + 1), 2 * out_l1 + 2))
        for e in w.extents[:nu]
    ) + (1,) * w.box.d
    grid = synthesize_on_grid(w, sizes)
    peak = float(np.abs(grid).max())
    if peak > cap:
        raise GridOverflowError(
            f"exponent reaches {peak:.3g} on the grid, above the cap {cap:.3g}"
        )
    dev = _analyze_from_grid(np.expm1(grid), out_ext)
    dev = _hermitianize(dev)
    # keep only the l1 ball where the tail is meaningful
    k_l1 = _index_grids(out_ext, nu)[0]
    dev = np.where(k_l1 <= out_l1, dev, 0.0)
    return _build(w.box, dev, hermitian=True)


def exp_phase_field(
    w: FourierField, oversample: int = 4, cap: float = EXP_GRID_CAP
) -> FourierField:
    """exp(w) for a real phase-only field, via the oversampled grid."""
    return constant_field(w.box, 1.0) + expm1_phase_field(w, oversample, cap)


# ---------------------------------------------------------------------------
# coefficient dumps
# ---------------------------------------------------------------------------


def coefficient_dump(u: FourierField) -> str:
    """One line per nonzero mode, ``k_1..k_nu j_1..j_d re im``, lexicographic."""
    lines = [f"# nu={u.box.nu} d={u.box.d} cutoff={u.box.cutoff} pad={u.box.pad}"]
    nz = np.argwhere(u.coeffs != 0)
    modes = []
    for pos in nz:
        idx = tuple(int(p - e) for p, e in zip(pos, u.extents))
        modes.append(idx)
    for idx in sorted(modes):
        c = u.coeffs[tuple(v + e for v, e in zip(idx, u.extents))]
        parts = [str(v) for v in idx] + [repr(float(c.real)), repr(float(c.imag))]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def field_from_dump(text: str) -> FourierField:
    """Parse the :func:`coefficient_dump` format back into a field."""
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("dump must start with a '# nu=.. d=.. cutoff=..' header")
    header = dict(
        item.split("=") for item in lines[0].lstrip("#").split() if "=" in item
    )
    nu = int(header["nu"])
    d = int(header["d"])
    cutoff = int(header["cutoff"])
    pad = int(header.get("pad", 2))
    box = TruncationBox(nu, d, cutoff, pad)
    entries = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != nu + d + 2:
            raise ValueError(f"bad dump line: {ln!r}")
        k = tuple(int(x) for x in parts[:nu])
        j = tuple(int(x) for x in parts[nu : nu + d])
        value = float(parts[-2]) + 1j * float(parts[-1])
        entries.append(((k, j), value))
    return field_from_modes(entries, box)


def require_zero_spatial_mean(u: FourierField, tol: float = 1e-12, what: str = "field"):
    """Raise :class:`SpatialMeanError` unless the j = 0 modes are (numerically) zero."""
    mean = spatial_mean_norm(u)
    scale = float(np.abs(u.coeffs).max()) if u.coeffs.size else 0.0
    if mean > tol * max(1.0, scale):
        raise SpatialMeanError(f"{what} must have zero spatial mean (|mean| = {mean:.3e})")
