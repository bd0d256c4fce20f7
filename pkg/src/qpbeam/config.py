"""Flat key-value run configuration: parsing, validation, field construction."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from .errors import ConfigError
from .fourier import (
    FourierField,
    TruncationBox,
    field_from_dump,
    field_from_modes,
    sobolev_threshold,
)
from .frequency import FrequencyVector, golden_frequency, liouvillean_frequency

DEFAULT_TAU = 2.0


@dataclass(frozen=True)
class SolverParams:
    """Validated scalar parameters of one run."""

    nu: int = 2
    d: int = 1
    s: float = 2.0
    rho0: float = 0.5
    M: int = 3
    gamma: float = 2.0
    delta: float = 0.05
    epsilon: float = 0.0375
    N0: int = 8
    levels: int = 4
    tau: float = DEFAULT_TAU
    tol: float = 1e-10
    pad: int = 2
    method: str = "conjugation"
    grid: int = 64
    plot_grid: int = 16
    k_max: int = 64
    j_floor: int = 4
    sigma_max: float = 6.0
    j_scan: float = 8.0

    @property
    def final_cutoff(self) -> int:
        return self.N0 * 2 ** (self.levels - 1)

    def box(self) -> TruncationBox:
        return TruncationBox(self.nu, self.d, self.final_cutoff, self.pad)


@dataclass(frozen=True)
class RunConfig:
    """Parsed configuration: parameters, frequency, and a forcing recipe."""

    params: SolverParams
    omega: FrequencyVector
    forcing_spec: str
    raw: dict = dataclass_field(default_factory=dict)

    def forcing(self) -> FourierField:
        return build_forcing(self.forcing_spec, self.params.box())


TAIL_AMPLITUDE = 0.05
TAIL_DECAY = 0.65


def default_forcing(box: TruncationBox) -> FourierField:
    """Two oscillator terms plus a deterministic analytic tail filling the box.

    The head is cos(phi_1) cos(x_1) + 0.5 cos(phi_2) sin(x_1); the tail puts
    ``0.05 exp(-0.65 (|k|_1 + 1))`` on every mode with |j| = 1 inside the
    nominal ball.  The tail keeps the level increments of the iteration
    above the stopping floor (a band-limited forcing is solved exactly by
    the coarsest level), while the decay rate beats the default width
    rho0 = 0.5 so the forcing stays analytic there.  No phase-only
    component: the spatial average of the forcing vanishes identically.
    """
    if box.nu < 2:
        raise ConfigError("default forcing needs nu >= 2")
    import numpy as np

    from .fourier import FourierField, _build, _index_grids

    cutoff = box.cutoff
    extents = (cutoff,) * box.nu + (1,) + (0,) * (box.d - 1)
    shape = tuple(2 * e + 1 for e in extents)
    k_l1, j_l1, j_l2sq = _index_grids(extents, box.nu)
    tail = TAIL_AMPLITUDE * np.exp(-TAIL_DECAY * (k_l1 + j_l1))
    ball = (k_l1 <= cutoff) & (j_l2sq == 1.0)
    arr = np.where(ball, tail, 0.0).astype(complex)
    arr = np.broadcast_to(arr, shape).copy()

    def put(k, j, value):
        idx = tuple(x + e for x, e in zip(k + j, extents))
        arr[idx] += value

    e1 = (1,) + (0,) * (box.nu - 1)
    e2 = (0, 1) + (0,) * (box.nu - 2)
    jx = (1,) + (0,) * (box.d - 1)
    jx_minus = tuple(-x for x in jx)
    # product-to-sum coefficients of the two head terms; the sine factor
    # flips sign with j, not with k
    for sign in (1, -1):
        k1 = tuple(sign * x for x in e1)
        k2 = tuple(sign * x for x in e2)
        put(k1, jx, 0.25)
        put(k1, jx_minus, 0.25)
        put(k2, jx, -0.125j)
        put(k2, jx_minus, 0.125j)
    return _build(box, arr, hermitian=True)


def build_forcing(spec: str, box: TruncationBox) -> FourierField:
    """Forcing from its config spec: default, file:PATH, or inline mode list."""
    spec = spec.strip()
    if spec == "default":
        g = default_forcing(box)
    elif spec.startswith("file:"):
        path = Path(spec[5:].strip())
        g = field_from_dump(path.read_text()).rebox(box)
    elif spec.startswith("inline:"):
        entries = []
        for chunk in spec[7:].split(";"):
            parts = chunk.split()
            if not parts:
                continue
            if len(parts) != box.nu + box.d + 2:
                raise ConfigError(
                    f"inline forcing entry needs nu + d + 2 numbers, got {chunk!r}"
                )
            k = tuple(int(x) for x in parts[: box.nu])
            j = tuple(int(x) for x in parts[box.nu : box.nu + box.d])
            value = float(parts[-2]) + 1j * float(parts[-1])
            entries.append(((k, j), value))
        g = field_from_modes(entries, box)
    else:
        raise ConfigError(f"unknown forcing spec {spec!r}")
    zero_mode = ((0,) * box.nu, (0,) * box.d)
    if abs(g.coefficient(zero_mode)) > 1e-14:
        raise ConfigError("forcing must have zero average over the full torus")
    return g


def build_frequency(spec: str, nu: int) -> FrequencyVector:
    spec = spec.strip()
    if spec == "golden":
        if nu != 2:
            raise ConfigError("golden frequency requires nu = 2")
        return golden_frequency()
    if spec.startswith("liouvillean:"):
        depth = int(spec.split(":", 1)[1])
        if nu != 2:
            raise ConfigError("liouvillean frequency requires nu = 2")
        omega, _ = liouvillean_frequency(depth)
        return omega
    parts = spec.split()
    if len(parts) != nu:
        raise ConfigError(f"frequency needs {nu} components, got {spec!r}")
    try:
        return FrequencyVector(tuple(float(x) for x in parts))
    except ValueError as exc:
        raise ConfigError(f"frequency magnitude precondition failed: {exc}") from exc


_INT_KEYS = {"nu", "d", "M", "N0", "levels", "pad", "grid", "plot_grid", "k_max", "j_floor"}
_FLOAT_KEYS = {"s", "rho0", "gamma", "delta", "tau", "tol", "sigma_max", "j_scan"}


def parse_config(text: str) -> RunConfig:
    """Parse and validate the flat ``key = value`` configuration format.

    Every violated precondition is reported by name; the first failure
    raises :class:`ConfigError`.
    """
    values: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()

    kwargs = {}
    for key, raw in values.items():
        if key in _INT_KEYS:
            kwargs[key] = int(raw)
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(raw)
        elif key == "epsilon":
            continue
        elif key == "method":
            if raw not in ("conjugation", "direct"):
                raise ConfigError(f"method must be conjugation or direct, got {raw!r}")
            kwargs[key] = raw
        elif key in ("frequency", "forcing"):
            continue
        else:
            raise ConfigError(f"unknown configuration key {key!r}")

    base = SolverParams(**kwargs)
    eps_raw = values.get("epsilon", "mid")
    if eps_raw == "mid":
        epsilon = 0.75 * base.delta
    else:
        epsilon = float(eps_raw)
    params = SolverParams(**{**kwargs, "epsilon": epsilon})

    _validate_params(params)
    omega = build_frequency(values.get("frequency", "golden"), params.nu)
    forcing_spec = values.get("forcing", "default")
    config = RunConfig(params=params, omega=omega, forcing_spec=forcing_spec, raw=values)
    config.forcing()  # validate the forcing spec eagerly
    return config


def _validate_params(p: SolverParams):
    checks = [
        (p.nu >= 2, "dimension precondition: nu must be >= 2"),
        (p.d >= 1, "dimension precondition: d must be >= 1"),
        (p.M >= 3, "strip-shrink precondition: M must be >= 3"),
        (p.gamma > 1, "non-resonance precondition: gamma must exceed 1"),
        (0 < p.delta < 1, "window precondition: delta must lie in (0, 1)"),
        (
            p.delta / 2 <= p.epsilon <= p.delta,
            "window precondition: epsilon must lie in [delta/2, delta]",
        ),
        (p.rho0 > 0, "analyticity precondition: rho0 must be positive"),
        (
            p.s >= sobolev_threshold(p.nu, p.d),
            f"regularity precondition: s must be >= {sobolev_threshold(p.nu, p.d)}",
        ),
        (p.N0 >= 1, "schedule precondition: N0 must be >= 1"),
        (p.levels >= 1, "schedule precondition: levels must be >= 1"),
        (p.pad >= 2, "storage precondition: pad must be >= 2"),
        (
            p.delta**0.25 * p.gamma**2 <= p.tau,
            f"smallness precondition: delta^(1/4) gamma^2 = "
            f"{p.delta**0.25 * p.gamma**2:.4g} exceeds tau = {p.tau}",
        ),
    ]
    for ok, message in checks:
        if not ok:
            raise ConfigError(message)


REFERENCE_CONFIG = """\
# reference run
nu = 2
d = 1
s = 2
rho0 = 0.5
M = 3
gamma = 2.0
delta = 0.05
epsilon = mid
N0 = 8
levels = 4
tau = 2.0
frequency = golden
forcing = default
"""
