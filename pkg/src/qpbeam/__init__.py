"""Spectral Galerkin solver for quasi-periodic response solutions of damped beams."""

__version__ = "0.1.0"

from .fourier import (  # noqa: F401
    FourierField,
    ModeIndex,
    NormSpec,
    TruncationBox,
    bilaplacian,
    coefficient_dump,
    exp_phase_field,
    field_from_dump,
    field_from_modes,
    galerkin_project,
    multiply,
    phase_antiderivative,
    phase_derivative,
    project_spatial,
    sobolev_norm,
    sobolev_threshold,
    synthesize_on_grid,
)
from .frequency import (  # noqa: F401
    FrequencyVector,
    certify_nonresonance,
    golden_frequency,
    liouvillean_frequency,
    small_divisor,
)
from .iteration import RunReport, Schedule, build_schedule, run  # noqa: F401
