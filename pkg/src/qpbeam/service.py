"""FastAPI service wrapping the solver; the CLI is a thin client of this app."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__
from .config import REFERENCE_CONFIG
from .dispatch import dispatch
from .errors import ConfigError, NonContractionError, SmallDivisorError
from .schemas import (
    CheckSummary,
    FrequencyRequest,
    FrequencyResponse,
    HealthResponse,
    LevelSummary,
    SolveRequest,
    SolveResponse,
    SpectrumRequest,
    SpectrumResponse,
    VerifyRequest,
    VerifyResponse,
)

app = FastAPI(
    title="qpbeam",
    description=(
        "Spectral Galerkin construction of quasi-periodic response solutions "
        "for beam equations with nonlocal nonlinear damping"
    ),
    version=__version__,
)


def _dispatch_or_422(command: str, config: str, **overrides):
    try:
        return dispatch(command, config, **overrides)
    except ConfigError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except (NonContractionError, SmallDivisorError, ValueError) as exc:
        raise HTTPException(status_code=409, detail=str(exc)) from exc


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/solve", response_model=SolveResponse)
def solve(request: SolveRequest) -> SolveResponse:
    result = _dispatch_or_422(
        "solve", request.config, tol=request.tol, levels=request.levels
    )
    s = result.summary
    return SolveResponse(
        verdict=s["verdict"],
        failure=s.get("failure", ""),
        levels=[LevelSummary(**lev) for lev in s["levels"]],
        theta0=s["theta0"],
        theta1=s["theta1"],
        averaged_residual=s["averaged_residual"],
        u0_bound_ratio=s["u0_bound_ratio"],
        final_residual_max=s["final_residual_max"],
        final_residual_rms=s["final_residual_rms"],
        solution_norm=s["solution_norm"],
        artifacts=result.artifacts,
    )


@app.post("/check-frequency", response_model=FrequencyResponse)
def check_frequency(request: FrequencyRequest) -> FrequencyResponse:
    result = _dispatch_or_422("check-frequency", request.config)
    s = result.summary
    return FrequencyResponse(
        valid=s["valid"],
        gamma=s["gamma"],
        worst_ratio=s["worst_ratio"],
        worst_k=s["worst_k"],
        worst_divisor=s["worst_divisor"],
        minimal_gamma=s["minimal_gamma"],
        artifacts=result.artifacts,
    )


@app.post("/spectrum", response_model=SpectrumResponse)
def spectrum(request: SpectrumRequest) -> SpectrumResponse:
    result = _dispatch_or_422("spectrum", request.config)
    s = result.summary
    return SpectrumResponse(
        min_abs_symbol=s["min_abs_symbol"],
        uniform_bound_ok=s["uniform_bound_ok"],
        violations=s["violations"],
        checked=s["checked"],
        case_margins=s["case_margins"],
        artifacts=result.artifacts,
    )


@app.post("/verify", response_model=VerifyResponse)
def verify(request: VerifyRequest) -> VerifyResponse:
    config = request.config if request.config else REFERENCE_CONFIG
    result = _dispatch_or_422("verify", config)
    s = result.summary
    return VerifyResponse(
        ok=s["ok"],
        checks=[CheckSummary(**c) for c in s["checks"]],
        log=result.log,
    )
