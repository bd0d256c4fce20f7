"""Pydantic request/response models of the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class SolveRequest(BaseModel):
    config: str = Field(description="run configuration in the flat key = value format")
    tol: Optional[float] = Field(default=None, description="fixed-point tolerance override")
    levels: Optional[int] = Field(default=None, description="level count override")


class LevelSummary(BaseModel):
    level: int
    cutoff: int
    rho: float
    increment: float
    residual: float
    contraction: float
    prior_ok: bool
    shape_ok: Optional[bool] = None


class SolveResponse(BaseModel):
    verdict: str
    failure: str = ""
    levels: list[LevelSummary]
    theta0: float
    theta1: float
    averaged_residual: float
    u0_bound_ratio: float
    final_residual_max: float
    final_residual_rms: float
    solution_norm: float
    artifacts: dict[str, str]


class FrequencyRequest(BaseModel):
    config: str


class FrequencyResponse(BaseModel):
    valid: bool
    gamma: float
    worst_ratio: float
    worst_k: list[int]
    worst_divisor: float
    minimal_gamma: float
    artifacts: dict[str, str]


class SpectrumRequest(BaseModel):
    config: str


class SpectrumResponse(BaseModel):
    min_abs_symbol: float
    uniform_bound_ok: bool
    violations: int
    checked: int
    case_margins: dict[str, float]
    artifacts: dict[str, str]


class VerifyRequest(BaseModel):
    config: Optional[str] = Field(
        default=None, description="optional configuration; defaults to the reference setup"
    )


class CheckSummary(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: float


class VerifyResponse(BaseModel):
    ok: bool
    checks: list[CheckSummary]
    log: list[str]


class HealthResponse(BaseModel):
    status: str
    version: str
