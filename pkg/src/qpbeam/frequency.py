"""Frequency vectors, small divisors, non-resonance certificates, Liouvillean examples."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np


@dataclass(frozen=True)
class FrequencyVector:
    """Forcing frequency omega with the normalisation |omega|_2 <= 1."""

    omega: tuple[float, ...]

    def __post_init__(self):
        norm = math.sqrt(sum(w * w for w in self.omega))
        if norm > 1.0 + 1e-12:
            raise ValueError(f"|omega| = {norm:.6f} exceeds 1")
        if len(self.omega) < 1:
            raise ValueError("omega must have at least one component")

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.omega, dtype=float)

    @property
    def nu(self) -> int:
        return len(self.omega)

    @staticmethod
    def normalized(components) -> "FrequencyVector":
        arr = np.asarray(components, dtype=float)
        return FrequencyVector(tuple(arr / np.linalg.norm(arr)))


def golden_frequency() -> FrequencyVector:
    """Normalised (1, (sqrt(5)-1)/2), the classical Diophantine test vector."""
    return FrequencyVector.normalized([1.0, (math.sqrt(5.0) - 1.0) / 2.0])


def small_divisor(omega: FrequencyVector, k) -> float:
    """|omega.k| for a nonzero integer vector k."""
    kk = np.asarray(k, dtype=float)
    if kk.shape != (omega.nu,):
        raise ValueError("k must match the frequency dimension")
    if not np.any(kk):
        raise ValueError("k must be nonzero")
    return float(abs(np.dot(omega.values, kk)))


def _l1_ball(nu: int, radius: int):
    """Deterministic enumeration of nonzero integer vectors with |k|_1 <= radius."""
    for k in product(range(-radius, radius + 1), repeat=nu):
        if sum(abs(x) for x in k) == 0:
            continue
        if sum(abs(x) for x in k) <= radius:
            yield k


@dataclass(frozen=True)
class NonresonanceCertificate:
    """Exhaustive scan record for the exponential non-resonance condition.

    ``ratio(k) = 1 / (|omega.k| gamma exp((rho/M)|k|_1))``; the condition
    holds on the scanned range iff ``worst_ratio <= 1``.
    """

    gamma: float
    M: int
    rho: float
    k_max: int
    worst_ratio: float
    worst_k: tuple[int, ...]
    worst_divisor: float

    @property
    def valid(self) -> bool:
        return self.worst_ratio <= 1.0

    def csv_row(self) -> str:
        cols = [
            repr(self.gamma),
            str(self.M),
            repr(self.rho),
            str(self.k_max),
            repr(self.worst_ratio),
            " ".join(str(x) for x in self.worst_k),
            repr(self.worst_divisor),
            "1" if self.valid else "0",
        ]
        return ",".join(cols)

    CSV_HEADER = "gamma,M,rho,k_max,worst_ratio,worst_k,worst_divisor,valid"


def certify_nonresonance(
    omega: FrequencyVector, gamma: float, M: int, rho: float, k_max: int
) -> NonresonanceCertificate:
    """Scan all 0 < |k|_1 <= k_max and record the worst non-resonance ratio."""
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    if M < 3:
        raise ValueError("M must be >= 3")
    if rho <= 0:
        raise ValueError("rho must be positive")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    om = omega.values
    worst_ratio = 0.0
    worst_k = (0,) * omega.nu
    worst_div = math.inf
    for k in _l1_ball(omega.nu, k_max):
        div = abs(float(np.dot(om, k)))
        l1 = sum(abs(x) for x in k)
        if div == 0.0:
            ratio = math.inf
        else:
            ratio = 1.0 / (div * gamma * math.exp(rho / M * l1))
        if ratio > worst_ratio:
            worst_ratio, worst_k, worst_div = ratio, k, div
    return NonresonanceCertificate(gamma, M, rho, k_max, worst_ratio, worst_k, worst_div)


def minimal_gamma(omega: FrequencyVector, M: int, rho: float, k_max: int) -> float:
    """Smallest gamma validating the certificate on 0 < |k|_1 <= k_max."""
    om = omega.values
    need = 0.0
    for k in _l1_ball(omega.nu, k_max):
        div = abs(float(np.dot(om, k)))
        l1 = sum(abs(x) for x in k)
        if div == 0.0:
            return math.inf
        need = max(need, 1.0 / (div * math.exp(rho / M * l1)))
    return need


@dataclass(frozen=True)
class ContinuedFractionDiagnostics:
    """Construction record for a continued-fraction frequency ratio."""

    alpha: float
    partial_quotients: tuple[int, ...]
    convergents: tuple[tuple[int, int], ...]
    brjuno_terms: tuple[float, ...] = field(default=())

    @property
    def brjuno_partial_sum(self) -> float:
        return float(sum(self.brjuno_terms))


GROWTH_RULES = ("exponential", "ones")


def liouvillean_frequency(
    depth: int, growth: str = "exponential"
) -> tuple[FrequencyVector, ContinuedFractionDiagnostics]:
    """Two-dimensional frequency c*(1, alpha) from fast-growing partial quotients.

    ``alpha`` is the continued fraction ``[0; a_1, ..., a_depth, 1, 1, ...]``
    with ``a_1 = 1`` and ``a_{n+1} = ceil(exp(q_n))`` under the
    ``exponential`` rule (``q_n`` the convergent denominators), closed by an
    all-ones tail so the value is a quadratic irrational beyond the computed
    depth.  Each Brjuno term ``ln(q_{n+1})/q_n`` then stays >= 1, so the
    partial Brjuno sum grows linearly with depth.  The ``ones`` rule
    disables the growth and reproduces the golden mean.
    """
    if depth < 2:
        raise ValueError("depth must be >= 2")
    if growth not in GROWTH_RULES:
        raise ValueError(f"growth must be one of {GROWTH_RULES}")
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    quotients: list[int] = []
    convergents: list[tuple[int, int]] = []
    for n in range(1, depth + 1):
        if growth == "ones" or n == 1:
            a = 1
        else:
            if q > 700:
                raise OverflowError(
                    f"partial quotient exp(q_{n - 1}) with q = {q} overflows"
                )
            a = math.ceil(math.exp(q))
        quotients.append(a)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        convergents.append((p, q))
    golden = (1.0 + math.sqrt(5.0)) / 2.0
    alpha = (p * golden + p_prev) / (q * golden + q_prev)
    qs = [1] + [qn for (_, qn) in convergents]
    terms = tuple(math.log(qs[i + 1]) / qs[i] for i in range(len(qs) - 1))
    diag = ContinuedFractionDiagnostics(alpha, tuple(quotients), tuple(convergents), terms)
    return FrequencyVector.normalized([1.0, alpha]), diag
