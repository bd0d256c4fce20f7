"""Deterministic CSV serialisation of run artifacts.

Floats are written with ``repr`` (shortest round-trip form), iteration
orders are fixed, and no timestamps appear, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import numpy as np

from .fourier import FourierField, synthesize_on_grid
from .frequency import NonresonanceCertificate
from .iteration import RunReport
from .linear_solvers import SymbolFloorReport, diagonal_symbol_value


def _fmt(x: float) -> str:
    return repr(float(x))


def run_report_csv(report: RunReport) -> str:
    lines = ["level,N,rho,increment,residual,contraction,prior_ok,shape_ok"]
    for lev in report.levels:
        shape = "-" if lev.shape_ok is None else ("1" if lev.shape_ok else "0")
        lines.append(
            ",".join(
                [
                    str(lev.level),
                    str(lev.cutoff),
                    _fmt(lev.rho),
                    _fmt(lev.increment_norm),
                    _fmt(lev.residual),
                    _fmt(lev.contraction),
                    "1" if lev.prior_ok else "0",
                    shape,
                ]
            )
        )
    lines.append(f"# theta0={_fmt(report.theta0)}")
    lines.append(f"# theta1={_fmt(report.theta1)}")
    lines.append(f"# averaged_residual={_fmt(report.averaged_residual)}")
    lines.append(f"# u0_bound_ratio={_fmt(report.u0_bound_ratio)}")
    lines.append(f"# final_residual_max={_fmt(report.final_residual_max)}")
    lines.append(f"# final_residual_rms={_fmt(report.final_residual_rms)}")
    lines.append(f"# verdict={report.verdict}")
    if report.failure:
        lines.append(f"# failure={report.failure}")
    return "\n".join(lines) + "\n"


def certificate_csv(cert: NonresonanceCertificate) -> str:
    return cert.CSV_HEADER + "\n" + cert.csv_row() + "\n"


def spectrum_csv(
    omega, eps: float, mu: float, k_max: int, j_max: int, floor: SymbolFloorReport
) -> str:
    """Table of diagonal symbol values over a scan plus the floor verdict."""
    from itertools import product as iproduct

    om = np.asarray(getattr(omega, "values", omega), dtype=float)
    nu = len(om)
    lines = ["k,j,sigma,re,im,abs"]
    for k in sorted(iproduct(range(-k_max, k_max + 1), repeat=nu)):
        if not 0 < sum(abs(x) for x in k) <= k_max:
            continue
        for j in range(1, j_max + 1):
            theta = diagonal_symbol_value(eps, mu, om, k, (j,))
            sigma = float(np.dot(om, k))
            lines.append(
                ",".join(
                    [
                        " ".join(str(x) for x in k),
                        str(j),
                        _fmt(sigma),
                        _fmt(theta.real),
                        _fmt(theta.imag),
                        _fmt(abs(theta)),
                    ]
                )
            )
    lines.append(f"# min_abs_symbol={_fmt(floor.min_abs_symbol)}")
    lines.append(f"# uniform_bound_ok={'1' if floor.uniform_bound_ok else '0'}")
    lines.append(f"# violations={len(floor.violations)}")
    for label in sorted(floor.case_margins):
        lines.append(f"# margin[{label}]={_fmt(floor.case_margins[label])}")
    return "\n".join(lines) + "\n"


def grid_samples_csv(u: FourierField, points: int) -> str:
    """Plot-ready point samples: one row per grid node, axes then value."""
    import math

    sizes = []
    steps = []
    for e in u.extents:
        factor = max(1, math.ceil((2 * e + 1) / points))
        sizes.append(points * factor)
        steps.append(factor)
    values = synthesize_on_grid(u, tuple(sizes))
    sub = values[tuple(slice(None, None, st) for st in steps)]
    nu, d = u.box.nu, u.box.d
    header = (
        [f"phi{i + 1}" for i in range(nu)] + [f"x{i + 1}" for i in range(d)] + ["u"]
    )
    lines = [",".join(header)]
    coords = [2.0 * np.pi * np.arange(points) / points] * (nu + d)
    for idx in np.ndindex(*sub.shape):
        row = [_fmt(coords[ax][i]) for ax, i in enumerate(idx)]
        row.append(_fmt(sub[idx]))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
