"""Report assembly, serialization (JSON/CSV/TSV) and stored-report verification."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

import numpy as np
from scipy.integrate import simpson

from .futaki import cone_angle_line, logbf_conical, logbf_extremal_closed_form, logbf_smooth_quadrature
from .invariants import invariant_report
from .params import poly_info
from .profile import (
    asymptotic_cone_check,
    curvature_from_fields,
    higher_scalar_curvature,
    legendre_reconstruct,
    legendre_slopes,
    profile_fields,
    profile_from_trajectory,
)
from .shooting import SmoothSolveReport, SolveReport, solve_conical, solve_smooth

__all__ = [
    "SCHEMA_VERSION",
    "CSV_COLUMNS",
    "ReportEnvelope",
    "Timer",
    "conical_results",
    "smooth_results",
    "sweep_row",
    "format_number",
    "rows_to_csv",
    "key_values_to_csv",
    "plot_data",
    "verify_report",
    "failed_targets",
    "solve_conical_envelope",
    "solve_smooth_envelope",
]

SCHEMA_VERSION = "1.0"

CSV_COLUMNS = (
    "m",
    "beta0",
    "beta_inf",
    "alpha_star",
    "C_m",
    "residual_bvp",
    "logbf_conical",
    "line_residual",
    "chern_integral",
    "lambda0",
    "lambda1",
)

# Acceptance tolerances carried inside every report so that ``verify`` never
# recomputes them.
TOL_PHI_END = 1e-8
TOL_SLOPE = 1e-6
TOL_CURVATURE_REL = 1e-6
TOL_CHERN = 1e-8
TOL_VOLUME_REL = 1e-10
TOL_RELATION = 1e-10
TOL_FUTAKI = 1e-6
TOL_ASYMPTOTIC_REL = 1e-3
TOL_ODE_REL = 1e-9


@dataclass
class ReportEnvelope:
    schema_version: str
    command: str
    inputs: dict
    results: dict
    paper_targets: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportEnvelope":
        data = json.loads(text)
        missing = {"schema_version", "command", "inputs", "results"} - set(data)
        if missing:
            raise ValueError(f"report lacks fields: {sorted(missing)}")
        return cls(**data)


class Timer:
    """Collects wall-clock durations per named phase."""

    def __init__(self):
        self.phases: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.phases[name] = self.phases.get(name, 0.0) + time.perf_counter() - t0


def _target(computed: float, target: float, tolerance: float) -> dict:
    return {
        "target": float(target),
        "computed": float(computed),
        "deviation": abs(float(computed) - float(target)),
        "tolerance": float(tolerance),
    }


def _finite_or_none(x: Optional[float]):
    return None if x is None or not math.isfinite(x) else float(x)


def _history(probes) -> list:
    return [[p.parameter, _finite_or_none(p.residual)] for p in probes]


def _resample(traj, grid_n: int):
    grid = np.linspace(1.0, traj.end, grid_n)
    grid[-1] = traj.end
    v = traj.evaluate(grid)
    v[0], v[-1] = traj.node_values[0], traj.node_values[-1]
    return grid, v


def conical_results(report: SolveReport, grid_n: int = 4097, timer: Timer | None = None, include_profile: bool = True):
    """``(results, paper_targets)`` for a converged conical solve."""
    timer = timer or Timer()
    spec, coeffs = report.spec, report.coeffs
    m, b0, binf = spec.m, spec.beta0, spec.beta_inf
    with timer.phase("profile"):
        prof = profile_from_trajectory(report.trajectory, coeffs)
        lam = higher_scalar_curvature(prof)
        asym = asymptotic_cone_check(prof)
        slopes = legendre_slopes(prof)
    with timer.phase("invariants"):
        inv = invariant_report(prof, b0, binf)
    with timer.phase("futaki"):
        fut = logbf_conical(m, b0, binf, prof)
    info = poly_info(coeffs, m)
    interior = prof.phi[1:-1]

    results: dict[str, Any] = {
        "solve": {
            "m": m,
            "beta0": b0,
            "alpha_star": spec.alpha,
            "beta_inf": binf,
            "B": coeffs.B,
            "C": coeffs.C,
            "residual": report.residual,
            "iterations": report.iterations,
            "tol": report.tol,
            "bracket_history": _history(report.bracket_history),
        },
        "poly": {"gamma0": info.gamma0, "gamma00": info.gamma00},
        "futaki": {"value": fut.value, "i_phi": fut.i_phi, "terms": fut.closed_form_terms},
        "asymptotics": {**asym, **slopes},
        "min_interior_phi": float(interior.min()),
    }
    targets = {
        "boundary_residual": _target(report.residual / (m + 1.0) ** 2, 0.0, 1e-8),
        "phi_at_1": _target(prof.phi[0], 0.0, TOL_PHI_END),
        "phi_at_end": _target(prof.phi[-1], 0.0, TOL_PHI_END),
        "dphi_at_1": _target(prof.dphi[0], b0, TOL_SLOPE),
        "dphi_at_end": _target(prof.dphi[-1], -binf, TOL_SLOPE),
        "curvature_max_deviation": _target(
            float(np.max(np.abs(lam[1:-1] - coeffs.B))), 0.0, TOL_CURVATURE_REL * abs(coeffs.B)
        ),
        "logbf_conical": _target(fut.value, 0.0, TOL_FUTAKI),
        "limit_phi_over_tau": _target(asym["c2_zero"], b0, TOL_ASYMPTOTIC_REL * b0),
        "limit_phi_over_m_minus_tau": _target(asym["c2_inf"], binf, TOL_ASYMPTOTIC_REL * binf),
        "legendre_slope_zero": _target(slopes["slope_zero"], 1.0 / b0, TOL_ASYMPTOTIC_REL / b0),
    }
    targets.update(_invariant_targets(inv))
    if include_profile:
        results["profile"] = _profile_columns(report.trajectory, coeffs, grid_n)
    return results, targets


def _invariant_targets(inv) -> dict:
    tol = {
        "chern_integral": TOL_CHERN,
        "vol_X": TOL_VOLUME_REL * inv.vol_X.target,
        "vol_S0": TOL_VOLUME_REL * inv.vol_S0.target,
        "vol_Sinf": TOL_VOLUME_REL * inv.vol_Sinf.target,
        "lambda0": TOL_RELATION,
        "lambda1": TOL_CHERN,
        "relation_residual": TOL_RELATION,
    }
    return {k: _target(v["computed"], v["target"], tol[k]) for k, v in inv.targets().items()}


def _profile_columns(traj, coeffs, grid_n: int) -> dict:
    grid, v = _resample(traj, grid_n)
    phi, dphi, ddphi = profile_fields(grid, v, coeffs)
    return {
        "gamma": grid.tolist(),
        "v": v.tolist(),
        "phi": phi.tolist(),
        "dphi": dphi.tolist(),
        "ddphi": ddphi.tolist(),
    }


def smooth_results(report: SmoothSolveReport, beta_pairs: Iterable = (), grid_n: int = 4097, timer: Timer | None = None, include_profile: bool = True):
    timer = timer or Timer()
    m, c = report.m, report.coeffs
    with timer.phase("profile"):
        prof = profile_from_trajectory(report.trajectory, c)
        lam = higher_scalar_curvature(prof)
    with timer.phase("invariants"):
        inv = invariant_report(prof, 1.0, 1.0)
    futaki_rows = []
    with timer.phase("futaki"):
        for b0, binf in beta_pairs:
            q = logbf_smooth_quadrature(m, b0, binf, prof).value
            cf = logbf_extremal_closed_form(m, report.C_star, b0, binf)
            futaki_rows.append({"beta0": b0, "beta_inf": binf, "quadrature": q, "closed_form": cf})
    line = cone_angle_line(m, report.C_star)
    results = {
        "solve": {
            "m": m,
            "C_star": report.C_star,
            "A": c.A,
            "B": c.B,
            "residual": report.residual,
            "iterations": report.iterations,
            "tol": report.tol,
            "bracket_history": _history(report.bracket_history),
        },
        "line": asdict(line),
        "futaki": futaki_rows,
    }
    targets = {
        "boundary_residual": _target(report.residual / (m + 1.0) ** 2, 0.0, 1e-8),
        "dpsi_at_1": _target(prof.dphi[0], 1.0, TOL_SLOPE),
        "dpsi_at_end": _target(prof.dphi[-1], -1.0, TOL_SLOPE),
        "curvature_affine_deviation": _target(float(np.max(np.abs(lam - (c.A * prof.grid + c.B)))), 0.0, 1e-6),
        "chern_integral": _target(inv.chern_integral.computed, -4.0, TOL_CHERN),
    }
    for i, row in enumerate(futaki_rows):
        targets[f"logbf_smooth_vs_closed_form_{i}"] = _target(
            row["quadrature"], row["closed_form"], 1e-6 * max(abs(row["closed_form"]), 1.0)
        )
    if include_profile:
        results["profile"] = _profile_columns(report.trajectory, c, grid_n)
    return results, targets


def failed_targets(targets: dict) -> list[str]:
    return [k for k, t in targets.items() if not abs(t["computed"] - t["target"]) <= t["tolerance"]]


def sweep_row(m: float, beta0: float, C_m: Optional[float], tol: float) -> dict:
    """One sweep cell; failures are recorded in the ``error`` field."""
    row: dict[str, Any] = {k: None for k in CSV_COLUMNS}
    row.update(m=m, beta0=beta0, C_m=C_m, error="")
    try:
        rep = solve_conical(m, beta0, tol)
        prof = profile_from_trajectory(rep.trajectory, rep.coeffs)
        inv = invariant_report(prof, beta0, rep.spec.beta_inf)
        fut = logbf_conical(m, beta0, rep.spec.beta_inf, prof)
        row.update(
            beta_inf=rep.spec.beta_inf,
            alpha_star=rep.spec.alpha,
            residual_bvp=rep.residual,
            logbf_conical=fut.value,
            chern_integral=inv.chern_integral.computed,
            lambda0=inv.lambda0.computed,
            lambda1=inv.lambda1.computed,
        )
        if C_m is not None:
            row["line_residual"] = cone_angle_line(m, C_m).residual(beta0, rep.spec.beta_inf)
    except Exception as exc:  # noqa: BLE001 - a failed cell must not stop the sweep
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def format_number(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def rows_to_csv(rows: list[dict], columns=CSV_COLUMNS + ("error",)) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_number(r.get(c)) for c in columns])
    return buf.getvalue()


def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else str(k), v, out)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (list, dict)):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, out)
    elif isinstance(obj, list):
        return
    else:
        out.append((prefix, obj))


def key_values_to_csv(results: dict) -> str:
    """Scalar leaves of a results block as a two-column table (arrays skipped)."""
    pairs: list = []
    _flatten("", {k: v for k, v in results.items() if k != "profile"}, pairs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    for k, v in pairs:
        w.writerow([k, format_number(v) if not isinstance(v, bool) else str(v).lower()])
    return buf.getvalue()


def _write_tsv(path: Path, header, cols) -> None:
    lines = ["\t".join(header)]
    for row in zip(*cols):
        lines.append("\t".join(format_number(x) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def plot_data(envelope: ReportEnvelope, directory) -> list[Path]:
    """Write ``(g, v)``, ``(g, phi)``, ``(g, lambda)`` and ``(tau, s)`` columns as TSV."""
    from .params import ConicalCoeffs, smooth_coeffs
    from .profile import MomentumProfile

    prof = envelope.results.get("profile")
    if prof is None:
        raise ValueError("report carries no profile columns")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    g = np.asarray(prof["gamma"])
    phi, dphi, ddphi = (np.asarray(prof[k]) for k in ("phi", "dphi", "ddphi"))
    lam = curvature_from_fields(g, phi, dphi, ddphi)
    solve = envelope.results["solve"]
    if "C_star" in solve:
        coeffs = smooth_coeffs(solve["C_star"], solve["m"])
    else:
        coeffs = ConicalCoeffs(solve["B"], solve["C"])
    stored = MomentumProfile(g, phi, dphi, ddphi, coeffs, float(solve["m"]))
    rec = legendre_reconstruct(stored)
    paths = [directory / name for name in ("v.tsv", "phi.tsv", "lambda.tsv", "potential.tsv")]
    _write_tsv(paths[0], ("gamma", "v"), (g, prof["v"]))
    _write_tsv(paths[1], ("gamma", "phi"), (g, phi))
    _write_tsv(paths[2], ("gamma", "lambda"), (g, lam))
    _write_tsv(paths[3], ("tau", "s"), (rec.tau_grid, rec.s_values))
    return paths


def _one_sided_slope(y: np.ndarray, h: float) -> tuple[float, float]:
    """Forward-difference slope at ``y[0]`` (orders 4 and 5) and their gap."""
    d4 = (-25 * y[0] + 48 * y[1] - 36 * y[2] + 16 * y[3] - 3 * y[4]) / (12 * h)
    d5 = (-137 * y[0] + 300 * y[1] - 300 * y[2] + 200 * y[3] - 75 * y[4] + 12 * y[5]) / (60 * h)
    return d5, abs(d5 - d4)


def verify_report(envelope: ReportEnvelope) -> dict:
    """Re-check a stored report; returns ``{check: {ok, detail...}}``.

    Stored targets are re-compared, then the profile columns are checked
    on their own (finite-difference boundary slopes, ODE consistency, and the
    invariant integrals by Simpson's rule) without trusting stored results.
    """
    checks: dict[str, dict] = {}
    for name, t in envelope.paper_targets.items():
        dev = abs(t["computed"] - t["target"])
        checks[f"target:{name}"] = {"ok": dev <= t["tolerance"], "deviation": dev, "tolerance": t["tolerance"]}

    prof = envelope.results.get("profile")
    solve = envelope.results.get("solve", {})
    if prof is None or "beta0" not in solve:
        return checks
    g = np.asarray(prof["gamma"], dtype=float)
    phi = np.asarray(prof["phi"], dtype=float)
    dphi = np.asarray(prof["dphi"], dtype=float)
    ddphi = np.asarray(prof["ddphi"], dtype=float)
    m, b0, binf = solve["m"], solve["beta0"], solve["beta_inf"]
    B, C = solve["B"], solve["C"]
    h = g[1] - g[0]

    def add(name, value, target, tol):
        dev = abs(value - target)
        checks[name] = {"ok": bool(dev <= tol), "value": float(value), "target": float(target), "deviation": float(dev), "tolerance": float(tol)}

    add("profile:phi_at_1", phi[0], 0.0, TOL_PHI_END)
    add("profile:phi_at_end", phi[-1], 0.0, TOL_PHI_END)
    s0, e0 = _one_sided_slope(phi, h)
    s1, e1 = _one_sided_slope(phi[::-1], h)
    add("profile:fd_slope_at_1", s0, b0, TOL_SLOPE + 10 * e0)
    add("profile:fd_slope_at_end", -s1, -binf, TOL_SLOPE + 10 * e1)
    forcing = g * (0.5 * B * g * g + C)
    ode = np.max(np.abs((2 * g + phi) * dphi - forcing) / (1.0 + np.abs(forcing)))
    add("profile:ode_consistency", ode, 0.0, TOL_ODE_REL)
    checks["profile:interior_positive"] = {"ok": bool(np.all(phi[1:-1] > 0.0)), "min": float(phi[1:-1].min())}
    i_phi = simpson((phi / g) ** 2, x=g)
    lam_w = m * m + 3 * m + 3
    fut = 2 * (b0 + (m + 1) * binf) + 0.5 * i_phi - (4.0 / 3.0) * lam_w / (m + 2) * (b0 + binf)
    add("profile:logbf_conical", fut, 0.0, TOL_FUTAKI + 1e-3 * h**4)
    chern = simpson(g * curvature_from_fields(g, phi, dphi, ddphi), x=g) + 2 * (b0 - 1) + 2 * (binf - 1)
    add("profile:chern_integral", chern, -4.0, TOL_CHERN + 1e-3 * h**4)
    return checks


def solve_conical_envelope(m, beta0, tol, grid_n, inputs) -> ReportEnvelope:
    timer = Timer()
    with timer.phase("solve"):
        rep = solve_conical(m, beta0, tol)
    results, targets = conical_results(rep, grid_n, timer)
    return ReportEnvelope(SCHEMA_VERSION, "solve-conical", inputs, results, targets, timer.phases)


def solve_smooth_envelope(m, tol, grid_n, inputs, beta0_values=()) -> ReportEnvelope:
    """Smooth solve plus the invariant at ``(1, 1)`` and at each ``(beta0, beta_inf on the line)``."""
    timer = Timer()
    with timer.phase("solve"):
        rep = solve_smooth(m, tol)
    line = cone_angle_line(m, rep.C_star)
    pairs = [(1.0, 1.0)] + [(b, line.beta_inf_on_line(b)) for b in beta0_values]
    results, targets = smooth_results(rep, pairs, grid_n, timer)
    return ReportEnvelope(SCHEMA_VERSION, "solve-smooth", inputs, results, targets, timer.phases)
