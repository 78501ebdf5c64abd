"""Command-line entry point: ``calabi <subcommand> ...``.

Exit codes: 0 success, 1 solver error, 2 invariant verification failure,
3 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from .errors import CalabiError, DomainError
from .futaki import cone_angle_line
from .reports import (
    SCHEMA_VERSION,
    ReportEnvelope,
    Timer,
    failed_targets,
    key_values_to_csv,
    plot_data,
    rows_to_csv,
    solve_conical_envelope,
    solve_smooth_envelope,
    sweep_row,
    verify_report,
)
from .shooting import solve_conical, solve_smooth

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_VERIFY = 2
EXIT_USAGE = 3

LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING, "info": logging.INFO, "debug": logging.DEBUG}
COMMANDS = ("solve-conical", "solve-smooth", "verify", "sweep", "line", "probe")
CONFIG_KEYS = {"m", "beta0", "tol", "grid_n", "output", "format", "workers", "plot_dir"}

log = logging.getLogger("calabi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunConfig:
    """Resolved options; command-line flags override the ``--config`` file."""

    command: str
    m: list = field(default_factory=list)
    beta0: list = field(default_factory=list)
    tol: float = 1e-10
    grid_n: int = 4097
    output: Optional[str] = None
    format: str = "json"
    input: Optional[str] = None
    workers: int = 1
    plot_dir: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")
        if not (0.0 < self.tol < 1e-2):
            raise UsageError("--tol must lie in (0, 1e-2)")
        if self.grid_n < 9:
            raise UsageError("--grid-n must be at least 9")
        if self.workers < 1:
            raise UsageError("--workers must be positive")
        needs_m = self.command != "verify"
        needs_beta = self.command in ("solve-conical", "sweep", "probe")
        if needs_m and not self.m:
            raise UsageError(f"{self.command} needs --m")
        if needs_beta and not self.beta0:
            raise UsageError(f"{self.command} needs --beta0")
        if self.command == "verify" and not self.input:
            raise UsageError("verify needs --input")
        if self.command != "sweep" and (len(self.m) > 1 or len(self.beta0) > 1):
            raise UsageError("lists of --m/--beta0 are accepted only by sweep")
        return self


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="calabi", description="Conical and smooth higher-extremal Kähler metrics on a Hirzebruch-type ruled surface.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--m", type=float, nargs="+", default=argparse.SUPPRESS)
        p.add_argument("--beta0", type=float, nargs="+", default=argparse.SUPPRESS)
        p.add_argument("--tol", type=float, default=argparse.SUPPRESS)
        p.add_argument("--grid-n", dest="grid_n", type=int, default=argparse.SUPPRESS)
        p.add_argument("--output", default=argparse.SUPPRESS)
        p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
        p.add_argument("--config", default=None, help="JSON file with default options")
        p.add_argument("--input", default=argparse.SUPPRESS)
        p.add_argument("--plot-dir", dest="plot_dir", default=argparse.SUPPRESS)
        p.add_argument("--workers", type=int, default=argparse.SUPPRESS)
    return parser


def _listify(x):
    return list(x) if isinstance(x, (list, tuple)) else [x]


def resolve_config(argv: Sequence[str]) -> RunConfig:
    ns = vars(_build_parser().parse_args(list(argv)))
    merged: dict = {}
    config_path = ns.pop("config", None)
    if config_path:
        try:
            data = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}") from exc
        unknown = set(data) - CONFIG_KEYS
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    merged.update(ns)
    for key in ("m", "beta0"):
        if key in merged:
            merged[key] = [float(v) for v in _listify(merged[key])]
    try:
        return RunConfig(**merged).validate()
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def configure_logging() -> None:
    name = os.environ.get("CALABI_LOG_LEVEL", "warn").lower()
    level = LOG_LEVELS.get(name, logging.WARNING)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    log.setLevel(level)
    if name not in LOG_LEVELS:
        log.warning("unrecognised CALABI_LOG_LEVEL=%r; using warn", name)


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output:
        try:
            Path(cfg.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.output}: {exc}") from exc
        log.info("wrote %s", cfg.output)
    else:
        sys.stdout.write(text)


def _inputs(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d.pop("output")
    d.pop("plot_dir")
    return d


def _finish_envelope(env: ReportEnvelope, cfg: RunConfig) -> int:
    if cfg.format == "csv":
        _emit(key_values_to_csv(env.results), cfg)
    else:
        _emit(env.to_json(), cfg)
    if cfg.plot_dir:
        for path in plot_data(env, cfg.plot_dir):
            log.info("wrote %s", path)
    bad = failed_targets(env.paper_targets)
    if bad:
        log.error("targets outside tolerance: %s", ", ".join(bad))
        return EXIT_VERIFY
    return EXIT_OK


def _cmd_solve_conical(cfg: RunConfig) -> int:
    env = solve_conical_envelope(cfg.m[0], cfg.beta0[0], cfg.tol, cfg.grid_n, _inputs(cfg))
    s = env.results["solve"]
    log.info("alpha*=%.17g beta_inf=%.17g after %d iterations", s["alpha_star"], s["beta_inf"], s["iterations"])
    return _finish_envelope(env, cfg)


def _cmd_solve_smooth(cfg: RunConfig) -> int:
    env = solve_smooth_envelope(cfg.m[0], cfg.tol, cfg.grid_n, _inputs(cfg), cfg.beta0)
    log.info("C(m)=%.17g", env.results["solve"]["C_star"])
    return _finish_envelope(env, cfg)


def _cmd_verify(cfg: RunConfig) -> int:
    try:
        env = ReportEnvelope.from_json(Path(cfg.input).read_text(encoding="utf-8"))
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(f"cannot read report {cfg.input}: {exc}") from exc
    checks = verify_report(env)
    ok = all(c["ok"] for c in checks.values())
    out = ReportEnvelope(SCHEMA_VERSION, "verify", _inputs(cfg), {"passed": ok, "checks": checks})
    _emit(out.to_json(), cfg)
    for name, c in checks.items():
        if not c["ok"]:
            log.error("check failed: %s %s", name, c)
    return EXIT_OK if ok else EXIT_VERIFY


def _smooth_cell(m: float, tol: float):
    try:
        return solve_smooth(m, tol).C_star
    except CalabiError as exc:
        log.warning("smooth solve failed at m=%r: %s", m, exc)
        return None


def _sweep_cell(args):
    m, beta0, c_m, tol = args
    return sweep_row(m, beta0, c_m, tol)


def _cmd_sweep(cfg: RunConfig) -> int:
    ms = sorted(set(cfg.m))
    betas = sorted(set(cfg.beta0))
    timer = Timer()
    # Executor.map preserves submission order, so output is deterministic.
    if cfg.workers == 1:
        with timer.phase("smooth"):
            c_of_m = dict(zip(ms, (_smooth_cell(m, cfg.tol) for m in ms)))
        cells = [(m, b, c_of_m[m], cfg.tol) for m in ms for b in betas]
        with timer.phase("conical"):
            rows = [_sweep_cell(c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            with timer.phase("smooth"):
                c_of_m = dict(zip(ms, pool.map(_smooth_cell, ms, [cfg.tol] * len(ms))))
            cells = [(m, b, c_of_m[m], cfg.tol) for m in ms for b in betas]
            with timer.phase("conical"):
                rows = list(pool.map(_sweep_cell, cells))
    for r in rows:
        if r["error"]:
            log.warning("cell m=%r beta0=%r failed: %s", r["m"], r["beta0"], r["error"])
    if cfg.format == "csv":
        _emit(rows_to_csv(rows), cfg)
    else:
        env = ReportEnvelope(SCHEMA_VERSION, "sweep", _inputs(cfg), {"rows": rows}, {}, timer.phases)
        _emit(env.to_json(), cfg)
    return EXIT_OK


def _cmd_line(cfg: RunConfig) -> int:
    m = cfg.m[0]
    timer = Timer()
    with timer.phase("solve"):
        rep = solve_smooth(m, cfg.tol)
    line = cone_angle_line(m, rep.C_star)
    results = {"line": asdict(line)}
    if cfg.beta0:
        results["beta_inf_on_line"] = line.beta_inf_on_line(cfg.beta0[0])
    env = ReportEnvelope(SCHEMA_VERSION, "line", _inputs(cfg), results, {}, timer.phases)
    return _finish_envelope(env, cfg)


def _cmd_probe(cfg: RunConfig) -> int:
    m, b0 = cfg.m[0], cfg.beta0[0]
    timer = Timer()
    with timer.phase("solve"):
        con = solve_conical(m, b0, cfg.tol)
        smo = solve_smooth(m, cfg.tol)
    line = cone_angle_line(m, smo.C_star)
    results = {
        "m": m,
        "beta0": b0,
        "C_star": smo.C_star,
        "beta_inf_shooting": con.spec.beta_inf,
        "beta_inf_line": line.beta_inf_on_line(b0),
        "line_residual": line.residual(b0, con.spec.beta_inf),
    }
    env = ReportEnvelope(SCHEMA_VERSION, "probe", _inputs(cfg), results, {}, timer.phases)
    return _finish_envelope(env, cfg)


HANDLERS = {
    "solve-conical": _cmd_solve_conical,
    "solve-smooth": _cmd_solve_smooth,
    "verify": _cmd_verify,
    "sweep": _cmd_sweep,
    "line": _cmd_line,
    "probe": _cmd_probe,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = resolve_config(argv)
        return HANDLERS[cfg.command](cfg)
    except (UsageError, DomainError) as exc:
        # Out-of-domain parameters are bad input, not a solver failure.
        print(f"calabi: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help exits through argparse
        return int(exc.code or 0)
    except CalabiError as exc:
        print(f"calabi: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    raise SystemExit(main())
