"""``ecp`` command line: potential curves, ground-state table, constants, self-check.

Exit codes: 0 success, 1 computational failure, 2 usage or configuration error.
Every data file is accompanied by ``<out>.manifest.json``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, coulomb, groundstate, selfcheck
from .correlator import ThermalState

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2
CSV_HEADER = "r0,omega_T,omega_L,W,opt_mode"


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    order: int = 1
    beta: str = "10"
    r0_grid: tuple[float, float, int] = (0.5, 5.0, 10)
    mode: str = "iso"
    output_path: str | None = None
    format: str = "csv"
    precision: int = 10
    tol: float | None = None
    workers: int = 1
    warnings: list[str] = field(default_factory=list)

    def thermal(self):
        if self.beta == "zero":
            return ThermalState.zero()
        return float(self.beta)

    def grid(self) -> np.ndarray:
        start, stop, steps = self.r0_grid
        return np.linspace(start, stop, steps)


def parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"r0 grid must be start:stop:steps, got {text!r}")
    try:
        start, stop, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad r0 grid {text!r}: {exc}") from None
    if steps < 1:
        raise ConfigError("r0 grid needs at least one step")
    if start < 0:
        raise ConfigError("r0 grid must start at r0 >= 0")
    if steps > 1 and stop <= start:
        raise ConfigError("r0 grid must be increasing")
    return start, stop, steps


def parse_beta(text: str) -> str:
    if text == "zero":
        return text
    try:
        b = float(text)
    except ValueError:
        raise ConfigError(f"beta must be a positive number or 'zero', got {text!r}") from None
    if not (b > 0 and math.isfinite(b)):
        raise ConfigError("beta must be positive and finite")
    return repr(b)


def read_config_file(path: str) -> dict[str, str]:
    """Plain ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for i, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{i}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


_KEYS = ("order", "beta", "r0", "mode", "out", "format", "precision", "tol", "workers")


def build_config(args: argparse.Namespace) -> RunConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    unknown = set(values) - set(_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for k in _KEYS:
        v = getattr(args, k, None)
        if v is not None:
            values[k] = str(v)  # flags win
    cfg = RunConfig(command=args.command)
    try:
        if "order" in values:
            cfg.order = int(values["order"])
        if "precision" in values:
            cfg.precision = int(values["precision"])
        if "workers" in values:
            cfg.workers = int(values["workers"])
        if "tol" in values:
            cfg.tol = float(values["tol"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if cfg.order not in (1, 2):
        raise ConfigError("order must be 1 or 2")
    if not 1 <= cfg.precision <= 17:
        raise ConfigError("precision must be between 1 and 17")
    if cfg.workers < 1:
        raise ConfigError("workers must be >= 1")
    if "beta" in values:
        cfg.beta = parse_beta(values["beta"])
    if "r0" in values:
        cfg.r0_grid = parse_grid(values["r0"])
    cfg.mode = values.get("mode", cfg.mode)
    if cfg.mode not in ("iso", "aniso"):
        raise ConfigError("mode must be iso or aniso")
    cfg.format = values.get("format", cfg.format)
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    cfg.output_path = values.get("out")
    if cfg.command in ("curve", "ground-state", "constants") and not cfg.output_path:
        raise ConfigError("--out is required")
    if cfg.beta == "zero":
        cfg.warnings.append("beta=zero evaluated as the exact zero-temperature limit of the correlators")
    return cfg


def _num(x: float, precision: int) -> str:
    if x is None or not math.isfinite(x):
        return "nan"
    return f"{x:.{precision}g}"


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="\n")


def _write_manifest(cfg: RunConfig, wall: float, status: list, extra: dict | None = None) -> None:
    cfg_echo = asdict(cfg)
    cfg_echo.pop("warnings")
    manifest = {
        "config": cfg_echo,
        "engine": "ecp",
        "version": __version__,
        "wall_time_s": round(wall, 3),
        "warnings": cfg.warnings,
        "points": status,
    }
    if extra:
        manifest.update(extra)
    _write(cfg.output_path + ".manifest.json", json.dumps(manifest, indent=2) + "\n")


def run_curve(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    crv = coulomb.curve(cfg.order, cfg.thermal(), cfg.grid(), cfg.mode, workers=cfg.workers)
    p = cfg.precision
    rows, status = [], []
    for pt in crv.points:
        f = pt.frequencies
        mode = pt.optimization_mode.value if pt.ok else "Failed"
        rows.append(
            {
                "r0": pt.r0,
                "omega_T": f.omega_T if f else math.nan,
                "omega_L": f.omega_L if f else math.nan,
                "W": pt.value,
                "opt_mode": mode,
            }
        )
        status.append({"r0": pt.r0, "status": "ok" if pt.ok else "failed", "opt_mode": mode, "error": pt.error})
    if cfg.format == "csv":
        lines = [CSV_HEADER]
        for r in rows:
            nums = [_num(r[k], p) for k in ("r0", "omega_T", "omega_L", "W")]
            lines.append(",".join(nums + [r["opt_mode"]]))
        _write(cfg.output_path, "\n".join(lines) + "\n")
    else:
        payload = {
            "order": cfg.order,
            "beta": cfg.beta,
            "mode": cfg.mode,
            "points": [{k: (float(_num(v, p)) if k != "opt_mode" else v) for k, v in r.items()} for r in rows],
        }
        _write(cfg.output_path, json.dumps(payload, indent=2) + "\n")
    _write_manifest(cfg, time.perf_counter() - t0, status)
    return EXIT_OK if all(pt.ok for pt in crv.points) else EXIT_FAILURE


def run_ground_state(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    records = []
    for N in (1, 2, 3):
        r = groundstate.optimize_ground_state(N)
        records.append({"N": N, "omega": r.omega_star, "gamma": r.gamma, "energy": r.energy})
    payload = {"records": records, "gamma_exact": groundstate.GAMMA_EXACT}
    _write(cfg.output_path, json.dumps(payload, indent=2) + "\n")
    _write_manifest(cfg, time.perf_counter() - t0, [{"N": r["N"], "status": "ok"} for r in records])
    return EXIT_OK


def run_constants(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    n_max = groundstate.DEFAULT_NMAX
    c = groundstate.constant_c(n_max)
    drift = abs(groundstate.constant_c(2 * n_max) - c)
    c_prime = math.sqrt(groundstate.optimize_ground_state(3, c_value=c).omega_star)
    payload = {
        "c": c,
        "c_prime": c_prime,
        "rs_second_order": groundstate.rs_second_order_coefficient(n_max),
        "resum_5_16": float(groundstate.resummation_coefficient(Fraction(1, 2), 3)),
        "resum_21_32": float(groundstate.resummation_coefficient(Fraction(1, 4), 2)),
        "truncation": {
            "n_max": n_max,
            "tail": "integral comparison",
            "c_drift_on_doubling": drift,
        },
    }
    _write(cfg.output_path, json.dumps(payload, indent=2) + "\n")
    _write_manifest(cfg, time.perf_counter() - t0, [{"quantity": k, "status": "ok"} for k in payload if k != "truncation"])
    return EXIT_OK


def run_selfcheck(cfg: RunConfig) -> int:
    results = selfcheck.run(cfg.tol)
    sys.stdout.write(selfcheck.format_report(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ecp", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ecp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value file; command-line flags take precedence")

    pc = sub.add_parser("curve", help="optimized W_N(r0) on a grid")
    common(pc)
    pc.add_argument("--order", type=int, choices=(1, 2))
    pc.add_argument("--beta", help="inverse temperature, or 'zero'")
    pc.add_argument("--r0", help="grid start:stop:steps")
    pc.add_argument("--mode", choices=("iso", "aniso"))
    pc.add_argument("--out")
    pc.add_argument("--format", choices=("csv", "json"))
    pc.add_argument("--precision", type=int)
    pc.add_argument("--workers", type=int, help="processes for grid points (default 1)")

    for name, hlp in (("ground-state", "gamma_N table for N = 1, 2, 3"), ("constants", "c, c', RS coefficients")):
        p = sub.add_parser(name, help=hlp)
        common(p)
        p.add_argument("--out")

    ps = sub.add_parser("selfcheck", help="run the invariant suite")
    common(ps)
    ps.add_argument("--tol", type=float, help="override every check tolerance")
    return parser


_RUNNERS = {
    "curve": run_curve,
    "ground-state": run_ground_state,
    "constants": run_constants,
    "selfcheck": run_selfcheck,
}


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors, 0 on --help
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
    except ConfigError as exc:
        print(f"ecp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _RUNNERS[cfg.command](cfg)
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"ecp: computation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
