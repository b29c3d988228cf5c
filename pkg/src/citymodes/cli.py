"""Command-line front end.

Subcommands::

    citymodes scan    [options]        gap on a k-grid
    citymodes modes   [options]        refined roots of the gap (JSON)
    citymodes asympt  {low,high,gap}   asymptotic diagnostic tables
    citymodes field   [options]        field map on a rectangular grid

Options can come from a flat JSON file given with ``--config``; flags
override file values. All reals are written with 17 significant digits.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import coupling, screen_bie, specfun

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

FIELD_BAND = 1e-3


class ConfigError(ValueError):
    pass


# keys accepted in the JSON config, with their types
CONFIG_KEYS: dict[str, type] = {
    "c1": float, "c2": float, "c3": float, "c4": float,
    "kmin": float, "kmax": float, "points": int, "spacing": str,
    "modes": int, "out": str, "format": str, "workers": int,
    "branch": str, "k": float,
    "x1min": float, "x1max": float, "nx": int,
    "x2min": float, "x2max": float, "ny": int,
}

DEFAULTS: dict[str, dict[str, Any]] = {
    "scan": {"kmin": 1e-3, "kmax": 5.0, "points": 200, "spacing": "log"},
    "modes": {"kmin": 1e-3, "kmax": 5.0, "points": 200, "spacing": "log"},
    "low": {"kmin": 1e-4, "kmax": 1e-1, "points": 13, "spacing": "log"},
    "high": {"kmin": 1.0, "kmax": 100.0, "points": 21, "spacing": "log"},
    "gap": {"kmin": 10.0, "kmax": 40.0, "points": 7, "spacing": "log", "branch": "auto"},
    "field": {"k": 1.0, "x1min": -1.0, "x1max": 1.0, "nx": 21, "x2min": -1.0, "x2max": 1.0, "ny": 21},
}


@dataclass(frozen=True)
class RunConfig:
    constants: coupling.CityConstants
    k_lo: float
    k_hi: float
    points: int
    spacing: str
    truncation_override: int | None
    output_path: str | None
    format: str
    workers: int | None = None
    branch: str = "auto"
    k: float = 1.0
    x1: tuple[float, float, int] = (-1.0, 1.0, 21)
    x2: tuple[float, float, int] = (-1.0, 1.0, 21)


def _coerce(key: str, value: Any) -> Any:
    kind = CONFIG_KEYS[key]
    if value is None:
        return None
    if kind is int:
        if isinstance(value, bool) or not float(value).is_integer():
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return int(value)
    if kind is float:
        if isinstance(value, bool):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        try:
            out = float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{key} must be a number, got {value!r}") from exc
        if not math.isfinite(out):
            raise ConfigError(f"{key} must be finite, got {value!r}")
        return out
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string, got {value!r}")
    return value


def load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path}: top level must be an object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {unknown}")
    return {k: _coerce(k, v) for k, v in raw.items()}


def build_config(table: str, file_values: dict[str, Any], flag_values: dict[str, Any]) -> RunConfig:
    merged: dict[str, Any] = dict(DEFAULTS.get(table, {}))
    merged.update(file_values)
    merged.update({k: _coerce(k, v) for k, v in flag_values.items() if v is not None})
    base = coupling.DEFAULT_CONSTANTS
    constants = coupling.CityConstants(
        merged.get("c1", base.c1), merged.get("c2", base.c2),
        merged.get("c3", base.c3), merged.get("c4", base.c4),
    )
    cfg = RunConfig(
        constants=constants,
        k_lo=merged.get("kmin", 1e-3),
        k_hi=merged.get("kmax", 5.0),
        points=merged.get("points", 200),
        spacing=merged.get("spacing", "log"),
        truncation_override=merged.get("modes"),
        output_path=merged.get("out"),
        format=merged.get("format", "csv"),
        workers=merged.get("workers"),
        branch=merged.get("branch", "auto"),
        k=merged.get("k", 1.0),
        x1=(merged.get("x1min", -1.0), merged.get("x1max", 1.0), merged.get("nx", 21)),
        x2=(merged.get("x2min", -1.0), merged.get("x2max", 1.0), merged.get("ny", 21)),
    )
    validate(cfg, table)
    return cfg


def validate(cfg: RunConfig, table: str) -> None:
    if table != "field":
        if not (0 < cfg.k_lo < cfg.k_hi):
            raise ConfigError(f"need 0 < kmin < kmax, got kmin={cfg.k_lo!r}, kmax={cfg.k_hi!r}")
        if cfg.points < 2:
            raise ConfigError(f"points must be at least 2, got {cfg.points}")
    if cfg.spacing not in ("linear", "log"):
        raise ConfigError(f"spacing must be 'linear' or 'log', got {cfg.spacing!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {cfg.format!r}")
    if cfg.branch not in ("auto", "low", "high"):
        raise ConfigError(f"branch must be 'auto', 'low' or 'high', got {cfg.branch!r}")
    M = cfg.truncation_override
    if M is not None and not (screen_bie.M_MIN <= M <= screen_bie.M_MAX):
        raise ConfigError(f"modes (truncation) must lie in [{screen_bie.M_MIN}, {screen_bie.M_MAX}], got {M}")
    if cfg.workers is not None and cfg.workers < 1:
        raise ConfigError(f"workers must be positive, got {cfg.workers}")
    if table == "field":
        if not cfg.k > 0:
            raise ConfigError(f"k must be positive, got {cfg.k!r}")
        for name, (lo, hi, n) in (("x1", cfg.x1), ("x2", cfg.x2)):
            if n < 1 or (n > 1 and not lo < hi):
                raise ConfigError(f"bad {name} grid ({lo}, {hi}, {n})")


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def fmt(x: float) -> str:
    return "%.17g" % x


def render_csv(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _json_text(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)) and not isinstance(obj, float):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        if not math.isfinite(obj):
            return "null"
        return fmt(float(obj))
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_json_text(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render_json(obj: Any) -> str:
    return _json_text(obj) + "\n"


def render_table(header: Sequence[str], rows: Sequence[Sequence[float]], format: str) -> str:
    if format == "json":
        return render_json([dict(zip(header, row)) for row in rows])
    return render_csv(header, rows)


def write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _scan(cfg: RunConfig) -> list[coupling.CouplingSample]:
    return coupling.scan(cfg.constants, cfg.k_lo, cfg.k_hi, cfg.points, cfg.spacing,
                         M=cfg.truncation_override, workers=cfg.workers)


def cmd_scan(cfg: RunConfig) -> str:
    rows = [(s.k, s.flux.real, s.flux.imag, s.gap) for s in _scan(cfg)]
    return render_table(("k", "re_flux", "im_flux", "gap"), rows, cfg.format)


def cmd_modes(cfg: RunConfig) -> str:
    samples = _scan(cfg)
    modes = coupling.find_modes(samples, cfg.constants, M=cfg.truncation_override)
    return render_json({"regime": cfg.constants.regime, "modes": [m.as_record() for m in modes]})


def _log10(x: float) -> float:
    return math.log10(x) if x > 0 else float("nan")


def cmd_asympt(which: str, cfg: RunConfig) -> str:
    samples = _scan(cfg)
    if which == "low":
        header = ("log10_k", "log10_re_flux", "log10_re_model")
        rows = [(math.log10(s.k), _log10(s.flux.real), _log10(coupling.low_freq_model(s.k).real))
                for s in samples]
    elif which == "high":
        header = ("k", "im_flux_over_k", "re_flux_over_k")
        rows = [(s.k, s.flux.imag / s.k, s.flux.real / s.k) for s in samples]
    elif which == "gap":
        header = ("log10_k", "log10_abs_gap", "log10_model")
        rows = []
        for s in samples:
            branch = cfg.branch if cfg.branch != "auto" else ("low" if s.k < 1.0 else "high")
            if branch == "low":
                model = coupling.low_gap_model(s.k, cfg.constants)
            else:
                model = abs(coupling.high_gap_model(s.k, cfg.constants))
            rows.append((math.log10(s.k), _log10(abs(s.gap)), _log10(model)))
    else:
        raise ConfigError(f"unknown table {which!r}")
    return render_table(header, rows, cfg.format)


def _axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.array([lo]) if n == 1 else np.linspace(lo, hi, n)


def field_points(cfg: RunConfig) -> np.ndarray:
    """Grid points in row-major ``(x2, x1)`` order, minus the band around the segment."""
    xs, ys = _axis(*cfg.x1), _axis(*cfg.x2)
    pts = [(x1, x2) for x2 in ys for x1 in xs
           if screen_bie.distance_to_segment(x1, x2) >= FIELD_BAND]
    return np.array(pts, dtype=float).reshape(-1, 2)


def cmd_field(cfg: RunConfig) -> str:
    M = cfg.truncation_override or screen_bie.default_truncation(cfg.k)
    density = screen_bie.solve_density(cfg.k, M)
    pts = field_points(cfg)
    values = screen_bie.evaluate_field_many(density, pts) if len(pts) else np.zeros(0, complex)
    rows = [(p[0], p[1], u.real, u.imag) for p, u in zip(pts, values)]
    return render_table(("x1", "x2", "re_u", "im_u"), rows, cfg.format)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON file with option values")
    for name in ("c1", "c2", "c3", "c4"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--kmin", type=float)
    p.add_argument("--kmax", type=float)
    p.add_argument("--points", type=int)
    p.add_argument("--spacing", choices=("linear", "log"))
    p.add_argument("--modes", type=int, help="Chebyshev truncation order M (default max(32, ceil(4k)))")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, help="threads for the k-scan")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="citymodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("scan", help="gap F(k) on a grid"))
    _add_common(sub.add_parser("modes", help="refined roots of F"))
    p = sub.add_parser("asympt", help="asymptotic diagnostic tables")
    p.add_argument("table", choices=("low", "high", "gap"))
    p.add_argument("--branch", choices=("auto", "low", "high"), help="gap model branch")
    _add_common(p)
    p = sub.add_parser("field", help="field map on a rectangular grid")
    _add_common(p)
    p.add_argument("--k", type=float)
    for name in ("x1min", "x1max", "x2min", "x2max"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--nx", type=int)
    p.add_argument("--ny", type=int)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k in CONFIG_KEYS}
    table = args.table if args.command == "asympt" else args.command
    try:
        file_values = load_config_file(args.config) if args.config else {}
        cfg = build_config(table, file_values, flags)
    except ConfigError as exc:
        print(f"citymodes: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"citymodes: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "scan":
            text = cmd_scan(cfg)
        elif args.command == "modes":
            text = cmd_modes(cfg)
        elif args.command == "asympt":
            text = cmd_asympt(args.table, cfg)
        else:
            text = cmd_field(cfg)
    except (screen_bie.SingularSystemError, specfun.SpecialOverflowError, ArithmeticError, ValueError) as exc:
        print(f"citymodes: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        write_atomic(cfg.output_path, text)
    except OSError as exc:
        print(f"citymodes: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main() -> None:
    sys.exit(run())
