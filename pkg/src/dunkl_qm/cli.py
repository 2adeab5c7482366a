"""Command-line front end.

Subcommands write plot-ready tables (CSV or JSON) to ``--out`` or stdout:

* ``propagator``: rows (x_a, x_b, re_K, im_K)
* ``spectrum``: rows (n, parity, E_exact, E_grid, abs_dE)
* ``wavefunctions``: rows (n, parity, x, psi)
* ``validate``: JSON report of the named checks

Exit codes: 0 success, 1 failed validation, 2 configuration error,
3 numerical failure (including ``--strict`` tolerance violations).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from importlib import resources
from typing import List, Optional, Sequence, Tuple

import jsonschema
import numpy as np

from .engine import channel_spectrum
from .errors import CausticError, ConvergenceError, DivergenceError, DomainError
from .operators import DunklParams, Grid, HalfGrid, harmonic_potential
from .propagators import ComplexTime, full_kernel
from .spectrum import spectral_lines, wavefunction_table
from .validation import check_names, run_checks

__all__ = ["RunConfig", "TimeSpec", "ConfigError", "build_parser", "resolve_config",
           "cmd_propagator", "cmd_spectrum", "cmd_wavefunctions", "cmd_validate", "main"]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

# per-command defaults: (system, grid_L, grid_M, nmax)
_DEFAULTS = {
    "propagator": ("free", 4.0, 16, 0),
    "spectrum": ("harmonic", 12.0, 2000, 8),
    "wavefunctions": ("harmonic", 6.0, 100, 4),
    "validate": ("free", 12.0, 2000, 0),
}

CSV_FLOAT = ".16e"


class ConfigError(Exception):
    """Invalid or inconsistent run configuration."""


@dataclass(frozen=True)
class TimeSpec:
    """Propagation time: real time t, or Euclidean time tau (T = -i tau)."""

    value: float
    euclidean: bool

    def complex_time(self) -> ComplexTime:
        if self.euclidean:
            return ComplexTime.euclidean(self.value)
        return ComplexTime.real(self.value)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved settings for one command."""

    command: str
    system: str
    nu: Optional[float]
    hbar: float
    mass: float
    omega: float
    time: Optional[TimeSpec]
    xa: Optional[Tuple[float, ...]]
    xb: Optional[Tuple[float, ...]]
    grid_L: float
    grid_M: int
    nmax: int
    out: Optional[str]
    format: str
    strict: bool
    tol: float
    only: Optional[Tuple[str, ...]]

    def params(self) -> DunklParams:
        return DunklParams(hbar=self.hbar, mass=self.mass, omega=self.omega, nu=self.nu)

    def summary(self) -> dict:
        """Settings echoed into JSON output (the output path is left out)."""
        data = asdict(self)
        data.pop("out")
        for key in ("xa", "xb", "only"):
            if data[key] is not None:
                data[key] = list(data[key])
        return data


def _schema(name: str) -> dict:
    text = resources.files("dunkl_qm").joinpath("schemas", name).read_text(encoding="utf-8")
    return json.loads(text)


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file whose keys override the flags")
    p.add_argument("--system", choices=["free", "harmonic"])
    p.add_argument("--nu", type=float, help="Wigner parameter, nu > -1/2")
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--omega", type=float, default=1.0)
    times = p.add_mutually_exclusive_group()
    times.add_argument("--time", type=float, help="real time T")
    times.add_argument("--tau", type=float, help="Euclidean time tau, T = -i tau")
    p.add_argument("--xa", type=_float_list, help="initial point(s), comma-separated")
    p.add_argument("--xb", type=_float_list, help="final point(s), comma-separated")
    p.add_argument("--grid-L", dest="grid_L", type=float)
    p.add_argument("--grid-M", dest="grid_M", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--strict", action="store_true", default=None)
    p.add_argument("--tol", type=float)
    p.add_argument("--only", action="append",
                   help=f"check name(s) for validate: {', '.join(check_names())}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dunkl-qm",
                                     description="Dunkl quantum-mechanics kernels and spectra")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "propagator": "kernel K(x_b, x_a; T) on points or a grid",
        "spectrum": "exact and grid oscillator energies",
        "wavefunctions": "oscillator eigenfunctions on a grid",
        "validate": "run the numerical checks and write a JSON report",
    }
    parser.subcommands = {}
    for name, text in helps.items():
        child = sub.add_parser(name, help=text, description=text)
        _add_common(child)
        parser.subcommands[name] = child
    return parser


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(data, _schema("config.schema.json"))
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config file {path} rejected: {exc.message}") from exc
    return data


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags, config-file overrides and per-command defaults."""
    values = {k: v for k, v in vars(args).items() if k not in ("config", "command")}
    if getattr(args, "config", None):
        overrides = _load_config_file(args.config)
        if "time" in overrides or "tau" in overrides:
            values["time"] = values["tau"] = None
        values.update(overrides)
    if values.get("time") is not None and values.get("tau") is not None:
        raise ConfigError("--time and --tau are mutually exclusive")
    command = args.command
    system, grid_L, grid_M, nmax = _DEFAULTS[command]
    time = None
    if values.get("time") is not None:
        time = TimeSpec(float(values["time"]), euclidean=False)
    elif values.get("tau") is not None:
        time = TimeSpec(float(values["tau"]), euclidean=True)

    def points(key):
        v = values.get(key)
        if v is None:
            return None
        return tuple(float(x) for x in (v if isinstance(v, (list, tuple)) else [v]))

    only = values.get("only")
    if only:
        only = tuple(name.strip() for item in only for name in item.split(",") if name.strip())
    config = RunConfig(
        command=command,
        system=values.get("system") or system,
        nu=None if values.get("nu") is None else float(values["nu"]),
        hbar=float(values.get("hbar", 1.0)),
        mass=float(values.get("mass", 1.0)),
        omega=float(values.get("omega", 1.0)),
        time=time,
        xa=points("xa"),
        xb=points("xb"),
        grid_L=float(grid_L if values.get("grid_L") is None else values["grid_L"]),
        grid_M=int(grid_M if values.get("grid_M") is None else values["grid_M"]),
        nmax=int(nmax if values.get("nmax") is None else values["nmax"]),
        out=values.get("out"),
        format=values.get("format") or ("json" if command == "validate" else "csv"),
        strict=bool(values.get("strict")),
        tol=float(1e-4 if values.get("tol") is None else values["tol"]),
        only=only or None,
    )
    _check_config(config)
    return config


def _check_config(config: RunConfig) -> None:
    if config.command != "validate":
        if config.nu is None:
            raise ConfigError("argument --nu is required")
        try:
            config.params()
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
    if config.grid_M < 2 or config.grid_M % 2:
        raise ConfigError(f"--grid-M must be a positive even integer, got {config.grid_M}")
    if not config.grid_L > 0:
        raise ConfigError("--grid-L must be positive")
    if config.nmax < 0:
        raise ConfigError("--nmax must be non-negative")
    if not config.tol > 0:
        raise ConfigError("--tol must be positive")
    if config.command == "propagator":
        if config.time is None:
            raise ConfigError("propagator needs --time or --tau")
        if config.time.euclidean and not config.time.value > 0:
            raise ConfigError("--tau must be positive")
        if not config.time.euclidean and config.time.value == 0:
            raise ConfigError("--time must be non-zero")
        for pts in (config.xa, config.xb):
            if pts is not None and any(x == 0 for x in pts):
                raise ConfigError("kernel points must be non-zero")
    if config.command in ("spectrum", "wavefunctions"):
        if config.system != "harmonic" or not config.omega > 0:
            raise ConfigError(f"{config.command} needs the harmonic system with omega > 0")
    if config.system == "harmonic" and not config.omega > 0:
        raise ConfigError("harmonic system needs omega > 0")
    if config.only:
        unknown = [n for n in config.only if n not in check_names()]
        if unknown:
            raise ConfigError(f"unknown check(s): {', '.join(unknown)}")


# --- output -----------------------------------------------------------------

def _format_cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), CSV_FLOAT)


def _json_number(value):
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    return value if math.isfinite(value) else None


def _render_table(command: str, config: RunConfig, columns: Sequence[str], rows) -> str:
    if config.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row])
        return buf.getvalue()
    doc = {
        "command": command,
        "config": config.summary(),
        "columns": list(columns),
        "rows": [[_json_number(v) for v in row] for row in rows],
    }
    jsonschema.validate(doc, _schema("output.schema.json"))
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _emit(text: str, config: RunConfig) -> None:
    if config.out:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands ---------------------------------------------------------------

def cmd_propagator(config: RunConfig) -> int:
    """Kernel values on the requested points; a missing side uses the grid nodes."""
    nodes = tuple(Grid(config.grid_L, config.grid_M).nodes)
    xa = np.array(config.xa if config.xa is not None else nodes)
    xb = np.array(config.xb if config.xb is not None else nodes)
    A, B = np.meshgrid(xa, xb, indexing="ij")
    K = np.asarray(full_kernel(B.ravel(), A.ravel(), config.time.complex_time(), config.params(),
                               config.system))
    if not np.all(np.isfinite(K)):
        raise ArithmeticError("kernel evaluation produced non-finite values")
    rows = [(a, b, k.real, k.imag) for a, b, k in zip(A.ravel(), B.ravel(), K.ravel())]
    _emit(_render_table("propagator", config, ("x_a", "x_b", "re_K", "im_K"), rows), config)
    return EXIT_OK


def cmd_spectrum(config: RunConfig) -> int:
    """Exact energies beside Richardson-extrapolated grid eigenvalues."""
    params = config.params()
    half = HalfGrid(config.grid_L, config.grid_M)
    V = harmonic_potential(params)
    count = config.nmax + 1
    grid = {s: channel_spectrum(s, params, half, V, count) for s in (1, -1)}
    rows = []
    for line in spectral_lines(config.nmax, params):
        e_grid = float(grid[line.s][line.n])
        rows.append((line.n, line.s, line.energy, e_grid, abs(e_grid - line.energy)))
    _emit(_render_table("spectrum", config, ("n", "parity", "E_exact", "E_grid", "abs_dE"), rows),
          config)
    worst = max(r[4] for r in rows)
    if config.strict and not worst <= config.tol:
        print(f"dunkl-qm: strict mode: max |dE| = {worst:.3e} exceeds tol {config.tol:.1e}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_wavefunctions(config: RunConfig) -> int:
    """Psi_{n,s}(x) on the symmetric grid nodes (or --xa points) for n <= nmax."""
    params = config.params()
    x = np.array(config.xa) if config.xa is not None else Grid(config.grid_L, config.grid_M).nodes
    rows = []
    for s in (1, -1):
        table = wavefunction_table(config.nmax, s, params, x)
        for n in range(config.nmax + 1):
            rows.extend((n, s, xi, psi) for xi, psi in zip(x, table[n]))
    _emit(_render_table("wavefunctions", config, ("n", "parity", "x", "psi"), rows), config)
    return EXIT_OK


def cmd_validate(config: RunConfig) -> int:
    """Run the checks; exit 0 only if all pass."""
    results = run_checks(config.only)
    checks = [{"check": r.check, "status": r.status, "measured": _json_number(r.measured),
               "tolerance": r.tolerance,
               "details": {k: _json_number(v) for k, v in r.details.items()
                           if _json_number(v) is not None}}
              for r in results]
    passed = all(r.passed for r in results)
    if config.format == "csv":
        rows = [(r.check, r.status, format(r.measured, CSV_FLOAT), format(r.tolerance, CSV_FLOAT))
                for r in results]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("check", "status", "measured", "tolerance"))
        writer.writerows(rows)
        text = buf.getvalue()
    else:
        doc = {"command": "validate", "passed": passed, "checks": checks}
        jsonschema.validate(doc, _schema("report.schema.json"))
        text = json.dumps(doc, indent=2, allow_nan=False) + "\n"
    _emit(text, config)
    for r in results:
        print(f"{r.status.upper():4s} {r.check}: measured {r.measured:.3e} "
              f"(tolerance {r.tolerance:.1e})", file=sys.stderr)
    return EXIT_OK if passed else EXIT_VALIDATION


COMMANDS = {
    "propagator": cmd_propagator,
    "spectrum": cmd_spectrum,
    "wavefunctions": cmd_wavefunctions,
    "validate": cmd_validate,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        parser.subcommands[args.command].print_usage(sys.stderr)
        print(f"dunkl-qm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[config.command](config)
    except (CausticError, ConvergenceError, DivergenceError, ArithmeticError) as exc:
        print(f"dunkl-qm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"dunkl-qm: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dunkl-qm: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
