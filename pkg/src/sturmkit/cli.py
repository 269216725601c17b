"""Command-line front end.

Exit codes: 0 success, 1 failed check, 2 bad input, 3 internal
inconsistency, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from . import __version__
from .core import OperatorSpec
from .deficiency import DEFAULT_LAMBDAS, InconsistencyError
from .report import to_csv, to_json
from .spectrum import ConvergenceError
from . import suites

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_INTERNAL, EXIT_IO = 0, 1, 2, 3, 4
SUBCOMMANDS = ("info", "symmetry", "deficiency", "spectrum", "convergence", "verify")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    hbar: float = 1.0
    c: float = 1.0
    v_c_override: Optional[float] = None
    lambda_grid: Tuple[float, ...] = tuple(sorted(DEFAULT_LAMBDAS))
    n_interior: int = 2000
    k_eigs: int = 10
    output_format: str = "json"
    seed: int = 0
    out: Optional[str] = None
    timing: bool = False

    def validate(self) -> "RunConfig":
        for name in ("hbar", "c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name}: must be positive, got {v!r}")
        if self.v_c_override is not None and not (
                math.isfinite(self.v_c_override) and self.v_c_override > 0):
            raise ConfigError(f"vc: must be positive, got {self.v_c_override!r}")
        if not self.lambda_grid or any(not (math.isfinite(x) and x > 0) for x in self.lambda_grid):
            raise ConfigError(f"lambda: values must be positive, got {list(self.lambda_grid)}")
        if self.n_interior < 1:
            raise ConfigError(f"grid: must be a positive integer, got {self.n_interior}")
        if not 1 <= self.k_eigs <= self.n_interior:
            raise ConfigError(
                f"k_eigs: must lie in 1..grid ({self.n_interior}), got {self.k_eigs}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"format: must be json or csv, got {self.output_format!r}")
        return self

    def operator(self) -> OperatorSpec:
        return OperatorSpec.from_constants(self.hbar, self.c, self.v_c_override)


# config-file key -> (RunConfig field, parser)
def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(sorted(set(float(t) for t in text.replace(",", " ").split())))


_KEYS = {
    "hbar": ("hbar", float),
    "c": ("c", float),
    "vc": ("v_c_override", float),
    "lambda": ("lambda_grid", _float_list),
    "grid": ("n_interior", int),
    "k_eigs": ("k_eigs", int),
    "format": ("output_format", str),
    "seed": ("seed", int),
    "out": ("out", str),
}


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        name, conv = _KEYS[key]
        try:
            values[name] = conv(value)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r}: bad value {value!r}") from exc
    return values


def _common_options() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--hbar", type=float, help="action scale (default 1)")
    p.add_argument("--c", type=float, help="speed scale (default 1)")
    p.add_argument("--vc", type=float, dest="v_c_override",
                   help="override the interval half-width v_c")
    p.add_argument("--lambda", type=float, action="append", dest="lambda_grid",
                   help="spectral parameter for deficiency checks (repeatable)")
    p.add_argument("--grid", type=int, dest="n_interior", help="interior grid points")
    p.add_argument("--k-eigs", type=int, dest="k_eigs", help="number of eigenpairs")
    p.add_argument("--format", choices=("json", "csv"), dest="output_format")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--seed", type=int, help="seed for the random test-function corpus")
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--timing", action="store_true", default=None,
                   help="include wall time in the report (breaks byte-reproducibility)")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sturmkit",
        description="Spectral checks for the Dirichlet deformation operator "
                    "pi(1 + (hbar/c)^2 d^2/dv^2) on [-v_c, v_c].")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    common = _common_options()
    helps = {
        "info": "print v_c and deformation anchors",
        "symmetry": "quadratic-form symmetry residuals",
        "deficiency": "deficiency indices on the lambda grid",
        "spectrum": "top eigenpairs of the discretized operator",
        "convergence": "grid convergence of the top eigenvalue",
        "verify": "run every check suite",
    }
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def parse_config(arguments: Sequence[str]) -> Tuple[str, RunConfig]:
    """Flags override config-file values, which override defaults."""
    args = build_parser().parse_args(list(arguments))
    values = {}
    if args.config:
        values.update(read_config_file(args.config))
    for name in ("hbar", "c", "v_c_override", "n_interior", "k_eigs",
                 "output_format", "seed", "out", "timing"):
        v = getattr(args, name)
        if v is not None:
            values[name] = v
    if args.lambda_grid:
        values["lambda_grid"] = tuple(sorted(set(args.lambda_grid)))
    return args.command, RunConfig(**values).validate()


def config_echo(config: RunConfig, spec: OperatorSpec) -> dict:
    return {
        "hbar": config.hbar,
        "c": config.c,
        "hbar2_over_c2": spec.ratio,
        "v_c": spec.v_c,
        "v_c_canonical": spec.canonical,
        "lambda_grid": list(config.lambda_grid),
        "n_interior": config.n_interior,
        "k_eigs": config.k_eigs,
        "seed": config.seed,
        "format": config.output_format,
    }


def run_subcommand(name: str, config: RunConfig) -> Tuple[dict, suites.SuiteResult, int]:
    """Build the report for ``name``; returns ``(report, suite, exit code)``."""
    spec = config.operator()
    start = time.perf_counter()
    if name == "info":
        result = suites.info_suite(spec)
    elif name == "symmetry":
        result = suites.symmetry_suite(spec, config.seed)
    elif name == "deficiency":
        result = suites.deficiency_suite(spec, config.lambda_grid)
    elif name == "spectrum":
        result = suites.spectrum_suite(spec, config.n_interior, config.k_eigs)
    elif name == "convergence":
        result = suites.convergence_suite(spec, config.n_interior)
    elif name == "verify":
        result = suites.verify_suite(spec, config.lambda_grid, config.n_interior,
                                     config.k_eigs, config.seed)
    else:
        raise ConfigError(f"unknown subcommand {name!r}")
    elapsed = time.perf_counter() - start

    passed = all(c.passed for c in result.checks)
    report = {"tool": "sturmkit", "version": __version__, "subcommand": name,
              "config": config_echo(config, spec)}
    report.update(result.payload)
    report["checks"] = [c.as_dict() for c in result.checks]
    report["verdict"] = "pass" if passed else "fail"
    if config.timing:
        report["wall_time_s"] = elapsed
    return report, result, EXIT_OK if passed else EXIT_FAILED


def emit_report(report: dict, result: suites.SuiteResult, fmt: str,
                destination: Optional[str]) -> None:
    text = to_json(report) if fmt == "json" else to_csv(result.header, result.rows)
    if destination is None or destination == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _use_color(stream) -> bool:
    return not os.environ.get("STURMKIT_NO_COLOR") and hasattr(stream, "isatty") \
        and stream.isatty()


def _summary(name: str, result: suites.SuiteResult) -> str:
    failed = [c for c in result.checks if not c.passed]
    total = len(result.checks)
    ok = not failed
    label = "PASS" if ok else "FAIL"
    if _use_color(sys.stderr):
        label = f"\033[{32 if ok else 31}m{label}\033[0m"
    lines = [f"{label} {name}: {total - len(failed)}/{total} checks passed"]
    lines += [f"  failed: {c.suite}/{c.name} value={c.value!r} {c.relation} {c.bound!r}"
              for c in failed]
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        name, config = parse_config(argv)
    except ConfigError as exc:
        print(f"sturmkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    try:
        report, result, code = run_subcommand(name, config)
    except (InconsistencyError, ConvergenceError) as exc:
        print(f"sturmkit: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        emit_report(report, result, config.output_format, config.out)
    except OSError as exc:
        print(f"sturmkit: cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    print(_summary(name, result), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
