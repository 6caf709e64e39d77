"""Command line interface: ``budget``, ``optimize`` and ``sweep``.

Exit codes:

    0  success
    2  scenario file not found
    3  scenario file is not valid JSON
    4  scenario validation failed (message names the field path)
    5  optimization did not converge (only with ``optimize --strict``)
    6  output directory not writable
    64 bad command line usage

Results go to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys

from . import experiments
from .link_budget import linear_to_db
from .optimizers import optimal_phase_ideal, optimize_stochastic
from .power_model import SampleMode, received_power
from .scenario import ScenarioError, ScenarioParseError, load_scenario

EXIT_OK = 0
EXIT_NOT_FOUND = 2
EXIT_PARSE = 3
EXIT_INVALID = 4
EXIT_NOT_CONVERGED = 5
EXIT_OUTPUT = 6
EXIT_USAGE = 64

log = logging.getLogger("ris_linkopt")

AXIS_NAMES = {"d_ru": "d_ru_m", "phi_r": "phi_r_rad", "sigma": "sigma_rad"}

SWEEPS = {
    "power_surface": ("d_ru", "phi_r"),
    "ris_vs_direct": ("d_ru",),
    "sinc": ("sigma",),
    "expected_surface": ("sigma", "phi_r"),
    "expected_vs_phase": ("sigma", "phi_r"),
    "optimal_vs_suboptimal": ("sigma",),
}

DEFAULT_AXES = {
    "power_surface": {"d_ru": (10.0, 1000.0, 100), "phi_r": (0.0, 2 * math.pi, 181)},
    "ris_vs_direct": {"d_ru": (10.0, 1000.0, 100)},
    "sinc": {"sigma": (0.0, 10.0, 501)},
    "expected_surface": {"sigma": (0.0, math.pi, 61), "phi_r": (0.0, 2 * math.pi, 181)},
    "expected_vs_phase": {"sigma": (0.0, 1.0, 3), "phi_r": (0.0, 2 * math.pi, 361)},
    "optimal_vs_suboptimal": {"sigma": (0.0, math.pi, 32)},
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(value: float):
    """JSON-safe float (non-finite becomes null)."""
    return value if math.isfinite(value) else None


def _emit(record: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(record, indent=2, sort_keys=True) + "\n")
        return
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(["field", "value"])
    for key, value in _flatten(record):
        writer.writerow([key, repr(value) if isinstance(value, float) else value])
    out.write(buf.getvalue())


def _flatten(record, prefix=""):
    if isinstance(record, dict):
        for key in sorted(record):
            yield from _flatten(record[key], f"{prefix}{key}.")
    elif isinstance(record, list):
        for i, item in enumerate(record):
            yield from _flatten(item, f"{prefix}{i}.")
    else:
        yield prefix[:-1], record


def cmd_budget(args, out) -> int:
    sf = load_scenario(args.scenario)
    scenario = sf.scenario()
    budget = scenario.budget()
    agg = scenario.aggregate()
    record = {k: _finite(v) for k, v in budget.as_dict().items()}
    record.update(
        ris_magnitude=agg.magnitude,
        ris_phase_rad=agg.phase,
        ris_elements=scenario.ris_array.size,
        wavelength_m=scenario.radio.wavelength,
        direct_power_w=budget.a_su**2,
        direct_power_dbw=_finite(linear_to_db(budget.a_su**2)),
        reflected_power_w=budget.a_ru**2,
        reflected_power_dbw=_finite(linear_to_db(budget.a_ru**2)),
    )
    _emit(record, args.output, out)
    return EXIT_OK


def cmd_optimize(args, out) -> int:
    sf = load_scenario(args.scenario)
    budget = sf.scenario().budget()
    if args.method == "ideal":
        phase = optimal_phase_ideal(budget)
        power = received_power(budget, phase)
        record = {
            "method": "ideal",
            "theta_rad": budget.theta,
            "optimal_phase_rad": phase,
            "power_w": power,
            "power_dbw": _finite(linear_to_db(power)),
        }
        _emit(record, args.output, out)
        return EXIT_OK

    mode = SampleMode.parse(args.mode)
    result = optimize_stochastic(budget, sf.error, sf.mc, sf.bfgs, mode)
    record = {
        "method": "stochastic",
        "mode": mode.value,
        "sigma_rad": sf.error.sigma,
        "samples": sf.mc.sample_count,
        "seed": sf.mc.seed,
        "ideal_phase_rad": optimal_phase_ideal(budget),
        "objective_value_dbw": _finite(linear_to_db(result.objective_value)),
        **result.to_dict(),
    }
    _emit(record, args.output, out)
    if args.strict and not result.converged:
        log.error("optimization did not converge (%s)", result.stop_reason)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _parse_axis(text: str):
    try:
        name, lo, hi, count = text.split(":")
        return name, (float(lo), float(hi), int(count))
    except ValueError:
        raise UsageError(f"bad --axis {text!r}; expected name:min:max:count") from None


def _custom_sweep(args, sf):
    kind = args.sweep
    axes = dict(DEFAULT_AXES[kind])
    for text in args.axis or []:
        name, spec = _parse_axis(text)
        if name not in SWEEPS[kind]:
            raise UsageError(f"sweep {kind} takes axes {SWEEPS[kind]}, not {name!r}")
        axes[name] = spec
    try:
        grids = {name: experiments.linear_axis(*spec) for name, spec in axes.items()}
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    scenario = sf.scenario()
    mode = SampleMode.parse(args.mode)
    if kind == "power_surface":
        result = experiments.sweep_power_surface(
            scenario, grids["d_ru"], grids["phi_r"], args.direct_path or "geometric"
        )
    elif kind == "ris_vs_direct":
        result = experiments.sweep_ris_vs_direct(
            scenario, grids["d_ru"], args.direct_path or "fixed"
        )
    elif kind == "sinc":
        result = experiments.sweep_sinc(grids["sigma"], scenario)
    elif kind == "expected_surface":
        result = experiments.sweep_expected_surface(scenario, grids["sigma"], grids["phi_r"])
    elif kind == "expected_vs_phase":
        result = experiments.sweep_expected_vs_phase(
            scenario, grids["sigma"], grids["phi_r"], sf.mc, sf.bfgs, mode
        )
    else:
        result = experiments.sweep_optimal_vs_suboptimal(
            scenario, grids["sigma"], args.estimator, sf.mc, sf.bfgs, mode
        )
    result.metadata.update(scenario=sf.to_dict(), seed=sf.mc.seed)
    result.metadata.setdefault("mode", mode.value)
    return result, kind


def cmd_sweep(args, out) -> int:
    sf = load_scenario(args.scenario)
    if args.figure is not None:
        if args.axis:
            raise UsageError("--axis only applies to --sweep")
        result = experiments.run_figure(args.figure, sf, args.mode, args.estimator)
        stem = f"figure{args.figure}"
    else:
        result, stem = _custom_sweep(args, sf)
    try:
        csv_path, json_path = result.write(args.output, stem)
    except OSError as exc:
        log.error("cannot write to %s: %s", args.output, exc)
        return EXIT_OUTPUT
    out.write(json.dumps({"csv": str(csv_path), "json": str(json_path)}, sort_keys=True) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ris-linkopt", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("budget", help="print the link budget of a scenario")
    p.add_argument("scenario")
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("optimize", help="optimize the RIS phase")
    p.add_argument("scenario")
    method = p.add_mutually_exclusive_group()
    method.add_argument("--ideal", dest="method", action="store_const", const="ideal")
    method.add_argument("--stochastic", dest="method", action="store_const", const="stochastic")
    p.set_defaults(method="ideal")
    p.add_argument("--mode", choices=[m.value for m in SampleMode], default="sampled")
    p.add_argument("--output", choices=("json", "csv"), default="json")
    p.add_argument("--strict", action="store_true", help="exit 5 if BFGS does not converge")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="write sweep tables (CSV + JSON)")
    p.add_argument("scenario")
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--figure", type=int, choices=sorted(experiments.FIGURES))
    which.add_argument("--sweep", choices=sorted(SWEEPS))
    p.add_argument("--axis", action="append", help="name:min:max:count (custom sweeps)")
    p.add_argument("--output", required=True, help="output directory")
    p.add_argument("--mode", choices=[m.value for m in SampleMode], default="sampled")
    p.add_argument("--estimator", choices=experiments.ESTIMATORS, default="closed_form")
    p.add_argument("--direct-path", choices=experiments.DIRECT_PATH_MODES, default=None)
    p.set_defaults(func=cmd_sweep)
    return parser


def _configure_logging(verbose: bool) -> None:
    for handler in list(log.handlers):
        log.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.addHandler(handler)
    log.setLevel(logging.DEBUG if verbose else logging.WARNING)
    log.propagate = False


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)
    try:
        return args.func(args, out)
    except FileNotFoundError as exc:
        log.error("scenario file not found: %s", exc.filename or exc)
        return EXIT_NOT_FOUND
    except ScenarioParseError as exc:
        log.error("%s", exc)
        return EXIT_PARSE
    except ScenarioError as exc:
        log.error("invalid scenario: %s", exc)
        return EXIT_INVALID
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
