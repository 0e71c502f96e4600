"""Command-line front end: ``debategame solve|verify|sweep|simulate CONFIG``.

Exit codes: 0 success, 1 a verification check failed, 2 bad input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config_io import config_from_dict, config_to_dict, load_config
from .equilibrium import (
    classify_equilibrium,
    sequence_invariance_check,
    threshold_consistency_scan,
)
from .errors import ConfigError, DebateGameError, DomainError, NumericError
from .informativeness import classify_debate, informativeness_thresholds
from .montecarlo import SCENARIOS, SimulationSpec, oracle_check, simulate_election
from .payoffs import BeliefState, challenger_debate_payoff, payoff_matrix
from .posterior import check_posterior_signal, posterior_means

SCHEMA_VERSION = "1.0"
EXIT_OK, EXIT_CHECK_FAILED, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_ORACLE_N = 10**6


def schema_path() -> Path:
    return Path(__file__).with_name("report_schema.json")


def _plain(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _report(command, config, results, started, timing):
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": config_to_dict(config),
        "results": results,
    }
    if timing:
        report["duration_s"] = time.perf_counter() - started
    return json.dumps(_plain(report), indent=2, allow_nan=False) + "\n"


# --------------------------------------------------------------------------- commands


def cmd_solve(args) -> int:
    started = time.perf_counter()
    config = load_config(args.config)
    results = classify_equilibrium(config).to_dict()
    results["posterior"] = posterior_means(config).to_dict()
    results["payoff_matrix"] = payoff_matrix(config).to_dict()
    _emit(_report("solve", config, results, started, args.timing), args.out)
    return EXIT_OK


def _run_check(name, fn):
    try:
        status, detail = fn()
    except DebateGameError as exc:
        status, detail = "fail", {"error": f"{type(exc).__name__}: {exc}"}
    return {"name": name, "status": status, "detail": detail}


def cmd_verify(args) -> int:
    started = time.perf_counter()
    # The contest success function is checked here rather than at load time so
    # that a violation is reported as a failing check.
    config = load_config(args.config, check_csf=False)

    def csf():
        report = config.validate_csf()
        return ("pass" if report.passed else "fail"), report.to_dict()

    def posterior_signal():
        report = check_posterior_signal(config)
        return ("pass" if report.passed else "fail"), report.to_dict()

    def pooling():
        report = threshold_consistency_scan(config, max_workers=args.workers)
        return ("pass" if report.only_always_P else "fail"), report.to_dict()

    def invariance():
        report = sequence_invariance_check(config)
        if report.refused:
            return "skipped", report.to_dict()
        return ("pass" if report.passed else "fail"), report.to_dict()

    def thresholds():
        pair = informativeness_thresholds(config)
        mean = config.prior.mean
        ok = (pair.q_L is not None and pair.q_H is not None and 0 < pair.q_L < mean < pair.q_H
              and pair.continuity_ok)
        return ("pass" if ok else "fail"), pair.to_dict()

    def oracle():
        report = oracle_check(config, args.n, args.seed, workers=args.workers)
        return ("pass" if report.passed else "fail"), report.to_dict()

    checks = [
        _run_check("validate_csf", csf),
        _run_check("posterior_signal", posterior_signal),
        _run_check("threshold_consistency_scan", pooling),
        _run_check("sequence_invariance_check", invariance),
        _run_check("informativeness_thresholds", thresholds),
        _run_check("oracle_check", oracle),
    ]
    failed = [c["name"] for c in checks if c["status"] == "fail"]
    results = {"passed": not failed, "failed": failed, "checks": checks}
    _emit(_report("verify", config, results, started, args.timing), args.out)
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _parse_range(text: str):
    try:
        a, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"expected a:b, got {text!r}", "--range") from None
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ConfigError("range ends must be finite", "--range")
    return a, b


def _sweep_config(doc, param, value):
    doc = json.loads(json.dumps(doc))
    if param == "q_I":
        doc["q_I"] = value
    else:
        name = param.split(".", 1)[1]
        if doc["prior"]["family"] == "discrete" or name not in doc["prior"].get("params", {}):
            raise ConfigError(f"prior has no parameter {name!r} to sweep", "--param")
        doc["prior"]["params"][name] = value
    return config_from_dict(doc)


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    a, b = _parse_range(args.range)
    if args.steps < 1:
        raise ConfigError("steps must be at least 1", "--steps")
    param = args.param
    if param not in ("q_I", "q_C") and not param.startswith("prior."):
        raise ConfigError("expected q_I, q_C or prior.<name>", "--param")
    grid = np.linspace(a, b, args.steps) if args.steps > 1 else np.array([a])

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [param, "margin", "regime", "debate_value", "no_debate_value"]
    if param == "q_C":
        if a < 0 or b < 0:
            raise DomainError("q_C range must be nonnegative")
        header += ["challenger_debate_payoff", "debate_error", "no_debate_error", "label"]
        outcome = classify_equilibrium(config)
        full = BeliefState.full(config.prior)
        base = [outcome.margin, outcome.regime, outcome.debate_value, outcome.no_debate_value]
        writer.writerow(header)
        for q in grid:
            info = classify_debate(float(q), config)
            payoff = challenger_debate_payoff(float(q), full, config)
            writer.writerow([repr(float(q)), *map(_cell, base), repr(payoff), repr(info.debate_error),
                             repr(info.no_debate_error), info.label])
    else:
        doc = config_to_dict(config)
        writer.writerow(header)
        for value in grid:
            outcome = classify_equilibrium(_sweep_config(doc, param, float(value)))
            writer.writerow([repr(float(value)), repr(outcome.margin), outcome.regime,
                             repr(outcome.debate_value), repr(outcome.no_debate_value)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def _cell(x):
    return x if isinstance(x, str) else repr(x)


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    config = load_config(args.config)
    spec = SimulationSpec(args.scenario, args.n, args.seed, args.q_C)
    result = simulate_election(spec, config, workers=args.workers)
    _emit(_report("simulate", config, result.to_dict(), started, args.timing), args.out)
    return EXIT_OK


# --------------------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="debategame", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, timing=True):
        p.add_argument("config", help="game instance (JSON)")
        p.add_argument("--out", help="write output here instead of standard output")
        if timing:
            p.add_argument("--timing", action="store_true", help="add wall-clock duration to the report")

    p = sub.add_parser("solve", help="equilibrium regime, announcements and payoffs")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="run every structural check and the Monte Carlo oracle")
    common(p)
    p.add_argument("--n", type=int, default=DEFAULT_ORACLE_N, help="trials per simulated scenario")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="CSV table over a parameter grid")
    common(p, timing=False)
    p.add_argument("--param", required=True, help="q_I, q_C or prior.<name>")
    p.add_argument("--range", required=True, help="a:b")
    p.add_argument("--steps", type=int, default=11)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="simulate elections for one scenario")
    common(p)
    p.add_argument("--scenario", choices=SCENARIOS, required=True)
    p.add_argument("--q-C", dest="q_C", type=float, default=None, help="challenger quality (debate-conditional)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
