"""Command-line front end: suite selection, execution, structured reports.

Exit codes: 0 when every asserted inequality in the selected suites passes,
1 on an assertion failure, 2 on numerical non-convergence, 64 on usage
errors.  Reports are JSON (schema_version "1") or a flattened CSV of the
cases; for a fixed argv and seed the bytes are identical run to run, so no
timestamps or environment data appear anywhere.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import harness
from .decomposition import DecompositionParams
from .errors import NonConvergenceError
from .multipliers import make_phi

USAGE_EXIT = 64
SCHEMA_VERSION = "1"

SUITE_NAMES = (
    "semigroup", "kernel", "hypercontractivity", "decomposition",
    "tent", "annuli", "spectral-gap", "pi3",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        sys.exit(USAGE_EXIT)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ouharm", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add_common(p):
        p.add_argument("--delta", type=float, default=1.0 / 128.0)
        p.add_argument("--delta-prime", type=float, default=1.0 / 128.0)
        p.add_argument("--kappa", type=float, default=4.0)
        p.add_argument("--tau", type=float, default=1.0)
        p.add_argument("--p", type=float, action="append", default=None,
                       help="integrability exponent; repeatable")
        p.add_argument("--eps-maximal", type=float, default=1.0 / 64.0)
        p.add_argument("--seed", type=int, default=7)
        p.add_argument("--tol", type=float, default=1e-7)
        p.add_argument("--deg-max", type=int, default=16)
        p.add_argument("--trials", type=int, default=None,
                       help="bank size for randomized suites")
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("json", "csv"), default="json")

    verify = sub.add_parser("verify", help="run one verification suite")
    verify.add_argument("suite", choices=SUITE_NAMES)
    add_common(verify)

    report = sub.add_parser("report", help="run suites and emit a combined report")
    report.add_argument("scope", choices=("all",))
    add_common(report)
    return parser


def _validate(args) -> list:
    problems = []
    if not args.delta > 0:
        problems.append("--delta must be positive")
    if not args.delta_prime > 0:
        problems.append("--delta-prime must be positive")
    if args.kappa < 1:
        problems.append("--kappa must be at least 1")
    if not args.tol > 0:
        problems.append("--tol must be positive")
    if not 0 < args.eps_maximal <= 1:
        problems.append("--eps-maximal must lie in (0, 1]")
    if args.deg_max < 1:
        problems.append("--deg-max must be at least 1")
    for p in args.p or []:
        if not 1.0 <= p:
            problems.append(f"--p must be >= 1, got {p}")
    if args.trials is not None and args.trials < 1:
        problems.append("--trials must be positive")
    return problems


def _run_suites(names, args):
    params = DecompositionParams(delta=args.delta, delta_prime=args.delta_prime,
                                 kappa=args.kappa, t_tol=args.tol)
    p_list = tuple(args.p) if args.p else None
    reports = []
    for name in names:
        if name == "semigroup":
            reports.append(harness.semigroup_suite(
                seed=args.seed, trials=args.trials or 500,
                eps_maximal=args.eps_maximal))
        elif name == "kernel":
            reports.append(harness.kernel_suite(seed=args.seed))
        elif name == "hypercontractivity":
            reports.append(harness.hypercontractivity_suite(
                seed=args.seed, trials=args.trials or 1000,
                p_list=p_list or (1.5, 2.0)))
        elif name == "decomposition":
            reports.append(harness.decomposition_suite(params, tau=args.tau))
        elif name == "tent":
            reports.append(harness.tent_suite(params, seed=args.seed))
        elif name == "annuli":
            reports.append(harness.annuli_geometry_suite(seed=args.seed))
            reports.append(harness.ondiagonal_suite(
                params, p=(p_list or (1.5,))[0], seed=args.seed))
            reports.append(harness.offdiagonal_suite(
                params, p=(p_list or (1.5,))[0], seed=args.seed))
        elif name == "spectral-gap":
            reports.append(harness.spectral_gap_suite(
                p_list=p_list or (1.25, 1.5), seed=args.seed,
                trials=args.trials or 200))
        elif name == "pi3":
            reports.append(harness.pi3_pointwise_suite(
                params, make_phi("damped_imaginary", tau=args.tau),
                seed=args.seed))
        else:  # pragma: no cover - argparse restricts choices
            raise ValueError(f"unknown suite {name}")
    return params, reports


def _plain(value):
    """Recursively convert numpy scalars/containers for stable JSON output."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _render_json(payload) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def _render_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["suite", "case", "kind", "passed", "computed", "bound",
                     "ratio", "slack", "inputs"])
    for rep in reports:
        for case in rep.cases:
            writer.writerow([
                rep.suite,
                case.get("case", ""),
                case.get("kind", ""),
                case.get("passed", ""),
                case.get("computed", ""),
                case.get("bound", ""),
                case.get("ratio", ""),
                case.get("slack", ""),
                json.dumps(_plain(case.get("inputs", {})), sort_keys=True),
            ])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return USAGE_EXIT

    problems = _validate(args)
    if problems:
        for message in problems:
            sys.stderr.write(f"error: {message}\n")
        return USAGE_EXIT

    params_preview = DecompositionParams(delta=args.delta, delta_prime=args.delta_prime,
                                         kappa=args.kappa, t_tol=args.tol)
    warnings = params_preview.constraint_flags()
    for w in warnings:
        sys.stderr.write(f"warning: {w}; suites still run\n")

    names = [args.suite] if args.command == "verify" else list(SUITE_NAMES)
    try:
        _, reports = _run_suites(names, args)
    except NonConvergenceError as exc:
        sys.stderr.write(f"numerical non-convergence: {exc}\n")
        return 2

    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": " ".join(names),
        "config": {
            "delta": args.delta,
            "delta_prime": args.delta_prime,
            "kappa": args.kappa,
            "tau": args.tau,
            "p": args.p,
            "eps_maximal": args.eps_maximal,
            "seed": args.seed,
            "tol": args.tol,
            "deg_max": args.deg_max,
            "constraint_flags": warnings,
        },
        "reports": [rep.to_dict() for rep in reports],
    }
    text = _render_json(payload) if args.format == "json" else _render_csv(reports)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if all(rep.passed for rep in reports) else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
