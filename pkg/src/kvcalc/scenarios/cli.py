"""Command-line front end.

Exit codes: 0 all executed checks pass, 1 a check failed or a scenario
could not be set up, 2 usage errors (including unknown scenario names).
"""
from __future__ import annotations

import argparse
import sys

from ..fields import ProbeConfig
from .probes import ScenarioSetupError
from .runner import (
    available_scenarios,
    combined_json,
    run_all,
    run_d2_fuzz,
    run_scenario,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42,
                   help="global RNG seed (default 42)")
    p.add_argument("--samples", type=int, default=100,
                   help="sample points per probe (default 100)")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="default residual tolerance (default 1e-9)")
    p.add_argument("--format", choices=("text", "json"), default="text",
                   dest="fmt", help="output format")
    p.add_argument("--scenario-dir", default=None,
                   help="directory of extra scenario TOML files; names "
                        "shadow built-ins")
    p.add_argument("--out", default=None,
                   help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="kvcalc",
        description="Residual checks for the cochain calculus of a flat "
                    "torsion-free connection.")
    sub = top.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario, or all of them")
    p_run.add_argument("scenario", help="scenario name, or 'all'")
    _add_common(p_run)

    p_list = sub.add_parser("list", help="list known scenario names")
    p_list.add_argument("--scenario-dir", default=None)

    p_d2 = sub.add_parser(
        "d2", help="fuzz d(d theta) = 0 with random cochains")
    p_d2.add_argument("--degree", type=int, choices=(0, 1, 2), required=True)
    p_d2.add_argument("--trials", type=int, default=20)
    _add_common(p_d2)

    p_rep = sub.add_parser(
        "report", help="run every scenario and emit the aggregate report")
    _add_common(p_rep)
    return top


def _cfg(args) -> ProbeConfig:
    return ProbeConfig(samples=args.samples, tolerance=args.tol,
                       seed=args.seed)


def _emit(text: str, args):
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _reports_out(reports, args) -> int:
    if args.fmt == "json":
        _emit(combined_json(reports), args)
    else:
        body = "\n".join(r.render_text() for r in reports)
        _emit(body + "\n", args)
    ok = all(r.passed for r in reports)
    return EXIT_PASS if ok else EXIT_FAIL


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "list":
        try:
            names = available_scenarios(args.scenario_dir)
        except ScenarioSetupError as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_FAIL
        for nm in names:
            print(nm)
        return EXIT_PASS

    cfg = _cfg(args)

    if args.command == "d2":
        rep = run_d2_fuzz(args.degree, args.trials, cfg)
        if args.fmt == "json":
            import json

            _emit(json.dumps(rep.to_json_dict(), indent=2) + "\n", args)
        else:
            _emit(rep.render_text() + "\n", args)
        return EXIT_PASS if rep.passed else EXIT_FAIL

    if args.command == "report":
        try:
            reports = run_all(cfg, args.scenario_dir)
        except ScenarioSetupError as e:
            print(f"setup error: {e}", file=sys.stderr)
            return EXIT_FAIL
        return _reports_out(reports, args)

    # run
    try:
        if args.scenario == "all":
            reports = run_all(cfg, args.scenario_dir)
        else:
            try:
                reports = (run_scenario(args.scenario, cfg,
                                        args.scenario_dir),)
            except KeyError as e:
                print(f"usage error: {e.args[0]}", file=sys.stderr)
                return EXIT_USAGE
    except ScenarioSetupError as e:
        print(f"setup error: {e}", file=sys.stderr)
        return EXIT_FAIL
    return _reports_out(reports, args)


if __name__ == "__main__":
    sys.exit(main())
