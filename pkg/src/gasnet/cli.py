"""Command-line front end.

Subcommands::

    gasnet riemann  --scenario s.yaml --out results/      solve one coupled
                                                          Riemann problem
    gasnet simulate --scenario s.yaml --out results/      front-tracking run
    gasnet check    --scenario s.yaml                     validate only
    gasnet diagnose --results results/records.json        re-check residuals

Exit codes: 0 success, 2 validation failure, 3 solver non-convergence,
4 I/O error.  The environment variable GASNET_LOG sets the log level.
"""

import argparse
import concurrent.futures
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .errors import GasnetError, ScenarioParseError, ScenarioValidationError
from .output import read_json, write_csv, write_json
from .scenario import parse_scenario, run_scenario

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4

log = logging.getLogger("gasnet")


def _setup_logging():
    level = os.environ.get("GASNET_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gasnet",
        description="Exact Riemann and coupling solvers for gas flow at "
                    "pipeline junctions, with a wave-front-tracking simulator.")
    parser.add_argument("--version", action="version", version=f"gasnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, scenario=True):
        if scenario:
            p.add_argument("--scenario", action="append", required=True,
                           metavar="PATH", help="scenario document (repeatable)")
            p.add_argument("--jobs", type=int, default=1,
                           help="run multiple scenarios in parallel workers")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default: print summary only)")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        p.add_argument("--epsilon", type=float, default=None,
                       help="override run.epsilon")
        p.add_argument("--horizon", type=float, default=None,
                       help="override run.horizon")
        p.add_argument("--tol", type=float, default=None, help="override run.tol")
        p.add_argument("--seed", type=int, default=None, help="override run.seed")

    p_riemann = sub.add_parser("riemann", help="solve the coupled Riemann problem")
    add_common(p_riemann)
    p_sim = sub.add_parser("simulate", help="wave-front-tracking simulation")
    add_common(p_sim)
    p_check = sub.add_parser("check", help="validate a scenario document")
    p_check.add_argument("--scenario", action="append", required=True, metavar="PATH")
    p_diag = sub.add_parser("diagnose", help="re-run residual diagnostics on stored output")
    p_diag.add_argument("--results", required=True, metavar="PATH",
                        help="records.json produced by riemann/simulate")
    return parser


def _apply_overrides(sc, args, mode):
    sc.run.mode = mode
    if args.epsilon is not None:
        sc.run.epsilon = args.epsilon
    if args.horizon is not None:
        sc.run.horizon = args.horizon
    if args.tol is not None:
        sc.run.tol = args.tol
    if args.seed is not None:
        sc.run.seed = args.seed


def _write_result(result, path, out_dir, fmt):
    if out_dir is None:
        json.dump(result.summary, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(path).stem
    if fmt == "csv":
        with open(out / f"{stem}.csv", "w", encoding="utf-8") as fh:
            write_csv(result.records, fh)
        with open(out / f"{stem}-summary.json", "w", encoding="utf-8") as fh:
            json.dump(result.summary, fh, indent=1)
            fh.write("\n")
    else:
        with open(out / f"{stem}.json", "w", encoding="utf-8") as fh:
            write_json(result.records, fh, result.summary)
    log.info("wrote results for %s to %s", path, out)


def _run_one(path, args, mode):
    sc = parse_scenario(path)
    _apply_overrides(sc, args, mode)
    result = run_scenario(sc)
    _write_result(result, path, args.out, args.format)
    return result


def _cmd_run(args, mode):
    paths = args.scenario
    if args.jobs > 1 and len(paths) > 1:
        codes = []
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futs = {pool.submit(_worker, p, vars(args), mode): p for p in paths}
            for fut in concurrent.futures.as_completed(futs):
                codes.append(fut.result())
        return max(codes)
    code = EXIT_OK
    for p in paths:
        code = max(code, _guard(lambda: _run_one(p, args, mode), p))
    return code


def _worker(path, argdict, mode):
    args = argparse.Namespace(**argdict)
    return _guard(lambda: _run_one(path, args, mode), path)


def _guard(fn, what):
    try:
        fn()
        return EXIT_OK
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"{what}: validation failed:", file=sys.stderr)
        for line in str(exc).split("; "):
            print(f"  {line}", file=sys.stderr)
        return EXIT_VALIDATION
    except GasnetError as exc:
        print(f"{what}: solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"{what}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def _cmd_check(args):
    code = EXIT_OK
    for path in args.scenario:
        def check():
            parse_scenario(path)
            print(f"{path}: ok")
        code = max(code, _guard(check, path))
    return code


def _cmd_diagnose(args):
    def diagnose():
        with open(args.results, "r", encoding="utf-8") as fh:
            records, summary = read_json(fh)
        if not records:
            print("no records found")
            return
        report = []
        for rec in records:
            diag = dict(rec.get("diagnostics", {}))
            entry = {"time": rec["time"]}
            for key in ("mass", "enthalpy_spread", "entropy", "V", "Q", "Y",
                        "TV", "front_count"):
                if key in diag:
                    entry[key] = diag[key]
            report.append(entry)
        json.dump({"records_checked": len(records),
                   "summary": summary, "per_snapshot": report},
                  sys.stdout, indent=1)
        sys.stdout.write("\n")
    return _guard(diagnose, args.results)


def main(argv=None):
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command in ("riemann", "simulate"):
        code = _cmd_run(args, args.command)
    elif args.command == "check":
        code = _cmd_check(args)
    else:
        code = _cmd_diagnose(args)
    return code


if __name__ == "__main__":
    sys.exit(main())
