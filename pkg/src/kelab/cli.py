"""Command-line harness.

    kelab run <suite> [--domain KIND] [--p P --q Q | --m M | --n N]
                      [--ricci K] [--samples N] [--seed S] [--tol T]
                      [--out PATH]
    kelab run-all [--config PATH] [--jobs J] [--out DIR]
    kelab list

Exit codes: 0 all checks passed, 1 a verification failed, 2 usage or
configuration error.  The environment variable KELAB_SEED overrides the
seed when no --seed is given.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import KelabError
from .suites import SUITES, default_config, run_all, run_suite, summary_dict

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="kelab",
        description="verification suites for Kaehler-Einstein potentials "
                    "on model domains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one named suite")
    run.add_argument("suite", choices=sorted(SUITES))
    run.add_argument("--domain", help="domain kind (ball, polydisc, type1, "
                                      "type2, type3, type4)")
    run.add_argument("--p", type=int)
    run.add_argument("--q", type=int)
    run.add_argument("--m", type=int)
    run.add_argument("--n", type=int)
    run.add_argument("--ricci", type=float, help="Ricci constant K")
    run.add_argument("--samples", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--tol", type=float)
    run.add_argument("--out", type=Path, help="write the JSON report here")

    runall = sub.add_parser("run-all", help="run every suite")
    runall.add_argument("--config", type=Path,
                        help="JSON config {seed, suites: {name: {...}}}")
    runall.add_argument("--jobs", type=int, default=1)
    runall.add_argument("--out", type=Path, default=Path("reports"),
                        help="directory for per-suite reports (default ./reports)")

    sub.add_parser("list", help="print suites and what they check")
    return parser


def _domain_config(args) -> dict | None:
    if args.domain is None:
        return None
    kind = args.domain.lower()
    if kind == "ball":
        return {"kind": "ball", "n": args.n or 2}
    if kind == "polydisc":
        return {"kind": "polydisc", "r": args.n or 2}
    if kind == "type1":
        if args.p is None or args.q is None:
            raise KelabError("type1 needs --p and --q")
        return {"kind": "type1", "p": args.p, "q": args.q}
    if kind in ("type2", "type3", "type4"):
        if args.m is None:
            raise KelabError(f"{kind} needs --m")
        return {"kind": kind, "m": args.m}
    raise KelabError(f"unknown domain kind {args.domain!r}")


def _seed_of(args) -> int | None:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("KELAB_SEED")
    return int(env) if env else None


def _cmd_run(args) -> int:
    config = {}
    dom = _domain_config(args)
    if dom:
        config["domain"] = dom
    seed = _seed_of(args)
    if seed is not None:
        config["seed"] = seed
    for key, val in (("samples", args.samples), ("tol", args.tol),
                     ("ricci", args.ricci)):
        if val is not None:
            config[key] = val
    if args.n is not None:
        config["n"] = args.n
    report = run_suite(args.suite, config)
    text = report.to_json()
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n")
        print(f"[{report.suite}] pass={report.passed} "
              f"max_residual={report.max_residual:.3e} -> {args.out}")
    else:
        print(text)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_run_all(args) -> int:
    if args.config is not None:
        if not args.config.exists():
            raise KelabError(f"config file {args.config} not found")
        try:
            config = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise KelabError(f"config file {args.config} is not valid JSON: {exc}")
    else:
        config = default_config()
    env_seed = os.environ.get("KELAB_SEED")
    if env_seed and "seed" not in config:
        config["seed"] = int(env_seed)
    out_dir = args.out
    out_dir.mkdir(parents=True, exist_ok=True)
    reports, ok = run_all(config, out_dir=out_dir, jobs=max(1, args.jobs))
    for report in reports:
        path = out_dir / f"{report.suite}.json"
        path.write_text(report.to_json() + "\n")
        status = "pass" if report.passed else "FAIL"
        print(f"[{report.suite:>16}] {status}  max_residual="
              f"{report.max_residual:.3e}  ({report.runtime_ms} ms)")
    summary = summary_dict(reports)
    (out_dir / "summary.json").write_text(
        json.dumps(summary, sort_keys=True, indent=2) + "\n"
    )
    print(f"summary -> {out_dir / 'summary.json'}")
    if not ok:
        failing = [r.suite for r in reports if not r.passed]
        print(f"failing suites: {', '.join(failing)}", file=sys.stderr)
    return EXIT_PASS if ok else EXIT_FAIL


def _cmd_list() -> int:
    for name in sorted(SUITES):
        _, desc, ops = SUITES[name]
        print(f"{name:>16}  {desc}")
        print(f"{'':>16}  operations: {', '.join(ops)}")
    return EXIT_PASS


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "run-all":
            return _cmd_run_all(args)
        return _cmd_list()
    except KelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
