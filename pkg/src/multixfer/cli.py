"""Command-line interface: ``multixfer {classify,estimate,transfer,verify,report}``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import DomainError, InvariantViolation

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("MULTIXFER_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multixfer",
                                     description="Transference experiments for multilinear multipliers.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("classify", "report which periodic boundedness criteria apply to a symbol"),
                        ("estimate", "lower-estimate an operator quasi-norm"),
                        ("transfer", "run a periodic-versus-line transference report")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="JSON experiment description")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--jobs", type=int, default=_default_jobs(),
                       help="worker threads for restarts (default: $MULTIXFER_JOBS or 1)")
        p.add_argument("--timing", action="store_true",
                       help="fill runtime_ms (breaks byte-identical reruns)")
    v = sub.add_parser("verify", help="run the acceptance suite")
    v.add_argument("--out", default=None, help="also write acceptance.csv here")
    r = sub.add_parser("report", help="re-render a JSON report as CSV")
    r.add_argument("input", help="report.json produced by a previous run")
    r.add_argument("--out", default=None, help="output directory (default: alongside the input)")
    return parser


def _run_task(args) -> int:
    from .harness import emit_report, load_config, run_experiment

    cfg = load_config(args.config)
    if cfg["task"] != args.command and not (args.command == "estimate" and cfg["task"] in ("mz", "deperiodize")):
        print(f"error: config task {cfg['task']!r} does not match subcommand {args.command!r}",
              file=sys.stderr)
        return EXIT_CONFIG
    results = run_experiment(cfg, seed=args.seed, jobs=args.jobs, timing=args.timing)
    jpath, cpath = emit_report(results, args.out)
    ok = all(r["pass"] for r in results)
    for r in results:
        print(f"{r['task']} {r['symbol_id']}: value={r['value']} rho={r['rho']} pass={r['pass']}")
    print(f"wrote {jpath} and {cpath}")
    return EXIT_OK if ok else EXIT_FAIL


def _verify(args) -> int:
    from .acceptance import run_all

    results = run_all(verbose=True)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "acceptance.csv"), "w", encoding="utf-8") as fh:
            fh.write("criterion,name,pass,seconds,budget\n")
            for r in results:
                fh.write(f"{r.number},{r.name},{str(r.passed).lower()},{r.seconds:.3f},{r.budget:g}\n")
    n_ok = sum(r.passed for r in results)
    print(f"{n_ok}/{len(results)} criteria passed")
    return EXIT_OK if n_ok == len(results) else EXIT_FAIL


def _report(args) -> int:
    from .harness import render_csv

    with open(args.input, encoding="utf-8") as fh:
        doc = json.load(fh)
    out_dir = args.out or os.path.dirname(os.path.abspath(args.input))
    os.makedirs(out_dir, exist_ok=True)
    stem = os.path.splitext(os.path.basename(args.input))[0]
    path = os.path.join(out_dir, f"{stem}.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(render_csv(doc.get("results", [])))
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify":
            return _verify(args)
        if args.command == "report":
            return _report(args)
        return _run_task(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
