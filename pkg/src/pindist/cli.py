"""Command-line entry point: ``pindist {field-info,verify,sweep,experiment}``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import PindistError
from .field import make_field
from .generators import GENERATOR_ID, RandomSpec, generate, parse
from .pinned import (BACKENDS, THREADS_ENV, avpin_rhs_scaled, default_threads, distance_set_mask, sweep,
                     write_sweep_csv)
from .points import DEFAULT_CAP
from .verify import (SCHEMA, RationalParam, VerificationReport, bisector_check, corollary_check,
                     field_axioms_check, good_pin_mask, main_theorem_check, pigeonhole_audit, pinform_check)

# checks that enumerate every field triple or every pair of points
AXIOM_CHECK_MAX_Q = 49
BISECTOR_CHECK_MAX_POINTS = 1024
DFT_AUTO_THRESHOLD = 1 << 16


@dataclass
class RunConfig:
    command: str
    p: int
    k: int
    d: int
    set_spec: str
    a_num: int
    a_den: int
    backend: str
    cap: int
    threads: int
    threads_env: str | None
    seed: int | None = None
    trials: int | None = None
    sizes: list[int] | None = None
    out_path: str | None = None


def _config(args, command: str) -> RunConfig:
    a = RationalParam.parse(args.a)
    return RunConfig(
        command=command, p=args.p, k=args.k, d=args.d,
        set_spec=parse(args.set).render() if getattr(args, "set", None) else "",
        a_num=a.num, a_den=a.den, backend=args.backend or _auto_backend(args.p, args.k, args.d), cap=args.cap,
        threads=args.threads if args.threads is not None else default_threads(),
        threads_env=os.environ.get(THREADS_ENV),
        seed=getattr(args, "seed", None), trials=getattr(args, "trials", None),
        sizes=getattr(args, "sizes", None), out_path=args.out,
    )


def _auto_backend(p: int, k: int, d: int) -> str:
    # resolved up front so the recorded config replays with the same backend
    return "dft" if k == 1 and p**d >= DFT_AUTO_THRESHOLD else "naive"


def _write_report(report: VerificationReport, out_dir: Path | None) -> None:
    if out_dir is None:
        return
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / f"{report.check}.json").write_text(report.to_json() + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_field_info(args) -> int:
    F = make_field(args.p, args.k)
    info = F.describe()
    info["tables"] = F.has_tables
    info["schema"] = SCHEMA
    print(json.dumps(info, indent=2))
    return 0


def cmd_verify(args) -> int:
    cfg = _config(args, "verify")
    F = make_field(cfg.p, cfg.k)
    a = RationalParam(cfg.a_num, cfg.a_den)
    E = generate(F, cfg.d, cfg.set_spec, cfg.cap)
    res = sweep(E, cfg.backend, cfg.cap, cfg.threads)
    out_dir = Path(cfg.out_path) if cfg.out_path else None

    reports: list[VerificationReport] = []
    if F.q <= AXIOM_CHECK_MAX_Q:
        reports.append(field_axioms_check(F))
    reports.append(pigeonhole_audit(E, a, res, cfg.set_spec))
    reports.append(main_theorem_check(E, a, res, cfg.set_spec))
    reports.append(pinform_check(E, res, cfg.set_spec))
    if E.size >= F.q:
        reports.append(corollary_check(E, a, res, cfg.set_spec, threads=cfg.threads))
    if F.q**cfg.d <= BISECTOR_CHECK_MAX_POINTS:
        reports.append(bisector_check(F, cfg.d, cfg.set_spec))

    first_failure = None
    for report in reports:
        report.config = asdict(cfg)
        if report.field.get("d") is None:
            report.field["d"] = cfg.d
        report.set_spec = report.set_spec or cfg.set_spec
        _write_report(report, out_dir)
        print(report.summary())
        if not report.passed and first_failure is None:
            first_failure = report
    if first_failure is not None:
        print(first_failure.to_json(), file=sys.stderr)
        return 1
    return 0


def cmd_sweep(args) -> int:
    cfg = _config(args, "sweep")
    F = make_field(cfg.p, cfg.k)
    E = generate(F, cfg.d, cfg.set_spec, cfg.cap)
    res = sweep(E, cfg.backend, cfg.cap, cfg.threads)
    total = res.total()
    expected = avpin_rhs_scaled(F.q, cfg.d, E.size)
    summary = {
        "schema": SCHEMA,
        "check": "sweep",
        "field": {"p": F.p, "k": F.k, "d": cfg.d},
        "set_spec": cfg.set_spec,
        "set_size": E.size,
        "backend": res.backend,
        "total_second_moment": total,
        "avpin_rhs_scaled": expected,
        "passed": total == expected,
        "generator": GENERATOR_ID,
        "config": asdict(cfg),
    }
    if cfg.out_path:
        out = Path(cfg.out_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        write_sweep_csv(out, res)
        out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        write_sweep_csv(sys.stdout, res)
        print(json.dumps(summary, sort_keys=True), file=sys.stderr)
    return 0 if summary["passed"] else 1


EXPERIMENT_HEADER = ["size", "trial", "seed", "set_spec", "set_size", "distance_set_size", "pins",
                     "pin_success_count", "pin_success_fraction", "good_pin_count", "good_pin_fraction",
                     "good_pin_bound_ok"]


def cmd_experiment(args) -> int:
    cfg = _config(args, "experiment")
    F = make_field(cfg.p, cfg.k)
    a = RationalParam(cfg.a_num, cfg.a_den)
    space = F.q**cfg.d
    backend = cfg.backend
    fh = open(cfg.out_path, "w", newline="") if cfg.out_path else sys.stdout
    ok = True
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EXPERIMENT_HEADER)
        for size in cfg.sizes:
            for trial in range(cfg.trials):
                seed = cfg.seed + trial
                spec = RandomSpec(size, seed).render()
                E = generate(F, cfg.d, spec, cfg.cap)
                res = sweep(E, backend, cfg.cap, cfg.threads)
                success = int(np.count_nonzero(2 * a.num * res.pinned_counts >= a.den * F.q))
                good = int(np.count_nonzero(good_pin_mask(E, a, res)))
                bound_ok = a.num * good >= (a.num - a.den) * space
                ok &= bound_ok
                writer.writerow([size, trial, seed, spec, E.size,
                                 int(np.count_nonzero(distance_set_mask(E, cfg.threads))), space,
                                 success, repr(success / space), good, repr(good / space), bound_ok])
    finally:
        if cfg.out_path:
            fh.close()
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _sizes(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"sizes must be comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pindist", description="Pinned distance sets over finite fields.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, need_set=True):
        sp.add_argument("--p", type=int, required=True, help="odd prime characteristic")
        sp.add_argument("--k", type=int, default=1, help="extension degree")
        sp.add_argument("--d", type=int, default=2, help="dimension")
        if need_set:
            sp.add_argument("--set", required=True, help="set spec, e.g. full or random:20:seed=1")
        sp.add_argument("--a", default="2/1", help="parameter a > 1 as num/den")
        sp.add_argument("--backend", choices=BACKENDS, default=None,
                        help="sweep backend (default: dft for prime q with q^d >= 2^16)")
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="maximum q^d")
        sp.add_argument("--threads", type=int, default=None, help=f"worker threads (default ${THREADS_ENV} or 1)")
        sp.add_argument("--seed", type=int, default=None, help="seed base for experiments")

    fi = sub.add_parser("field-info", help="describe F_q")
    fi.add_argument("--p", type=int, required=True)
    fi.add_argument("--k", type=int, default=1)
    fi.set_defaults(func=cmd_field_info)

    v = sub.add_parser("verify", help="run every verifier on one set and write JSON reports")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="per-pin second moments as CSV")
    common(s)
    s.set_defaults(func=cmd_sweep)

    e = sub.add_parser("experiment", help="random-set trials, one CSV row per (size, trial)")
    common(e, need_set=False)
    e.add_argument("--trials", type=int, default=10)
    e.add_argument("--sizes", type=_sizes, required=True, help="comma-separated set sizes")
    e.set_defaults(func=cmd_experiment, seed=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PindistError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
