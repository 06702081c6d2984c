"""Command line: ``phasewin {run,verify,render,gen-instance}``.

Exit codes: 0 success, 1 check or oracle failure, 2 usage or spec error.
"""
from __future__ import annotations

import argparse
import logging
import statistics
import sys
from pathlib import Path

from .. import instance_io
from ..core import ContractError, OracleError
from ..search.phasewin import PhaseWinConfig
from ..search.policies import POLICIES
from .plotting import render_curves
from .runner import (ResultRecord, build_instance, make_row, read_results, run_algorithm,
                     run_experiment, write_results)
from .spec import BASES, FAMILIES, AlgorithmSpec, ExperimentSpec, SpecError, load_spec
from .verify import SUITES, verify

log = logging.getLogger("phasewin")

OK, FAILED, USAGE = 0, 1, 2

# flag name -> PhaseWinConfig field
PHASEWIN_FLAGS = {
    "rho_sel": float, "rho_del": float, "window_size": int, "m_active": int,
    "policy": str, "anneal_p0": float, "anneal_decay": float,
    "random_sample_frac": float, "stop_tau": float, "ba_beta": float,
    "t2_gap_max": float, "baf_batch_size": int,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _phasewin_settings(args) -> dict:
    settings = {}
    for name in PHASEWIN_FLAGS:
        val = getattr(args, name, None)
        if val is not None:
            settings[name] = val
    if args.theta is not None:
        settings["theta"] = args.theta[0] if len(args.theta) == 1 else tuple(args.theta)
    if args.anneal is not None:
        settings["anneal"] = args.anneal
    return settings


def _quick_spec(args) -> ExperimentSpec:
    settings = _phasewin_settings(args)
    algos = []
    for name in args.algo or ["greedy", "phasewin"]:
        algos.append(AlgorithmSpec(name, name, settings if name == "phasewin" else {}))
    return ExperimentSpec(
        name="cli",
        family=args.family,
        m=args.m or [50],
        k=[str(v) for v in args.k] if args.k else ["m"],
        replicates=args.replicates,
        master_seed=args.seed or 0,
        algorithms=algos,
        out=args.out or "results",
    )


def _run_instance_file(args) -> list[ResultRecord]:
    inst = instance_io.load(args.instance)
    m = inst.m
    k = args.k[0] if args.k else m
    records = []
    for name in args.algo or ["greedy", "phasewin"]:
        cfg = None
        if name == "phasewin":
            cfg = PhaseWinConfig.for_size(m, k, seed=args.seed or 0, **_phasewin_settings(args))
        rep = run_algorithm(name, inst, m, k, cfg)
        row = make_row(Path(args.instance).stem, inst.family, name, args.seed or 0, m, k, rep)
        records.append(ResultRecord(row, list(rep.solution.order), list(rep.solution.step_values)))
    return records


def cmd_run(args) -> int:
    spec = None
    if args.instance:
        records = _run_instance_file(args)
    else:
        if args.spec:
            spec = load_spec(args.spec)
            if args.seed is not None:
                spec.master_seed = args.seed
        else:
            spec = _quick_spec(args)
        spec.validate()
        records = run_experiment(spec, workers=args.workers)
    out = Path(args.out or (spec.out if spec else "results"))
    paths = write_results(records, out, spec)
    print(f"{len(records)} rows -> {paths['csv']}")
    if args.plots:
        for p in render_curves(records, out, max_instances=args.max_plots):
            print(f"figure -> {p}")
    _print_summary(records)
    return OK


def _print_summary(records) -> None:
    groups: dict[str, list] = {}
    for r in records:
        groups.setdefault(r.row["instance_id"], []).append(r)
    speedups, fracs = [], []
    for recs in groups.values():
        names = {r.row["algorithm"] for r in recs}
        if "greedy" not in names or len(recs) < 2:
            continue
        g = next(r for r in recs if r.row["algorithm"] == "greedy")
        for r in recs:
            if r is g or r.row["mec"] == 0:
                continue
            speedups.append(g.row["mec"] / r.row["mec"])
            fracs.append(r.row["f_value"] / g.row["f_value"] if g.row["f_value"] else 1.0)
    if speedups:
        print(f"vs greedy: median speedup {statistics.median(speedups):.2f}x, "
              f"mean F ratio {statistics.fmean(fracs):.4f} over {len(speedups)} runs")


def cmd_verify(args) -> int:
    failed = False
    for suite in args.suite:
        print(f"[{suite}]")
        for check in verify(suite):
            print("  " + check.line())
            failed |= not check.passed
    return FAILED if failed else OK


def cmd_render(args) -> int:
    records = read_results(args.results)
    src = Path(args.results)
    out = args.out or (src if src.is_dir() else src.parent)
    paths = render_curves(records, out, max_instances=args.max_plots)
    for p in paths:
        print(f"figure -> {p}")
    return OK


def cmd_gen_instance(args) -> int:
    inst = build_instance(args.family, args.seed or 0, args.m[0] if args.m else 50)
    if args.out:
        instance_io.save(inst, args.out)
        print(f"{inst.family} instance (m={inst.m}) -> {args.out}")
    else:
        sys.stdout.write(instance_io.dumps(inst))
    return OK


def _add_common(p):
    p.add_argument("--family", choices=FAMILIES, default="surrogate")
    p.add_argument("--m", type=int, nargs="+", help="candidate count(s)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--out", help="output directory or file")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="phasewin", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run algorithms and write CSV/JSON results")
    run.add_argument("--spec", help="experiment spec (INI or JSON)")
    run.add_argument("--instance", help="run on a saved instance file instead of a sweep")
    _add_common(run)
    run.add_argument("--k", type=int, nargs="+")
    run.add_argument("--replicates", type=int, default=1)
    run.add_argument("--algo", nargs="+", choices=BASES)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--plots", action="store_true", help="also render SVG figures into --out")
    run.add_argument("--max-plots", type=int, default=6, help="cap on per-instance curve plots")
    for name, typ in PHASEWIN_FLAGS.items():
        kw = {"choices": POLICIES} if name == "policy" else {}
        run.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, **kw)
    run.add_argument("--theta", type=float, nargs="+", help="per-phase supervision coefficients")
    run.add_argument("--anneal", dest="anneal", action="store_true", default=None)
    run.add_argument("--no-anneal", dest="anneal", action="store_false")
    run.set_defaults(func=cmd_run)

    ver = sub.add_parser("verify", help="run built-in invariant suites")
    ver.add_argument("suite", nargs="+", choices=SUITES)
    ver.set_defaults(func=cmd_verify)

    ren = sub.add_parser("render", help="render SVG figures from a results directory")
    ren.add_argument("--results", required=True, help="results directory or curves.json")
    ren.add_argument("--out")
    ren.add_argument("--max-plots", type=int, default=6)
    ren.set_defaults(func=cmd_render)

    gen = sub.add_parser("gen-instance", help="write a seeded instance file")
    _add_common(gen)
    gen.set_defaults(func=cmd_gen_instance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SpecError, ContractError, instance_io.InstanceFormatError) as exc:
        print(f"phasewin: error: {exc}", file=sys.stderr)
        return USAGE
    except OracleError as exc:
        print(f"phasewin: oracle error: {exc}", file=sys.stderr)
        return FAILED
    except OSError as exc:
        print(f"phasewin: I/O error: {exc}", file=sys.stderr)
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
