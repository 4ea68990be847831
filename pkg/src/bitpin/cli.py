"""Command line entry point: ``bitpin run | solve | gen``."""
import argparse
import json
import math
import sys

from .harness import PRESETS, ExperimentConfig, emit_results, preset, run_experiment, solve_problem
from .sensing import dump_problem, load_problem, make_problem


def _float(text):
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def build_parser():
    parser = argparse.ArgumentParser(prog="bitpin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte-Carlo experiment")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS))
    src.add_argument("--config", help="JSON file with experiment fields")
    run.add_argument("--trials", type=int)
    run.add_argument("--seed", type=int, help="base seed")
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--out", default="results.csv")
    run.add_argument("--format", choices=("csv", "plotdata"), default="csv")
    run.add_argument("--records", help="also write per-trial records as CSV here")
    run.add_argument("--no-timing", action="store_true",
                     help="omit wall-time columns (bit-reproducible output)")

    solve = sub.add_parser("solve", help="recover a signal from a problem file")
    solve.add_argument("--input", required=True)
    solve.add_argument("--solver", default="epsvm",
                       choices=("biht", "piht", "aop_biht", "aop_piht", "passive", "epsvm"))
    solve.add_argument("--tau", type=float, default=-0.5)
    solve.add_argument("--c", type=float, default=1.0)
    solve.add_argument("--mu", type=float)
    solve.add_argument("--C", type=float)
    solve.add_argument("--K", type=int, help="sparsity for the PIHT family (default: header K)")
    solve.add_argument("--L", type=int, help="assumed flip count for AOP")
    solve.add_argument("--alpha", type=float)
    solve.add_argument("--l-max", type=int)
    solve.add_argument("--out", required=True)

    gen = sub.add_parser("gen", help="generate a problem file")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--rf", type=float, default=0.0)
    gen.add_argument("--rn", type=_float, default=math.inf)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    return parser


def _cmd_run(args):
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.preset:
        config = preset(args.preset, **overrides)
    else:
        with open(args.config) as fh:
            d = json.load(fh)
        d.update(overrides)
        config = ExperimentConfig.from_dict(d)
    result = run_experiment(config, workers=args.workers)
    emit_results(result, args.out, fmt=args.format, timing=not args.no_timing)
    if args.records:
        emit_results(result, args.records, timing=not args.no_timing, records=True)


def _cmd_solve(args):
    problem = load_problem(args.input)
    point = dict(solver=args.solver, tau=args.tau, c=args.c, mu=args.mu, C=args.C,
                 K_est=args.K, L=args.L, alpha=args.alpha, l_max=args.l_max,
                 r_f=problem.flip_ratio)
    x, status = solve_problem(problem.data, point, problem.K)
    with open(args.out, "w") as fh:
        fh.write("".join(f"{float(v)!r}\n" for v in x))
    print(status)


def _cmd_gen(args):
    problem = make_problem(args.n, args.m, args.k, args.rn, args.rf, args.seed)
    dump_problem(problem, args.out)


def main(argv=None):
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "solve": _cmd_solve, "gen": _cmd_gen}[args.command]
    try:
        handler(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"bitpin: error: {exc}", file=sys.stderr)
        return 1
    return 0
