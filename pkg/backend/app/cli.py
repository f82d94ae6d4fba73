"""
Command-line front end.

    python -m app run --algo mu-plus-one-ga --mu 5 --n 512 --c 1.0 --runs 1000 --seed 42
    python -m app sweep --algo mu-plus-one-ga --mu 2,3,4,5 --n 1024 --normalize vs_2plus1_ga
    python -m app bounds --kind upper --mu 3 --c 1 --n 1024
    python -m app mc-solve --pm 0.1 --pd 0 --pc 0.5 --pr 0 --simulate 100000
    python -m app figs --which 5 --scale desk

Exit codes: 0 success, 2 usage or validation error, 3 internal numeric error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

from .core.config import settings
from .core.errors import ContractViolation, InfiniteExpectationError, SsgaError
from .db.schemas import AlgorithmConfig, ChainSolution, ExperimentSpec, MarkovParams, ParentSelection, SeriesSpec, Variant
from .services import bounds, export, harness, markov, specs, storage

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

FIGURES = {"1": "fig1", "2": "fig2", "3": "fig3", "4": "fig4", "5": "fig5", "table1": "table1"}
# the minimiser of the leading coefficient is reported to 1e-6
OPTIMAL_C_FORMAT = "%.7g"
BOUND_KINDS = ["upper", "upper-2plus1", "lower", "takeover", "optimal-c"]


class UsageError(Exception):
    pass


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seeds are 64-bit unsigned integers")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None, help="output file (default: standard output)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--workers", type=_positive_int, default=None, help="worker processes (SSGA_WORKERS overrides)")
    common.add_argument("--record", action="store_true", help="store the table in the experiment database")
    common.add_argument("--verbose", action="store_true")

    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument("--algo", required=True, choices=[v.value for v in Variant])
    algo.add_argument("--selection", choices=[p.value for p in ParentSelection], default="uniform")
    algo.add_argument("--greedy-crossover", action="store_true", help="OR two distinct best-level parents")
    algo.add_argument("--runs", type=_positive_int, default=1000)
    algo.add_argument("--seed", type=_seed, default=0)
    algo.add_argument("--max-evaluations", type=_positive_int, default=None)

    parser = argparse.ArgumentParser(prog="ssga", description="Steady-state GA runtime lab")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common, algo], help="seeded runs of one configuration")
    run.add_argument("--n", type=_positive_int, required=True)
    run.add_argument("--c", type=float, required=True)
    run.add_argument("--mu", type=_positive_int, default=2)

    sweep = sub.add_parser("sweep", parents=[common, algo], help="sweep n, mu or c (comma lists)")
    sweep.add_argument("--n", type=_int_list, required=True)
    sweep.add_argument("--c", type=_float_list, default=[1.0])
    sweep.add_argument("--mu", type=_int_list, default=[2])
    sweep.add_argument("--normalize", choices=["none", "vs_2plus1_ga", "vs_1plus1_ea", "vs_c_equal_1"], default="none")

    bnd = sub.add_parser("bounds", parents=[common], help="evaluate a closed-form bound")
    bnd.add_argument("--kind", required=True, choices=BOUND_KINDS)
    bnd.add_argument("--mu", type=_positive_int, default=None)
    bnd.add_argument("--c", type=float, default=1.0)
    bnd.add_argument("--n", type=_positive_int, default=None)
    bnd.add_argument("--mode", choices=["leading-order", "conservative"], default=None)
    bnd.add_argument("--per-level", action="store_true")

    mc = sub.add_parser("mc-solve", parents=[common], help="absorbing times of the level chain")
    mc.add_argument("--pm", type=float, required=True)
    mc.add_argument("--pd", type=float, required=True)
    mc.add_argument("--pc", type=float, required=True)
    mc.add_argument("--pr", type=float, required=True)
    mc.add_argument("--simulate", type=_positive_int, default=None, metavar="EPISODES")
    mc.add_argument("--seed", type=_seed, default=0)

    figs = sub.add_parser("figs", parents=[common], help="run a builtin figure / table spec")
    figs.add_argument("--which", required=True, choices=list(FIGURES))
    figs.add_argument("--scale", choices=["desk", "full"], default="desk")
    figs.add_argument("--seed", type=_seed, default=None)

    table1 = sub.add_parser("table1", parents=[common], help="shorthand for figs --which table1")
    table1.add_argument("--scale", choices=["desk", "full"], default="desk")
    table1.add_argument("--seed", type=_seed, default=None)

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    return parser


def _workers(args) -> int:
    if settings.WORKERS is not None:
        return max(1, settings.WORKERS)
    return args.workers or harness.default_workers()


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        export.atomic_write_text(out, text)
        logger.info("wrote %s", out)


def _template(args, n: int, mu: int, c: float) -> AlgorithmConfig:
    return AlgorithmConfig(
        variant=Variant(args.algo),
        n=n,
        mu=mu,
        c=c,
        parent_selection=ParentSelection(args.selection),
        greedy_crossover=True if args.greedy_crossover else None,
        max_evaluations=args.max_evaluations,
    )


def _run_spec(spec: ExperimentSpec, args) -> int:
    table = harness.run_experiment(spec, workers=_workers(args))
    rows = [entry.row for entry in table]
    _emit(export.render_table(rows, args.format), args.out)
    if args.record:
        storage.init_db()
        storage.save_table(spec.name, spec.master_seed, spec.normalization, rows)
    capped = sum(row.capped_count for row in rows)
    if capped:
        logger.warning("%d runs hit the evaluation cap; their points are not comparable", capped)
    return EXIT_OK


def cmd_run(args) -> int:
    template = _template(args, args.n, args.mu, args.c)
    spec = ExperimentSpec(
        name="run",
        series=[SeriesSpec(template=template, sweep="n", values=[args.n])],
        runs_per_point=args.runs,
        master_seed=args.seed,
    )
    return _run_spec(spec, args)


def cmd_sweep(args) -> int:
    swept = [axis for axis, values in (("n", args.n), ("mu", args.mu), ("c", args.c)) if len(values) > 1]
    if len(swept) > 1:
        raise UsageError(f"only one of --n/--mu/--c may list several values (got {', '.join(swept)})")
    axis = swept[0] if swept else "n"
    template = _template(args, args.n[0] if axis != "n" else max(args.n), args.mu[0], args.c[0])
    values = {"n": args.n, "mu": args.mu, "c": args.c}[axis]
    spec = ExperimentSpec(
        name="sweep",
        series=[SeriesSpec(template=template, sweep=axis, values=values)],
        runs_per_point=args.runs,
        master_seed=args.seed,
        normalization=args.normalize,
    )
    return _run_spec(spec, args)


def cmd_bounds(args) -> int:
    kind = args.kind
    if kind == "optimal-c":
        _emit(export.render_model(bounds.optimal_mutation(), float_format=OPTIMAL_C_FORMAT), args.out)
        return EXIT_OK
    if kind == "takeover":
        if args.mu is None:
            raise UsageError("--kind takeover needs --mu")
        _emit(export.render_model(bounds.takeover_report(args.mu, args.c)), args.out)
        return EXIT_OK
    if args.n is None:
        raise UsageError(f"--kind {kind} needs --n")
    if kind == "upper":
        if args.mu is None or args.mu < 3:
            raise UsageError("--kind upper needs --mu >= 3; use --kind upper-2plus1 for mu = 2")
        report = bounds.upper_bound_theorem2(args.mu, args.c, args.n, per_level=args.per_level, mode=args.mode)
    elif kind == "upper-2plus1":
        report = bounds.upper_bound_2plus1(args.c, args.n, mode=args.mode)
    else:
        report = bounds.lower_bound_theorem5(args.c, args.n, per_level=args.per_level, mode=args.mode)
    _emit(export.render_model(report), args.out)
    return EXIT_OK


def cmd_mc_solve(args) -> int:
    try:
        params = MarkovParams(p_m=args.pm, p_d=args.pd, p_c=args.pc, p_r=args.pr)
        times = markov.absorbing_times(params)
    except (ValidationError, InfiniteExpectationError) as exc:
        raise UsageError(str(exc)) from exc
    solution = ChainSolution(params=params, times=times)
    if args.simulate:
        rng = np.random.default_rng(args.seed)
        solution.simulation = markov.oracle_check(params, args.simulate, rng)
    _emit(export.render_model(solution), args.out)
    return EXIT_OK


def cmd_figs(args) -> int:
    name = FIGURES[args.which] if hasattr(args, "which") else "table1"
    spec = specs.get_spec(name, args.scale, args.seed)
    if args.out is None:
        args.out = Path(settings.RESULTS_DIR) / f"{name}_{args.scale}.{args.format}"
    return _run_spec(spec, args)


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("app.main:app", host=args.host, port=args.port)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "bounds": cmd_bounds,
    "mc-solve": cmd_mc_solve,
    "figs": cmd_figs,
    "table1": cmd_figs,
    "serve": cmd_serve,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if getattr(args, "verbose", False) else settings.LOG_LEVEL
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ContractViolation, ValidationError) as exc:
        parser.print_usage(sys.stderr)
        print(f"ssga {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SsgaError, ArithmeticError) as exc:
        logger.error("numeric error: %s", exc)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
