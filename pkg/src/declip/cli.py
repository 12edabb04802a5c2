"""Command-line front end: ``declip {synth,declip,bench,demo}``.

Exit codes: 0 success, 1 usage or I/O error, 2 algorithmic non-convergence.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from .algorithms import Rel1Params, TpccParams
from .convex import SolverParams
from .result import DeclipStatus
from .signals import SynthSpec, clip, read_signal_csv, synth_sparse_signal, write_signal_csv
from .svg import heat_map, line_chart

log = logging.getLogger("declip")

EXIT_OK, EXIT_USAGE, EXIT_NONCONVERGED = 0, 1, 2

ALGO_NAMES = {"bp": "BP", "bpcc": "BPCC", "rel1cc": "ReL1CC", "tpcc": "TPCC"}
BENCH_DEFAULTS = {
    "mmin": dict(k=(2, 4, 6, 8, 10), m=(70,), trials=100),
    "probk": dict(k=tuple(range(8, 65, 8)), m=(70,), trials=100),
    "phase": dict(k=tuple(range(2, 31, 2)), m=(20, 30, 40, 50, 60, 70), trials=500),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="declip", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="synthesize a random frequency-sparse signal")
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amp-low", type=float, default=0.5)
    p.add_argument("--amp-high", type=float, default=1.5)
    p.add_argument("--out", type=Path, help="output directory (signal.csv, spectrum.json); stdout if omitted")

    p = sub.add_parser("declip", help="restore a clipped signal read from CSV")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--cl", type=float, required=True, help="lower clip bound")
    p.add_argument("--cu", type=float, required=True, help="upper clip bound")
    p.add_argument("--algo", choices=sorted(ALGO_NAMES), required=True)
    p.add_argument("--eps", type=float, default=Rel1Params.eps, help="ReL1CC weight offset")
    p.add_argument("--delta", type=float, default=Rel1Params.delta, help="ReL1CC stopping distance")
    p.add_argument("--ell-max", type=int, default=Rel1Params.ell_max, help="ReL1CC iteration cap")
    p.add_argument("--tol-feas", type=float, default=SolverParams.tol_feas)
    p.add_argument("--tol-gap", type=float, default=SolverParams.tol_gap)
    p.add_argument("--max-iters", type=int, default=SolverParams.max_iters)
    p.add_argument("--eps-residual", type=float, default=TpccParams.eps_residual, help="TPCC residual target")
    p.add_argument("--max-support", type=int, default=None, help="TPCC support cap (default M)")
    p.add_argument("--out", type=Path, help="output directory (recovered.csv, diagnostics.json)")

    p = sub.add_parser("bench", help="run a Monte-Carlo experiment")
    p.add_argument("--exp", choices=sorted(BENCH_DEFAULTS), required=True)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=128)
    p.add_argument("--k", type=_int_list, help="comma-separated K grid")
    p.add_argument("--m", type=_int_list, help="comma-separated M grid")
    p.add_argument("--algos", type=lambda s: tuple(s.split(",")), help="subset of bp,bpcc,rel1cc,tpcc")
    p.add_argument("--out", type=Path, help="output directory (<exp>.csv); stdout if omitted")
    p.add_argument("--svg", action="store_true", help="also write <exp>.svg (needs --out)")

    p = sub.add_parser("demo", help="run a fixed demo scenario")
    p.add_argument("name", choices=("fig1", "fig2", "twotone"))
    p.add_argument("--out", type=Path, help="output directory (<name>.csv, <name>.json)")
    return parser


def _ensure_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {path}: {exc}")
    return path


def cmd_synth(args) -> int:
    try:
        spec = SynthSpec(args.n, args.k, args.seed, args.amp_low, args.amp_high)
    except ValueError as exc:
        raise UsageError(str(exc))
    x, alpha = synth_sparse_signal(spec)
    if args.out is None:
        sys.stdout.write(write_signal_csv(x))
        return EXIT_OK
    out = _ensure_dir(args.out)
    write_signal_csv(x, out / "signal.csv")
    triplets = [[int(k), float(c.real), float(c.imag)] for k, c in enumerate(alpha.coeffs) if c != 0]
    payload = {"n": args.n, "k": args.k, "seed": args.seed, "coefficients": triplets}
    (out / "spectrum.json").write_text(json.dumps(payload, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_declip(args) -> int:
    if not args.cl < args.cu:
        raise UsageError("--cl must be smaller than --cu")
    try:
        x_c = read_signal_csv(args.infile)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {args.infile}: {exc}")
    try:
        solver = SolverParams(args.tol_feas, args.tol_gap, args.max_iters)
        rel1 = Rel1Params(args.ell_max, args.eps, args.delta, solver)
        tpcc = TpccParams(args.eps_residual, args.max_support)
    except ValueError as exc:
        raise UsageError(str(exc))
    obs = clip(x_c, args.cl, args.cu)
    res = ex.run_algorithm(ALGO_NAMES[args.algo], obs, rel1, tpcc, solver)
    diag = {"algorithm": ALGO_NAMES[args.algo], "M": obs.m, **res.diagnostics()}
    text = json.dumps(diag, indent=1) + "\n"
    if args.out is None:
        sys.stdout.write(write_signal_csv(res.x_hat))
        sys.stderr.write(text)
    else:
        out = _ensure_dir(args.out)
        write_signal_csv(res.x_hat, out / "recovered.csv")
        (out / "diagnostics.json").write_text(text, encoding="utf-8")
    failed = res.status in (DeclipStatus.SOLVER_FAILURE, DeclipStatus.SUPPORT_EXHAUSTED)
    return EXIT_NONCONVERGED if failed else EXIT_OK


def bench_config(args) -> ex.TrialConfig:
    defaults = BENCH_DEFAULTS[args.exp]
    trials = defaults["trials"] if args.trials is None else args.trials
    if trials < 1:
        raise UsageError("--trials must be >= 1")
    algos = ex.ALGORITHMS
    if args.algos:
        unknown = [a for a in args.algos if a not in ALGO_NAMES]
        if unknown:
            raise UsageError(f"unknown algorithms: {', '.join(unknown)}")
        algos = tuple(ALGO_NAMES[a] for a in args.algos)
    try:
        return ex.TrialConfig(
            n_len=args.n,
            k_values=args.k or defaults["k"],
            m_values=args.m or defaults["m"],
            trials=trials,
            seed=args.seed,
            algorithms=algos,
            workers=0,
        )
    except ValueError as exc:
        raise UsageError(str(exc))


def bench_svg(table: ex.ExperimentTable) -> str:
    if table.experiment == "mmin":
        series = {}
        for r in table.rows:
            series.setdefault(r.algorithm, []).append((r.k, r.m))
        return line_chart(series, "Mean minimum number of reliable samples", "K", "mean M_min")
    if table.experiment == "probk":
        series = {}
        for r in table.rows:
            series.setdefault(r.algorithm, []).append((r.k, r.success / r.trials))
        return line_chart(series, f"Recovery rate at M={table.rows[0].m}", "K", "success rate", (0.0, 1.0))
    cells = {(r.k, r.m): r.success / r.trials for r in table.rows}
    return heat_map(cells, "TPCC recovery rate", "K", "M")


def cmd_bench(args) -> int:
    config = bench_config(args)
    if args.svg and args.out is None:
        raise UsageError("--svg needs --out")
    runner = {"mmin": ex.run_mmin_experiment, "probk": ex.run_prob_vs_k, "phase": ex.run_tpcc_phase}[args.exp]
    log.info("running %s with %d trials per cell", args.exp, config.trials)
    table = runner(config)
    if args.out is None:
        sys.stdout.write(table.to_csv())
        return EXIT_OK
    out = _ensure_dir(args.out)
    table.write_csv(out / f"{args.exp}.csv")
    if args.svg:
        (out / f"{args.exp}.svg").write_text(bench_svg(table), encoding="utf-8")
    return EXIT_OK


def cmd_demo(args) -> int:
    bundle = {"fig1": ex.demo_fig1, "fig2": ex.demo_fig2, "twotone": ex.demo_twotone}[args.name]()
    summary = json.dumps(bundle.summary, indent=1, default=_json_default) + "\n"
    if args.out is None:
        sys.stdout.write(summary)
        return EXIT_OK
    out = _ensure_dir(args.out)
    (out / f"{args.name}.csv").write_text(bundle.to_csv(), encoding="utf-8")
    (out / f"{args.name}.json").write_text(summary, encoding="utf-8")
    return EXIT_OK


def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(type(obj).__name__)


COMMANDS = {"synth": cmd_synth, "declip": cmd_declip, "bench": cmd_bench, "demo": cmd_demo}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"declip: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
