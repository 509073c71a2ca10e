"""Command-line interface.

Exit codes: 0 success, 1 other tool errors, 2 usage or invalid values,
3 parse errors, 4 dimension errors, 5 controllability errors (including an
undefined chi), 6 budget exceeded, 7 file I/O errors.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings


from . import __version__
from .analysis import AnalysisRun, load_source, run_analysis
from .communicability import PerronFallbackWarning, profile
from .ensemble import SWEEP_COLUMNS, sweep
from .errors import TVCSError
from .formats import format_csv, format_edge_list
from .gramian import Metric
from .manipulation import manipulation_sweep
from .netgen import Family, GeneratorConfig, RawConnectivity, WeightMode, convert, generate, normalize_spectral
from .scheduling import EXHAUSTIVE_BUDGET, chi_vs_horizon

EXIT_USAGE = 2
EXIT_IO = 7
METRIC_CHOICES = [k.value for k in Metric] + ["all"]
MANIPULATION_COLUMNS = ["fraction", "mean_norm", "std_norm", "mean_ratio", "std_ratio", "success_rate"]


def _metrics(value: str) -> tuple:
    return tuple(k.value for k in Metric) if value == "all" else (value,)


def _int_list(text: str) -> list:
    return [int(v) for v in text.split(",") if v.strip()]


def _float_list(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _add_generator(p: argparse.ArgumentParser, required: bool = False) -> None:
    g = p.add_argument_group("generator (used when no edge list is given)")
    g.add_argument("--family", choices=[f.value for f in Family], required=required)
    g.add_argument("--n", type=int, help="number of nodes")
    g.add_argument("--p", type=float, help="ER edge probability")
    g.add_argument("--m-a", type=int, help="BA links per new node")
    g.add_argument("--k-ring", type=int, help="WS ring neighbours (even)")
    g.add_argument("--beta", type=float, help="WS rewiring probability")
    g.add_argument("--weights", choices=[w.value for w in WeightMode], default="unit")
    g.add_argument("--edge-weight", type=float, default=1.0)
    g.add_argument("--directed", action="store_true", help="directed ER")


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("edges", nargs="?", help="edge list file (src dst [weight] per line)")
    p.add_argument("--undirected", action="store_true",
                   help="symmetrize the edge list (default: follow a '# undirected' header, else directed)")
    p.add_argument("--one-based", action="store_true", help="node ids in files start at 1")
    _add_generator(p)


def _add_dynamics(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=["transmission", "induction", "none"], default="transmission")
    p.add_argument("--tau", type=float, default=1.0, help="induction sampling interval")
    p.add_argument("--leak", type=float, default=1.0, help="induction leak rate")
    p.add_argument("--k", type=int, default=10, help="horizon K")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", "-o", help="output file (default stdout)")


def _generator_config(args) -> GeneratorConfig:
    if args.n is None:
        raise ValueError("--n is required with --family")
    return GeneratorConfig(
        family=args.family,
        n=args.n,
        edge_weight=args.edge_weight,
        p=args.p,
        m_a=args.m_a,
        k_ring=args.k_ring,
        beta=args.beta,
        weight_mode=args.weights,
        directed=args.directed,
        seed=args.seed,
    )


def _source(args) -> dict:
    if args.edges:
        return {"edge_list": args.edges, "directed": False if args.undirected else None, "one_based": args.one_based}
    if args.family:
        return {"generator": _generator_config(args).to_dict()}
    raise ValueError("give an edge list file or a --family generator")


def _run(args, analyses, metrics=("trace",), manifest=()) -> AnalysisRun:
    return AnalysisRun(
        source=_source(args),
        method=args.method,
        K=args.k,
        metrics=metrics,
        m=getattr(args, "m", 1),
        seed=args.seed,
        tau=args.tau,
        leak=args.leak,
        budget=getattr(args, "budget", EXHAUSTIVE_BUDGET),
        analyses=analyses,
        manifest=tuple(manifest),
        trials=getattr(args, "trials", 20),
        norm_cap=getattr(args, "norm_cap", 1.0),
        full_profile=not getattr(args, "summary", False),
    )


def _network(args):
    raw = load_source(_source(args))
    a, _ = convert(raw, args.method, args.tau, args.leak)
    return raw, a


def cmd_generate(args) -> int:
    raw = generate(_generator_config(args))
    _emit(format_edge_list(raw, args.one_based), args.output)
    return 0


def cmd_convert(args) -> int:
    raw, a = _network(args)
    if args.normalize:
        a = normalize_spectral(a)
    _emit(format_edge_list(RawConnectivity(a, True), args.one_based), args.output)
    return 0


def cmd_communicability(args) -> int:
    _, a = _network(args)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PerronFallbackWarning)
        prof = profile(a, args.k)
    header = ["node"] + [f"R{k}" for k in range(args.k)] + ["R_inf"]
    offset = 1 if args.one_based else 0
    rows = [[i + offset] + list(prof.r_values[i]) + [prof.r_inf[i]] for i in range(prof.n)]
    _emit(format_csv(rows, header), args.output)
    return 0


def cmd_schedule(args) -> int:
    _emit(run_analysis(_run(args, ("schedule",), _metrics(args.metric))), args.output)
    return 0


def cmd_chi(args) -> int:
    _emit(run_analysis(_run(args, ("chi", "communicability"), _metrics(args.metric))), args.output)
    return 0


def cmd_chi_sweep(args) -> int:
    _, a = _network(args)
    rows = []
    for kind in _metrics(args.metric):
        table, best = chi_vs_horizon(a, args.k, kind, args.m, args.budget)
        rows.extend([kind, K, chi, K == best] for K, chi in table)
    _emit(format_csv(rows, ["metric", "K", "chi", "best_K"]), args.output)
    return 0


def cmd_manipulate(args) -> int:
    if args.fractions is not None:
        if args.n is None:
            raise ValueError("--n is required for a manipulation sweep")
        rows = manipulation_sweep(
            args.n, args.fractions, args.replicates, K=args.k, seed=args.seed,
            trials=args.trials, norm_cap=args.norm_cap,
        )
        _emit(format_csv(rows, MANIPULATION_COLUMNS), args.output)
        return 0
    if args.manifest is None:
        raise ValueError("give --manifest node ids for a single network or --fractions for a sweep")
    offset = 1 if args.one_based else 0
    manifest = [i - offset for i in args.manifest]
    _emit(run_analysis(_run(args, ("manipulation",), manifest=manifest)), args.output)
    return 0


def cmd_sweep(args) -> int:
    kwargs = {}
    if args.family == "random":
        kwargs["n_range"] = (10, 1000) if args.full else tuple(args.n_range)
        replicates = 10_000 if args.full and args.replicates is None else args.replicates
    else:
        if not args.ns:
            raise ValueError("--ns is required for generator families")
        replicates = args.replicates
    rows = sweep(
        args.family,
        ns=args.ns or (),
        params=args.params or (math.nan,),
        replicates=1000 if replicates is None else replicates,
        K=args.k,
        metric=args.metric,
        m=args.m,
        method=args.method,
        seed=args.seed,
        workers=args.workers,
        tau=args.tau,
        leak=args.leak,
        k_ring=args.k_ring,
        **kwargs,
    )
    _emit(format_csv(rows, SWEEP_COLUMNS), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tvcs", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=f"tvcs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated network as an edge list")
    _add_generator(p, required=True)
    p.add_argument("--one-based", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("convert", help="convert raw connectivity to dynamics, written as an edge list")
    _add_input(p)
    _add_dynamics(p)
    p.add_argument("--normalize", action="store_true", help="scale to unit spectral radius")
    _add_common(p)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("communicability", help="CSV of R_i(k) for k < K and the limit R_i(inf)")
    _add_input(p)
    _add_dynamics(p)
    _add_common(p)
    p.set_defaults(func=cmd_communicability)

    for name, func, text in (
        ("schedule", cmd_schedule, "optimal time-varying and time-invariant schedules (JSON)"),
        ("chi", cmd_chi, "advantage of time-varying scheduling with communicability summary (JSON)"),
        ("chi-sweep", cmd_chi_sweep, "chi for every horizon 2..K (CSV)"),
    ):
        p = sub.add_parser(name, help=text)
        _add_input(p)
        _add_dynamics(p)
        p.add_argument("--metric", choices=METRIC_CHOICES, default="trace")
        p.add_argument("--m", type=int, default=1, help="inputs per step")
        p.add_argument("--budget", type=int, default=EXHAUSTIVE_BUDGET, help="exhaustive search budget")
        if name == "chi":
            p.add_argument("--summary", action="store_true", help="omit the full R_i(k) table")
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("manipulate", help="minimal manifest-block perturbation (JSON) or fraction sweep (CSV)")
    _add_input(p)
    _add_dynamics(p)
    p.add_argument("--manifest", type=_int_list, help="comma-separated manifest node ids")
    p.add_argument("--fractions", type=_float_list, help="comma-separated manifest fractions (sweep mode)")
    p.add_argument("--replicates", type=int, default=20)
    p.add_argument("--trials", type=int, default=20, help="random directions per network")
    p.add_argument("--norm-cap", type=float, default=1.0, help="largest relative perturbation tried")
    _add_common(p)
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser("sweep", help="seeded ensemble of chi over a network family (CSV)")
    p.add_argument("--family", choices=["er", "ba", "ws", "random"], required=True)
    p.add_argument("--ns", type=_int_list, help="comma-separated network sizes")
    p.add_argument("--params", type=_float_list, help="comma-separated family parameters (p, m_a or beta)")
    p.add_argument("--k-ring", type=int, default=4)
    p.add_argument("--n-range", type=_int_list, default=[10, 100], help="random family size range")
    p.add_argument("--full", action="store_true", help="random family: 10^4 networks, n up to 1000")
    p.add_argument("--replicates", type=int, help="networks per cell (default 100, random family 1000)")
    _add_dynamics(p)
    p.add_argument("--metric", choices=[k.value for k in Metric], default="trace")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep" and args.family != "random" and args.replicates is None:
        args.replicates = 100
    try:
        return args.func(args)
    except TVCSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: cli_io: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
