"""Command-line surface: rank, topk, compare, and spectrum subcommands.

Output is CSV by default or JSON with --json, written to stdout or --out.
Node ids are echoed in the index base of the input file.  Exit codes:
0 success, 1 malformed input, 2 invalid parameters, 3 numerical failure.
"""

import argparse
import io
import json
import sys

import numpy as np

from . import analysis, rankers, topk
from .errors import ConvergenceError, GraphFormatError, ParameterError, SizeLimitError
from .graph import bipartite_operator, load_edge_list, load_matrix_market
from .linalg import DENSE_DIM_LIMIT, LanczosRun, tridiag_eigen
from .quadrature import NodeBounds

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PARAMS = 2
EXIT_NUMERICAL = 3

METHOD_CHOICES = [
    "degree",
    "hits",
    "exp-exact",
    "exp-quad",
    "spectral",
    "katz",
    "resolvent",
    "expsum",
    "pagerank",
]


def _load_graph(args):
    loaders = {"edgelist": lambda p: load_edge_list(p, index_base=args.base), "mtx": lambda p: load_matrix_market(p)}
    return loaders[args.format](args.input)


def _run_method(g, method, side, args):
    """Dispatch a method name to its ranker and pull out the requested side."""
    threads = max(1, args.threads)
    if method == "degree":
        hub, auth = rankers.degree_scores(g)
    elif method == "hits":
        hub, auth = rankers.hits(g, tol=args.tol, max_iter=args.max_iter)
    elif method == "exp-exact":
        hub, auth = rankers.exp_centrality_exact(g)
    elif method == "exp-quad":
        hub, auth = rankers.exp_centrality_quadrature(g, p_max=args.pmax, threads=threads)
    elif method == "spectral":
        hub, auth = rankers.truncated_spectral_scores(g, k=args.k if args.k else 1)
    elif method == "katz":
        hub, auth = rankers.katz_row_col(g, c=args.c)
    elif method == "resolvent":
        hub, auth = rankers.resolvent_bipartite(g, c=args.c, p_max=args.pmax, threads=threads)
    elif method == "expsum":
        hub, auth = rankers.expA_row_col_sums(g)
    elif method == "pagerank":
        sv = rankers.pagerank(g, alpha=args.alpha, reverse=(side == "hub"))
        return sv
    else:
        raise ParameterError(f"unknown method '{method}'")
    return hub if side == "hub" else auth


def _fmt_score(x, precision):
    return f"{x:.12g}" if precision == "full" else f"{x:.4f}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, NodeBounds):
        return {"node": obj.node, "lower": obj.lower, "upper": obj.upper, "p": obj.p, "exact": obj.exact}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _emit(text, args):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_rank(args):
    if args.top is not None and args.top < 1:
        raise ParameterError(f"--top must be positive, got {args.top}")
    g = _load_graph(args)
    sv = _run_method(g, args.method, args.side, args)
    table = rankers.rank_table(sv)
    rows = [
        {"node": v + g.index_base, "score": float(sv.scores[v]), "rank": int(table.ranks[v])}
        for v in table.order
    ]
    if args.top is not None:
        rows = rows[: args.top]
    if args.json:
        payload = {
            "method": sv.method,
            "side": sv.side,
            "params": _jsonable(sv.params),
            "diagnostics": _jsonable(sv.diagnostics),
            "index_base": g.index_base,
            "rows": rows,
        }
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write("node,score,rank\n")
        for row in rows:
            buf.write(f"{row['node']},{_fmt_score(row['score'], args.precision)},{row['rank']}\n")
        text = buf.getvalue()
    _emit(text, args)
    return EXIT_OK


def cmd_topk(args):
    g = _load_graph(args)
    kwargs = dict(
        side=args.side,
        p_max=args.pmax,
        exclude_degree_one=args.exclude_degree_one,
        threads=max(1, args.threads),
    )
    if args.m is not None:
        report = topk.rank_in_top_m(g, args.k, args.m, **kwargs)
    else:
        report = topk.identify_top_k(g, args.k, **kwargs)
    iters = report.iterations
    if args.json:
        payload = {
            "k": report.k,
            "m": report.m,
            "side": report.side,
            "members": [
                {
                    "node": v + g.index_base,
                    "rank": rank,
                    "lower": report.bounds[v].lower,
                    "upper": report.bounds[v].upper,
                    "p": report.bounds[v].p,
                    "exact": report.bounds[v].exact,
                }
                for rank, v in enumerate(report.members, start=1)
            ],
            "certified": report.certified,
            "fully_ordered": report.fully_ordered,
            "iterations": {
                "max": report.max_iterations,
                "per_node": {str(v + g.index_base): int(p) for v, p in sorted(iters.items())},
            },
            "excluded": {
                "zero_degree": report.excluded_zero_degree,
                "degree_one": report.excluded_degree_one,
            },
            "ties": report.ties_note,
        }
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write("node,rank,lower,upper,p,exact\n")
        for rank, v in enumerate(report.members, start=1):
            b = report.bounds[v]
            buf.write(
                f"{v + g.index_base},{rank},{_fmt_score(b.lower, args.precision)},"
                f"{_fmt_score(b.upper, args.precision)},{b.p},{int(b.exact)}\n"
            )
        buf.write(f"# certified={report.certified} fully_ordered={report.fully_ordered}\n")
        buf.write(f"# iterations_max={report.max_iterations}\n")
        buf.write(
            f"# excluded_zero_degree={report.excluded_zero_degree} "
            f"excluded_degree_one={report.excluded_degree_one}\n"
        )
        if report.ties_note:
            buf.write(f"# ties: {report.ties_note}\n")
        text = buf.getvalue()
    _emit(text, args)
    return EXIT_OK


def cmd_compare(args):
    if len(args.method) != 2:
        raise ParameterError("compare needs exactly two --method flags")
    g = _load_graph(args)
    tables = [rankers.rank_table(_run_method(g, m, args.side, args)) for m in args.method]
    ks = [int(tok) for tok in args.ks.split(",") if tok.strip()]
    if not ks or any(k < 1 for k in ks):
        raise ParameterError(f"--ks must list positive integers, got '{args.ks}'")
    report = analysis.compare(tables[0], tables[1], ks=ks)
    if args.json:
        payload = {
            "method_a": report.method_a,
            "method_b": report.method_b,
            "side": args.side,
            "kendall_tau_b": report.kendall_tau_b,
            "overlap_at": {str(k): v for k, v in report.overlap_at.items()},
            "top_members": {
                str(k): {
                    "a": [v + g.index_base for v in tops["a"]],
                    "b": [v + g.index_base for v in tops["b"]],
                }
                for k, tops in report.top_members.items()
            },
        }
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write("metric,value\n")
        buf.write(f"method_a,{report.method_a}\n")
        buf.write(f"method_b,{report.method_b}\n")
        buf.write(f"kendall_tau_b,{_fmt_score(report.kendall_tau_b, args.precision)}\n")
        for k, frac in report.overlap_at.items():
            buf.write(f"overlap_at_{k},{_fmt_score(frac, args.precision)}\n")
        text = buf.getvalue()
    _emit(text, args)
    return EXIT_OK


def cmd_spectrum(args):
    g = _load_graph(args)
    gap = analysis.spectral_gap(g, tol=args.tol)
    sym = analysis.symmetry_fraction(g)
    try:
        estrada = analysis.estrada_index(g)
    except SizeLimitError:
        estrada = None
    ritz = None
    if args.ritz_out:
        run = LanczosRun(bipartite_operator(g), 0).extend(args.pmax)
        nodes, _ = tridiag_eigen(run.jacobi())
        ritz = nodes
        with open(args.ritz_out, "w", encoding="utf-8") as fh:
            for t in nodes:
                fh.write(f"{t:.12g}\n")
    if args.json:
        payload = {
            "n": g.n,
            "m": g.m,
            "sigma1": gap.sigma1,
            "sigma2": gap.sigma2,
            "relative_gap": gap.relative_gap,
            "annotation": gap.annotation,
            "symmetry_fraction": sym,
            "estrada_index": estrada,
        }
        if ritz is not None:
            payload["ritz_values"] = ritz
        text = json.dumps(_jsonable(payload), indent=2) + "\n"
    else:
        buf = io.StringIO()
        buf.write("metric,value\n")
        buf.write(f"n,{g.n}\n")
        buf.write(f"m,{g.m}\n")
        buf.write(f"sigma1,{_fmt_score(gap.sigma1, args.precision)}\n")
        buf.write(f"sigma2,{_fmt_score(gap.sigma2, args.precision)}\n")
        buf.write(f"relative_gap,{_fmt_score(gap.relative_gap, args.precision)}\n")
        buf.write(f"symmetry_fraction,{_fmt_score(sym, args.precision)}\n")
        if estrada is not None:
            buf.write(f"estrada_index,{_fmt_score(estrada, args.precision)}\n")
        buf.write(f"annotation,{gap.annotation}\n")
        text = buf.getvalue()
    _emit(text, args)
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--input", required=True, help="path to the graph file")
    parser.add_argument("--format", choices=["edgelist", "mtx"], default="edgelist")
    parser.add_argument("--base", type=int, choices=[0, 1], default=0, help="node index base of the input")
    parser.add_argument("--out", default=None, help="write output to this file instead of stdout")
    parser.add_argument("--json", action="store_true", help="emit JSON instead of CSV")
    parser.add_argument("--precision", choices=["default", "full"], default="default")
    parser.add_argument("--threads", type=int, default=1, help="worker bound for per-node quadrature")
    parser.add_argument("--tol", type=float, default=1e-10)
    parser.add_argument("--pmax", type=int, default=40, help="maximum Lanczos steps per node")
    parser.add_argument("--max-iter", type=int, default=1000, dest="max_iter")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hubauth",
        description="Rank hubs and authorities in directed networks with matrix-function centralities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rank = sub.add_parser("rank", help="score and rank all nodes with one method")
    _add_common(p_rank)
    p_rank.add_argument("--method", choices=METHOD_CHOICES, required=True)
    p_rank.add_argument("--side", choices=["hub", "authority"], required=True)
    p_rank.add_argument("--top", type=int, default=None, help="print only the N best nodes")
    p_rank.add_argument("--k", type=int, default=None, help="number of spectral terms (method=spectral)")
    p_rank.add_argument("--c", type=float, default=None, help="walk damping (katz / resolvent)")
    p_rank.add_argument("--alpha", type=float, default=0.85, help="pagerank damping factor")
    p_rank.set_defaults(func=cmd_rank)

    p_topk = sub.add_parser("topk", help="identify the top-k nodes with certified brackets")
    _add_common(p_topk)
    p_topk.add_argument("--side", choices=["hub", "authority"], required=True)
    p_topk.add_argument("--k", type=int, required=True)
    p_topk.add_argument("--m", type=int, default=None, help="relax: certify top-k within top-m only")
    p_topk.add_argument("--exclude-degree-one", action="store_true")
    p_topk.set_defaults(func=cmd_topk, pmax=64)  # refinement is incremental; allow more depth

    p_cmp = sub.add_parser("compare", help="compare the rankings of two methods")
    _add_common(p_cmp)
    p_cmp.add_argument("--method", action="append", choices=METHOD_CHOICES, required=True, help="give twice")
    p_cmp.add_argument("--side", choices=["hub", "authority"], required=True)
    p_cmp.add_argument("--ks", default="1,3,5,10", help="comma list of overlap depths")
    p_cmp.add_argument("--k", type=int, default=None, help="number of spectral terms (method=spectral)")
    p_cmp.add_argument("--c", type=float, default=None)
    p_cmp.add_argument("--alpha", type=float, default=0.85)
    p_cmp.set_defaults(func=cmd_compare)

    p_spec = sub.add_parser("spectrum", help="spectral gap, symmetry, and size diagnostics")
    _add_common(p_spec)
    p_spec.add_argument("--ritz-out", default=None, help="dump Ritz values of the bipartite operator here")
    p_spec.set_defaults(func=cmd_spectrum)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConvergenceError, SizeLimitError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
