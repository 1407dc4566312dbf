"""Command-line interface.

Usage examples::

    robggm test anxieties.csv --amat hypothesis.csv --df 3
    robggm partials anxieties.csv --df 3 --output text
    robggm constants --p 8 --df 0
    robggm search anxieties.csv --tau 0.15 --alpha 0.05
    robggm dot anxieties.csv --amat graph.csv > graph.dot

Results go to stdout (JSON by default). Warnings are written to stderr as
single lines starting with ``warning:``; errors as one JSON object
``{"error": ..., "message": ...}``. Exit status is 0 on success, 1 for
invalid input and 2 for numerical failures.
"""

import argparse
import json
import math
import sys
import warnings

import numpy as np

from . import __version__
from .constants import ConstantsQuery, find_constants
from .errors import InputError, NumericalError, RobGGMError
from .graph import Graph, to_dot
from .graphfit import DIRECT, direct_fit, plug_in_fit
from .inference import deviance_test, partial_correlations, resolve_mode
from .io import ingest_adjacency, ingest_csv
from .linalg import to_correlation
from .search import backward_search

EXIT_OK, EXIT_USER, EXIT_NUMERIC = 0, 1, 2


class UsageError(InputError):
    pass


def parse_df(text, allow_zero=False):
    """Degrees of freedom: a positive number or ``inf`` (any case)."""
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'inf', got {text!r}") from None
    if math.isnan(value) or value < 0 or (value == 0 and not allow_zero):
        raise argparse.ArgumentTypeError(f"degrees of freedom must be positive, got {text!r}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--df", type=lambda s: parse_df(s, allow_zero=True), default=3.0,
                        help="degrees of freedom of the t M-estimator; 'inf' gives the sample "
                             "covariance with denominator n (default: 3)")
    common.add_argument("--tol", type=float, default=1e-8, help="convergence tolerance (default: 1e-8)")
    common.add_argument("--max-iter", type=int, default=500, help="iteration limit (default: 500)")
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=None,
                        help="random seed, recorded in the output for reproducibility")

    data = _Parser(add_help=False)
    data.add_argument("data", help="CSV data file with a header row (also searched in $ROBGGM_DATA_DIR)")
    data.add_argument("--amat", help="CSV adjacency matrix with vertex names in the header")

    mode = _Parser(add_help=False)
    mode.add_argument("--plug-in", dest="plug_in", action="store_true", default=None,
                      help="plug-in estimator (default)")
    mode.add_argument("--direct", action="store_true", default=None,
                      help="direct graph-constrained M-estimator; --plug-in wins if both are given")
    mode.add_argument("--sigma1", type=float, default=None,
                      help="scale of the chi-square limit (default: computed for Gaussian data)")

    parser = _Parser(prog="robggm", description="Robust fitting and testing of Gaussian graphical models.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("fit", parents=[common, data, mode], help="graph-constrained scatter estimate")
    sub.add_parser("test", parents=[common, data, mode], help="pseudo-deviance goodness-of-fit test")
    sp = sub.add_parser("search", parents=[common, data, mode], help="explorative backward edge removal")
    sp.add_argument("--alpha", type=float, default=0.05, help="acceptance level (default: 0.05)")
    sp.add_argument("--tau", type=float, default=None,
                    help="start from the graph of partial correlations above this threshold")
    sub.add_parser("partials", parents=[common, data],
                   help="correlations and partial correlations of the scatter estimate")
    sub.add_parser("dot", parents=[common, data, mode], help="Graphviz graph with fitted partial correlations")
    cp = sub.add_parser("constants", parents=[common], help="eta, sigma1 and sigma2 for a t M-estimator")
    cp.add_argument("--p", type=int, required=True, help="dimension")
    cp.add_argument("--df-data", type=parse_df, default=math.inf,
                    help="degrees of freedom of the elliptical t population; 'inf' is Gaussian (default)")
    return parser


# -- helpers ---------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _matrix(A):
    return [[float(v) for v in row] for row in np.asarray(A)]


def _edges(G):
    return [[G.labels[i], G.labels[j]] for i, j in G.sorted_edges()]


def _load(args):
    data = ingest_csv(args.data)
    if args.amat:
        G = ingest_adjacency(args.amat, data.column_names)
    else:
        G = Graph.full(data.p, data.column_names)
    return data, G


def _df_est(args):
    if args.df == 0:
        raise UsageError("--df 0 (Tyler's estimator) is only available for 'constants'")
    return args.df


def _fit(args, data, G):
    df = _df_est(args)
    mode = resolve_mode(plug_in=args.plug_in, direct=args.direct)
    if mode == DIRECT:
        return direct_fit(data.values, G, df, outer_tol=args.tol, max_iter=args.max_iter)
    return plug_in_fit(data.values, G, df, tol=args.tol, max_iter=args.max_iter)


def _format_matrix(A, labels, digits=2):
    width = max(6, max(len(s) for s in labels) + 1)
    lines = [" " * width + "".join(f"{s:>{width}}" for s in labels)]
    for name, row in zip(labels, np.asarray(A)):
        lines.append(f"{name:<{width}}" + "".join(f"{v:>{width}.{digits}f}" for v in row))
    return "\n".join(lines)


# -- subcommands -------------------------------------------------------------

def cmd_fit(args):
    data, G = _load(args)
    fit = _fit(args, data, G)
    doc = {
        "mode": fit.mode,
        "df": _num(args.df),
        "labels": list(data.column_names),
        "edges": _edges(G),
        "location": [float(v) for v in fit.location],
        "scatter": _matrix(fit.scatter),
        "partials_fitted": _matrix(partial_correlations(fit.scatter)),
        "converged": bool(fit.converged),
        "inner_iterations": fit.inner_iterations,
        "outer_iterations": fit.outer_iterations,
    }
    text = (f"{fit.mode} fit, df = {args.df:g}, converged = {fit.converged}\n"
            f"scatter:\n{_format_matrix(fit.scatter, data.column_names, 4)}")
    return doc, text


def cmd_test(args):
    data, G = _load(args)
    df = _df_est(args)
    res = deviance_test(data.values, G, df, sigma1=args.sigma1, plug_in=args.plug_in,
                        direct=args.direct, tol=args.tol, max_iter=args.max_iter)
    doc = {
        "deviance": res.deviance,
        "df": res.df_chisq,
        "sigma1": res.sigma1,
        "p_value": res.p_value,
        "mode": res.mode,
        "df_est": _num(res.df_est),
        "n": res.n,
        "converged": bool(res.converged),
        "labels": list(data.column_names),
        "edges": _edges(G),
        "scatter": _matrix(res.unconstrained_scatter),
        "constrained_scatter": _matrix(res.constrained_scatter),
        "partials_fitted": _matrix(partial_correlations(res.constrained_scatter)),
    }
    text = (f"pseudo-deviance test ({res.mode}, t_{res.df_est:g} M-estimator)\n"
            f"deviance = {res.deviance:.6g}, missing edges = {res.df_chisq}, "
            f"sigma1 = {res.sigma1:.6g}\np-value = {res.p_value:.6f}")
    return doc, text


def cmd_partials(args):
    data, G = _load(args)
    df = _df_est(args)
    fit = plug_in_fit(data.values, G, df, tol=args.tol, max_iter=args.max_iter)
    corr = to_correlation(fit.scatter)
    partials = partial_correlations(fit.scatter)
    doc = {
        "df": _num(df),
        "labels": list(data.column_names),
        "edges": _edges(G),
        "correlation": _matrix(corr),
        "partial_correlation": _matrix(partials),
        "converged": bool(fit.converged),
    }
    text = (f"correlations (t_{df:g} M-estimate)\n{_format_matrix(corr, data.column_names)}\n\n"
            f"partial correlations (t_{df:g} M-estimate)\n{_format_matrix(partials, data.column_names)}")
    return doc, text


def cmd_constants(args):
    q = ConstantsQuery(args.p, args.df, args.df_data)
    values = find_constants(q)
    doc = {"p": q.p, "df_est": _num(q.df_est), "df_data": _num(q.df_data),
           **{k: _num(v) for k, v in values.items()}}
    text = "\n".join(f"{k} = {'NA' if v is None else f'{v:.10g}'}" for k, v in values.items())
    return doc, text


def cmd_search(args):
    data = ingest_csv(args.data)
    df = _df_est(args)
    start = ingest_adjacency(args.amat, data.column_names) if args.amat else None
    mode = resolve_mode(plug_in=args.plug_in, direct=args.direct)
    trace = backward_search(data.values, df, args.alpha, mode, start=start, tau=args.tau,
                            labels=data.column_names, sigma1=args.sigma1,
                            tol=args.tol, max_iter=args.max_iter)

    def step_doc(step):
        return {
            "edges": _edges(step.graph),
            "n_edges": len(step.graph.edges),
            "deviance": step.deviance,
            "p_value": step.p_value,
            "removed_edge": None if step.removed_edge is None
            else [data.column_names[k] for k in step.removed_edge],
        }

    doc = {
        "note": trace.note,
        "alpha": trace.alpha,
        "df_est": _num(df),
        "mode": mode,
        "labels": list(data.column_names),
        "accepted": trace.accepted,
        "final_edges": _edges(trace.final_graph),
        "steps": [step_doc(s) for s in trace.steps],
        "rejected_candidate": None if trace.rejected is None else step_doc(trace.rejected),
    }
    lines = [trace.note]
    for s in trace.steps:
        removed = "start" if s.removed_edge is None else \
            "-".join(data.column_names[k] for k in s.removed_edge) + " removed"
        lines.append(f"{len(s.graph.edges):3d} edges  p = {s.p_value:.4f}  ({removed})")
    lines.append("final graph: " + ", ".join("--".join(e) for e in _edges(trace.final_graph)))
    return doc, "\n".join(lines)


def cmd_dot(args):
    data, G = _load(args)
    fit = _fit(args, data, G)
    return None, to_dot(G, partial_correlations(fit.scatter)).rstrip("\n")


COMMANDS = {
    "fit": cmd_fit,
    "test": cmd_test,
    "partials": cmd_partials,
    "constants": cmd_constants,
    "search": cmd_search,
    "dot": cmd_dot,
}


def _report_error(exc, stderr):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=stderr)


def run(argv=None, stdout=None, stderr=None):
    """Run the CLI and return the exit status."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            args = build_parser().parse_args(argv)
            doc, text = COMMANDS[args.command](args)
            status = EXIT_OK
        except (InputError, FileNotFoundError, IsADirectoryError, UnicodeDecodeError) as exc:
            _report_error(exc, stderr)
            status, doc = EXIT_USER, None
        except (NumericalError, RobGGMError, np.linalg.LinAlgError) as exc:
            _report_error(exc, stderr)
            status, doc = EXIT_NUMERIC, None
    seen = set()
    for w in caught:
        msg = str(w.message)
        if msg not in seen:
            seen.add(msg)
            print(f"warning: {msg}", file=stderr)
    if status != EXIT_OK:
        return status
    if doc is not None and args.output == "json":
        if args.seed is not None:
            doc["seed"] = args.seed
        stdout.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")
    else:
        stdout.write(text + "\n")
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
