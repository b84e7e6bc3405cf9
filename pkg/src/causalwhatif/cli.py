"""Batch command-line access: fit, predict, what-if tables, and evaluation.

Output is TSV on stdout (byte-stable for fixed inputs and seeds), logs and
errors go to stderr. Exit codes: 0 ok, 2 usage or domain error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dataset as ds
from . import engine, model_io, search, sem
from .realism import fit_profile_gmm
from .errors import CausalWhatifError, FitError, RealismError, SingularityError
from .graph import CausalDag, EditAction, MixedGraph, edit, finalize

USAGE_ERROR = 2
NUMERIC_ERROR = 3

_NUMERIC_ERRORS = (SingularityError, FitError, RealismError, np.linalg.LinAlgError)


def _fmt(x: float) -> str:
    return repr(float(x))


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_assignments(pairs: list[str]) -> dict[str, float]:
    out: dict[str, float] = {}
    for pair in pairs:
        name, sep, value = pair.partition("=")
        if not sep or not name:
            raise ValueError(f"expected NAME=VALUE, got {pair!r}")
        out[name] = float(value)
    return out


def _load_graph_file(path: str) -> tuple[list[tuple[str, str]], str | None]:
    return model_io.parse_graph_text(Path(path).read_text(encoding="utf-8"))


def _apply_orientations(g: MixedGraph, file_edges: list[tuple[str, str]]) -> MixedGraph:
    """Treat a graph file as expert overrides on a search result."""
    for src, dst in file_edges:
        pair = frozenset((src, dst))
        if (src, dst) in g.directed_edges:
            continue
        if pair in g.undirected_edges:
            g = edit(g, EditAction.DIRECT, (src, dst))
        elif (dst, src) in g.directed_edges:
            g = edit(g, EditAction.REVERSE, (dst, src))
        else:
            g = edit(g, EditAction.ADD, (src, dst))
    return g


def _profile_from_assignments(m: sem.FittedModel, assignments: dict[str, float]) -> engine.Profile:
    profile = engine.initial_profile(m, "A")
    for name in sorted(assignments):
        profile = engine.set_value(m, profile, name, assignments[name])
    return profile


def _print_prediction(m: sem.FittedModel, result: engine.PredictionResult) -> None:
    for node in sorted(result.values):
        print(f"value\t{node}\t{_fmt(result.values[node])}")
    print(f"outcome\t{m.dag.outcome}\t{_fmt(result.outcome)}")
    for src, dst in sorted(result.inactive_edges):
        print(f"inactive_edge\t{src}\t{dst}")
    for node in sorted(result.non_impacting):
        print(f"non_impacting\t{node}")


def cmd_fit(args: argparse.Namespace) -> int:
    data, report = ds.ingest_csv(args.data, ds.IngestConfig(delimiter=args.delimiter))
    if report.n_dropped:
        _log(f"dropped {report.n_dropped} rows during ingestion")
    file_edges, file_outcome = _load_graph_file(args.graph)
    outcome = args.outcome or file_outcome
    if not outcome:
        _log("no outcome given (argument or 'outcome:' line in the graph file)")
        return USAGE_ERROR
    if outcome not in data.columns:
        _log(f"outcome {outcome!r} is not a column of {args.data}")
        return USAGE_ERROR

    if args.search == "pc":
        stats = ds.compute_stats(data)
        cpdag = search.pc_search(ds.standardize(data, stats),
                                 alpha=args.alpha, max_cond=args.max_cond)
        mixed = _apply_orientations(cpdag, file_edges)
        if mixed.undirected_edges:
            remaining = sorted(tuple(sorted(e)) for e in mixed.undirected_edges)
            _log(f"search left undirected edges unresolved by the graph file: {remaining}")
            return USAGE_ERROR
        dag = finalize(mixed, outcome)
    else:
        nodes = tuple(sorted({v for e in file_edges for v in e} | {outcome}))
        missing = [v for v in nodes if v not in data.columns]
        if missing:
            _log(f"graph references columns not in the data: {missing}")
            return USAGE_ERROR
        dag = CausalDag(nodes, frozenset(file_edges), outcome)

    data = ds.Dataset(tuple(dag.nodes), np.column_stack([data.column(v) for v in dag.nodes]))
    data_split = ds.split(data, args.test_fraction, args.seed) if args.test_fraction > 0 else None
    model = sem.fit_model(data, dag, data_split,
                          stats_scope="train" if args.train_stats else "full")

    gmm = None
    if args.gmm_k > 0:
        gmm = fit_profile_gmm(data, model, k=args.gmm_k, seed=args.seed)
    if args.out:
        model_io.save_model_file(args.out, model, gmm, model_io.dataset_fingerprint(data))
        _log(f"model written to {args.out}")

    fit = model.fit
    print(f"n\t{data.n}")
    print(f"chi_square\t{_fmt(fit.chi_square)}")
    print(f"df\t{fit.df}")
    for name in ("cfi", "gfi", "agfi", "rmsea"):
        value = getattr(fit, name)
        print(f"{name}\t{_fmt(value) if value is not None else 'saturated'}")
    for (src, dst) in sorted(model.beta):
        print(f"beta\t{src}\t{dst}\t{_fmt(model.beta[(src, dst)])}")
    for node in model.dag.endogenous:
        print(f"psi\t{node}\t{_fmt(model.residual_variance[node])}")
    if model.accuracy is not None:
        print(f"rmse\t{_fmt(model.accuracy.rmse)}")
        print(f"r_squared\t{_fmt(model.accuracy.r_squared)}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model, _, _ = model_io.load_model_file(args.model)
    assignments = _parse_assignments(args.assignments)
    profile = _profile_from_assignments(model, assignments)
    _print_prediction(model, engine.predict(model, profile))
    return 0


def cmd_whatif(args: argparse.Namespace) -> int:
    model, _, _ = model_io.load_model_file(args.model)
    assignments = _parse_assignments(args.assignments)
    name, sep, spec_part = args.vary.partition("=")
    if not sep:
        raise ValueError(f"--vary expects NAME=FROM:TO:STEPS, got {args.vary!r}")
    parts = spec_part.split(":")
    if len(parts) != 3:
        raise ValueError(f"--vary expects NAME=FROM:TO:STEPS, got {args.vary!r}")
    lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    if steps < 1:
        raise ValueError("steps must be >= 1")
    values = [lo] if steps == 1 else [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]
    base = _profile_from_assignments(model, assignments)
    print(f"{name}\t{model.dag.outcome}")
    for v in values:
        profile = engine.set_value(model, base, name, v)
        result = engine.predict(model, profile)
        print(f"{_fmt(v)}\t{_fmt(result.outcome)}")
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    model, _, fingerprint = model_io.load_model_file(args.model)
    data, _ = ds.ingest_csv(args.data, ds.IngestConfig(delimiter=args.delimiter))
    if fingerprint and model_io.dataset_fingerprint(data) != fingerprint:
        _log("warning: dataset fingerprint differs from the one the model was fitted on")
    report = sem.evaluate_accuracy(model, data)
    print(f"rmse\t{_fmt(report.rmse)}")
    print(f"r_squared\t{_fmt(report.r_squared)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalwhatif",
        description="Fit and probe interpretable causal path models from the command line.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a path model from a CSV and a graph file")
    p_fit.add_argument("data", help="CSV file with a header row")
    p_fit.add_argument("graph", help="graph file: 'SRC -> DST' lines, 'outcome: NAME', # comments")
    p_fit.add_argument("outcome", nargs="?", default=None,
                       help="outcome column (defaults to the graph file's outcome line)")
    p_fit.add_argument("--search", choices=("pc", "none"), default="none",
                       help="pc: discover the skeleton, using the graph file as orientation "
                            "overrides; none: take the graph file as the final DAG")
    p_fit.add_argument("--alpha", type=float, default=0.01, help="PC significance level")
    p_fit.add_argument("--max-cond", type=int, default=3, help="PC conditioning-set cap")
    p_fit.add_argument("--test-fraction", type=float, default=0.2,
                       help="held-out fraction for accuracy (0 disables the split)")
    p_fit.add_argument("--seed", type=int, default=0, help="split / mixture seed")
    p_fit.add_argument("--train-stats", action="store_true",
                       help="standardize with training-row statistics instead of full-sample")
    p_fit.add_argument("--gmm-k", type=int, default=3,
                       help="mixture components for realism scoring (0 disables)")
    p_fit.add_argument("--delimiter", default=",")
    p_fit.add_argument("--out", help="write the model file here")
    p_fit.set_defaults(func=cmd_fit)

    p_pred = sub.add_parser("predict", help="predict the outcome for an assignment")
    p_pred.add_argument("model", help="model file from 'fit'")
    p_pred.add_argument("assignments", nargs="*", help="NAME=VALUE pairs")
    p_pred.set_defaults(func=cmd_predict)

    p_what = sub.add_parser("whatif", help="sweep one variable and tabulate the outcome")
    p_what.add_argument("model")
    p_what.add_argument("assignments", nargs="*", help="base NAME=VALUE pairs")
    p_what.add_argument("--vary", required=True, help="NAME=FROM:TO:STEPS")
    p_what.set_defaults(func=cmd_whatif)

    p_eval = sub.add_parser("eval", help="held-out accuracy of a model on a CSV")
    p_eval.add_argument("model")
    p_eval.add_argument("data")
    p_eval.add_argument("--delimiter", default=",")
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        _log(f"numeric failure: {exc}")
        return NUMERIC_ERROR
    except (CausalWhatifError, ValueError, OSError, KeyError) as exc:
        _log(f"error: {exc}")
        return USAGE_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
