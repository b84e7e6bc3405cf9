#!/usr/bin/env python3
"""End-to-end housing walkthrough: search, expert edits, fit, save.

Requires data/housing.csv (see scripts/fetch_housing.py). Prints the CPDAG
the search returns, applies the frozen expert DAG, fits the path model, and
writes out/housing_model.json for the service, the CLI, and the UI.
"""

import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from causalwhatif.dataset import Dataset, compute_stats, ingest_csv, split, standardize
from causalwhatif.graph import CausalDag
from causalwhatif.model_io import (
    dataset_fingerprint,
    parse_graph_text,
    save_model_file,
)
from causalwhatif.realism import fit_profile_gmm
from causalwhatif.search import pc_search
from causalwhatif.sem import fit_model


def main() -> int:
    csv_path = ROOT / "data" / "housing.csv"
    dag_path = ROOT / "data" / "housing_dag.txt"
    if not csv_path.exists():
        print(
            "data/housing.csv is missing. Run scripts/fetch_housing.py on a "
            "machine with network access first.",
            file=sys.stderr,
        )
        return 1

    data, report = ingest_csv(csv_path)
    print(f"loaded {data.n} rows, {len(data.columns)} columns "
          f"({report.n_dropped} dropped)")

    edges, outcome = parse_graph_text(dag_path.read_text(encoding="utf-8"))
    nodes = tuple(sorted({v for e in edges for v in e}))
    sub = Dataset(nodes, np.column_stack([data.column(v) for v in nodes]))

    print("\nPC search over the model variables (alpha=0.01):")
    cpdag = pc_search(standardize(sub, compute_stats(sub)), alpha=0.01, max_cond=3)
    for src, dst in sorted(cpdag.directed_edges):
        print(f"  {src} -> {dst}")
    for pair in sorted(map(sorted, cpdag.undirected_edges)):
        print(f"  {pair[0]} -- {pair[1]}   (left for the expert)")

    print("\nfitting the expert DAG from data/housing_dag.txt")
    dag = CausalDag(nodes, frozenset(edges), outcome)
    data_split = split(sub, 0.2, seed=0)
    model = fit_model(sub, dag, data_split)

    fit = model.fit
    print(f"  chi^2 = {fit.chi_square:.3f}  df = {fit.df}")
    print(f"  CFI   = {fit.cfi:.3f}")
    print(f"  GFI   = {fit.gfi:.3f}")
    print(f"  AGFI  = {fit.agfi:.3f}")
    print(f"  RMSEA = {fit.rmsea:.4f}")
    print(f"  test rmse = {model.accuracy.rmse:.3f}  r^2 = {model.accuracy.r_squared:.3f}")
    print("\npath coefficients:")
    for (src, dst), b in sorted(model.beta.items()):
        print(f"  {src} -> {dst}: {b:+.3f}")

    gmm = fit_profile_gmm(sub, model, k=3, seed=0)
    out = ROOT / "out" / "housing_model.json"
    out.parent.mkdir(exist_ok=True)
    save_model_file(out, model, gmm, dataset_fingerprint(sub))
    print(f"\nmodel written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
