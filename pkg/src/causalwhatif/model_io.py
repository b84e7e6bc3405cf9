"""Model-file serialization and the plain-text graph format.

The model file is a JSON document that fully determines the interpretation
side of the system: variables with roles and standardization stats, edges
with coefficients, residual variances, exogenous correlations, fit and
accuracy reports, mixture parameters, and a fingerprint of the dataset the
model came from. Floats round-trip bit-exactly (shortest-repr decimal
serialization).

Graph files are hand-editable: one ``SRC -> DST`` line per edge, an
``outcome: NAME`` line, ``#`` comments.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .dataset import ColumnStats, Dataset
from .errors import ModelFileError
from .graph import CausalDag
from .realism import GmmModel
from .sem import AccuracyReport, FitReport, FittedModel

__all__ = [
    "FORMAT_VERSION",
    "dataset_fingerprint",
    "model_to_dict",
    "model_from_dict",
    "save_model_file",
    "load_model_file",
    "parse_graph_text",
    "format_graph_text",
]

FORMAT_VERSION = 1


def dataset_fingerprint(d: Dataset) -> str:
    digest = hashlib.sha256()
    digest.update("\x1f".join(d.columns).encode("utf-8"))
    digest.update(np.ascontiguousarray(d.rows).tobytes())
    return digest.hexdigest()


def _gmm_to_dict(g: GmmModel) -> dict:
    return {
        "weights": [float(w) for w in g.weights],
        "means": [[float(x) for x in row] for row in g.means],
        "covariances": [[[float(x) for x in row] for row in cov] for cov in g.covariances],
        "train_log_density": [float(x) for x in g.train_log_density],
        "n_iter": g.n_iter,
        "log_likelihood": float(g.log_likelihood),
    }


def _gmm_from_dict(payload: dict) -> GmmModel:
    return GmmModel(
        weights=np.array(payload["weights"], dtype=float),
        means=np.array(payload["means"], dtype=float),
        covariances=np.array(payload["covariances"], dtype=float),
        train_log_density=np.array(payload["train_log_density"], dtype=float),
        n_iter=int(payload["n_iter"]),
        log_likelihood=float(payload["log_likelihood"]),
    )


def model_to_dict(m: FittedModel, gmm: GmmModel | None = None,
                  fingerprint: str | None = None) -> dict:
    variables = []
    for name in m.dag.nodes:
        mean, std, lo, hi = m.stats.for_column(name)
        variables.append({
            "name": name,
            "role": m.dag.role(name),
            "mean": mean,
            "std": std,
            "min": lo,
            "max": hi,
        })
    exo = m.dag.exogenous
    return {
        "format_version": FORMAT_VERSION,
        "outcome": m.dag.outcome,
        "variables": variables,
        "edges": [
            {"src": src, "dst": dst, "beta": float(m.beta[(src, dst)])}
            for src, dst in sorted(m.dag.directed_edges)
        ],
        "residual_variances": {v: float(m.residual_variance[v]) for v in m.dag.endogenous},
        "exogenous_correlations": [
            {"a": exo[i], "b": exo[j], "r": float(m.exo_corr[i, j])}
            for i in range(len(exo))
            for j in range(i + 1, len(exo))
        ],
        "fit": asdict(m.fit) if m.fit is not None else None,
        "accuracy": asdict(m.accuracy) if m.accuracy is not None else None,
        "gmm": _gmm_to_dict(gmm) if gmm is not None else None,
        "dataset_fingerprint": fingerprint,
    }


def model_from_dict(payload: dict) -> tuple[FittedModel, GmmModel | None, str | None]:
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFileError(
            f"unsupported model file version {version!r} (expected {FORMAT_VERSION})"
        )
    try:
        variables = payload["variables"]
        names = tuple(v["name"] for v in variables)
        edges = frozenset((e["src"], e["dst"]) for e in payload["edges"])
        dag = CausalDag(names, edges, payload["outcome"])
        stats = ColumnStats(
            columns=names,
            mean=np.array([v["mean"] for v in variables], dtype=float),
            std=np.array([v["std"] for v in variables], dtype=float),
            min=np.array([v["min"] for v in variables], dtype=float),
            max=np.array([v["max"] for v in variables], dtype=float),
        )
        beta = {(e["src"], e["dst"]): float(e["beta"]) for e in payload["edges"]}
        psi = {k: float(v) for k, v in payload["residual_variances"].items()}
        exo = dag.exogenous
        exo_corr = np.eye(len(exo))
        pos = {v: i for i, v in enumerate(exo)}
        for rec in payload["exogenous_correlations"]:
            i, j = pos[rec["a"]], pos[rec["b"]]
            exo_corr[i, j] = exo_corr[j, i] = float(rec["r"])
        fit = FitReport(**payload["fit"]) if payload.get("fit") else None
        accuracy = None
        if payload.get("accuracy"):
            acc = dict(payload["accuracy"])
            acc["predicted"] = tuple(acc["predicted"])
            acc["actual"] = tuple(acc["actual"])
            accuracy = AccuracyReport(**acc)
        model = FittedModel(dag=dag, beta=beta, residual_variance=psi,
                            exo_corr=exo_corr, stats=stats, fit=fit, accuracy=accuracy)
        gmm = _gmm_from_dict(payload["gmm"]) if payload.get("gmm") else None
        return model, gmm, payload.get("dataset_fingerprint")
    except (KeyError, TypeError) as exc:
        raise ModelFileError(f"malformed model file: {exc}") from exc


def save_model_file(path: str | Path, m: FittedModel, gmm: GmmModel | None = None,
                    fingerprint: str | None = None) -> None:
    Path(path).write_text(
        json.dumps(model_to_dict(m, gmm, fingerprint), indent=2) + "\n", encoding="utf-8"
    )


def load_model_file(path: str | Path) -> tuple[FittedModel, GmmModel | None, str | None]:
    path = Path(path)
    if not path.exists():
        raise ModelFileError(f"no such model file: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"{path}: not valid JSON: {exc}") from exc
    return model_from_dict(payload)


def parse_graph_text(text: str) -> tuple[list[tuple[str, str]], str | None]:
    """Parse ``SRC -> DST`` lines plus an optional ``outcome: NAME`` line."""
    edges: list[tuple[str, str]] = []
    outcome: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("outcome:"):
            outcome = line.split(":", 1)[1].strip()
            if not outcome:
                raise ModelFileError(f"line {lineno}: empty outcome name")
            continue
        if "->" not in line:
            raise ModelFileError(f"line {lineno}: expected 'SRC -> DST' or 'outcome: NAME'")
        src, _, dst = line.partition("->")
        src, dst = src.strip(), dst.strip()
        if not src or not dst:
            raise ModelFileError(f"line {lineno}: malformed edge {line!r}")
        edges.append((src, dst))
    return edges, outcome


def format_graph_text(dag: CausalDag) -> str:
    lines = [f"{src} -> {dst}" for src, dst in sorted(dag.directed_edges)]
    lines.append(f"outcome: {dag.outcome}")
    return "\n".join(lines) + "\n"
