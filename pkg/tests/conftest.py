"""Shared fixtures: the five-node example model, synthetic suites, housing data."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from causalwhatif.dataset import ColumnStats, Dataset
from causalwhatif.graph import CausalDag
from causalwhatif.sem import FittedModel
from causalwhatif.sim import LinearScm, random_scm

REPO_ROOT = Path(__file__).resolve().parent.parent
HOUSING_CSV = REPO_ROOT / "data" / "housing.csv"
HOUSING_DAG = REPO_ROOT / "data" / "housing_dag.txt"

# Frozen master seed for the 20-instance synthetic suite used by the
# acceptance criteria. Instances are filtered on structural grounds only
# (degrees of freedom, removable strongest edge); estimates never feed back
# into the selection.
SUITE_SEED = 20260100


FIVE_NODE_EDGES = frozenset({("A", "C"), ("B", "C"), ("B", "D"), ("C", "E"), ("D", "E")})
FIVE_NODE_BETA = {
    ("A", "C"): 0.5,
    ("B", "C"): 0.3,
    ("B", "D"): 0.6,
    ("C", "E"): 0.4,
    ("D", "E"): 0.5,
}


def five_node_dag() -> CausalDag:
    return CausalDag(("A", "B", "C", "D", "E"), FIVE_NODE_EDGES, "E")


def five_node_scm() -> LinearScm:
    dag = five_node_dag()
    beta = dict(FIVE_NODE_BETA)
    psi = {
        "C": 1.0 - (0.5**2 + 0.3**2),          # A, B independent
        "D": 1.0 - 0.6**2,
        "E": 1.0 - (0.4**2 + 0.5**2 + 2 * 0.4 * 0.5 * (0.3 * 0.6)),  # cov(C,D)=0.18
    }
    return LinearScm(dag=dag, beta=beta, psi=psi)


def unit_stats(columns: tuple[str, ...]) -> ColumnStats:
    p = len(columns)
    return ColumnStats(columns=columns, mean=np.zeros(p), std=np.ones(p),
                       min=np.full(p, -4.0), max=np.full(p, 4.0))


@pytest.fixture
def five_node_model() -> FittedModel:
    scm = five_node_scm()
    return FittedModel(
        dag=scm.dag,
        beta=scm.beta,
        residual_variance=scm.psi,
        exo_corr=np.eye(2),
        stats=unit_stats(("A", "B", "C", "D", "E")),
    )


def suite_instance(i: int) -> LinearScm:
    """Instance i of the 20-SCM acceptance suite (structurally filtered)."""
    n_nodes = 5 + (i % 4)
    attempt = 0
    while True:
        scm = random_scm(SUITE_SEED + 1000 * i + attempt, n_nodes, edge_prob=0.35)
        if _acceptable(scm):
            return scm
        attempt += 1


def _population_sigma(scm: LinearScm) -> tuple[np.ndarray, list[str]]:
    from causalwhatif.sem import implied_covariance
    from causalwhatif.sim import true_model

    return implied_covariance(true_model(scm))


def _pop_partial_corr(sigma: np.ndarray, idx: dict, x: str, y: str, s: tuple) -> float:
    names = [x, y, *s]
    sub = sigma[np.ix_([idx[v] for v in names], [idx[v] for v in names])]
    if len(s) == 0:
        return float(sub[0, 1])
    precision = np.linalg.inv(sub)
    return float(-precision[0, 1] / np.sqrt(precision[0, 0] * precision[1, 1]))


def _faithful_with_margin(scm: LinearScm, sigma: "np.ndarray", order: list[str],
                          margin: float = 0.05, max_cond: int = 3) -> bool:
    """Every true edge stays detectable under any conditioning set PC may try."""
    from itertools import combinations

    idx = {v: i for i, v in enumerate(order)}
    adjacency = {v: set() for v in scm.dag.nodes}
    for a, b in scm.dag.directed_edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    for x, y in scm.dag.directed_edges:
        pool = sorted((adjacency[x] | adjacency[y]) - {x, y})
        for size in range(0, max_cond + 1):
            for s in combinations(pool, size):
                if abs(_pop_partial_corr(sigma, idx, x, y, s)) < margin:
                    return False
    return True


def _population_fit_misfit(scm: LinearScm, dag, sigma: "np.ndarray",
                           order: list[str]) -> float:
    """ML discrepancy of fitting ``dag`` to the generator's population matrix."""
    idx = {v: i for i, v in enumerate(order)}
    p = len(order)
    beta = {}
    psi = {}
    for v in dag.endogenous:
        parents = dag.parents(v)
        pa = [idx[u] for u in parents]
        coefs = np.linalg.solve(sigma[np.ix_(pa, pa)], sigma[pa, idx[v]])
        for u, b in zip(parents, coefs):
            beta[(u, v)] = float(b)
        psi[v] = float(1.0 - coefs @ sigma[np.ix_(pa, pa)] @ coefs)
    from causalwhatif.sem import FittedModel, implied_covariance

    exo = dag.exogenous
    exo_corr = sigma[np.ix_([idx[v] for v in exo], [idx[v] for v in exo])].copy()
    model = FittedModel(dag=dag, beta=beta, residual_variance=psi,
                        exo_corr=exo_corr, stats=unit_stats(tuple(order)))
    implied, implied_order = implied_covariance(model)
    perm = [implied_order.index(v) for v in order]
    implied = implied[np.ix_(perm, perm)]
    sign, logdet_implied = np.linalg.slogdet(implied)
    _, logdet_true = np.linalg.slogdet(sigma)
    return float(logdet_implied - logdet_true
                 + np.trace(sigma @ np.linalg.inv(implied)) - p)


def _strongest_edge_is_load_bearing(scm: LinearScm, sigma: "np.ndarray",
                                    order: list[str],
                                    min_cfi_drop: float = 0.07) -> bool:
    """Deleting the strongest edge must cost at least ``min_cfi_drop`` of CFI
    in the population limit (free exogenous correlations can otherwise absorb
    an edge whose head becomes exogenous)."""
    from causalwhatif.graph import CausalDag

    ranked = sorted(scm.beta, key=lambda e: abs(scm.beta[e]), reverse=True)
    if len(ranked) > 1 and abs(scm.beta[ranked[0]]) - abs(scm.beta[ranked[1]]) < 0.05:
        return False  # the fitted argmax must match the generator's
    strongest = ranked[0]
    reduced = CausalDag(scm.dag.nodes, scm.dag.directed_edges - {strongest},
                        scm.dag.outcome)
    misfit = _population_fit_misfit(scm, reduced, sigma, order)
    baseline = float(-np.linalg.slogdet(sigma)[1])
    return misfit / baseline >= min_cfi_drop


def _coefficients_well_powered(scm: LinearScm, sigma: "np.ndarray", order: list[str],
                               n: int = 20_000,
                               tolerance: float = 0.02, z: float = 3.0) -> bool:
    """Population standard error of every coefficient must make the recovery
    tolerance at least a ``z``-sigma event (collinear parents inflate it)."""
    idx = {v: i for i, v in enumerate(order)}
    for v in scm.dag.endogenous:
        pa = [idx[u] for u in scm.dag.parents(v)]
        inv = np.linalg.inv(sigma[np.ix_(pa, pa)])
        worst = float(np.max(np.diag(inv)))
        if np.sqrt(scm.psi[v] * worst / n) * z > tolerance:
            return False
    return True


def _acceptable(scm: LinearScm) -> bool:
    dag = scm.dag
    p = len(dag.nodes)
    n_exo = len(dag.exogenous)
    t = len(scm.beta) + len(scm.psi) + n_exo * (n_exo - 1) // 2
    if p * (p + 1) // 2 - t < 1:
        return False  # saturated: no fit-index contrast possible
    strongest = max(scm.beta, key=lambda e: abs(scm.beta[e]))
    remaining = set(dag.directed_edges) - {strongest}
    if not any(dst == dag.outcome for _, dst in remaining):
        return False  # deleting it would orphan the outcome
    sigma, order = _population_sigma(scm)
    if not _coefficients_well_powered(scm, sigma, order):
        return False
    if not _strongest_edge_is_load_bearing(scm, sigma, order):
        return False
    if not _faithful_with_margin(scm, sigma, order):
        return False  # a conditioning set PC may try nearly cancels an edge
    return True


_SUITE_CACHE: list[LinearScm] | None = None


def suite() -> list[LinearScm]:
    global _SUITE_CACHE
    if _SUITE_CACHE is None:
        _SUITE_CACHE = [suite_instance(i) for i in range(20)]
    return _SUITE_CACHE


def make_csv(d: Dataset, path: Path) -> Path:
    lines = [",".join(d.columns)]
    lines += [",".join(repr(float(x)) for x in row) for row in d.rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


requires_housing = pytest.mark.skipif(
    not HOUSING_CSV.exists(),
    reason="data/housing.csv not present (no network in this environment); "
    "run scripts/fetch_housing.py where network is available",
)
