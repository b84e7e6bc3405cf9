"""Synthetic linear-Gaussian SCMs with known ground truth.

Used by the test suite and the experiment scripts as an independent oracle:
the generator fixes the DAG, the standardized path coefficients, and the
residual variances, and the samples it draws have unit population variance
per node, so estimates can be compared directly against the generating
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import ColumnStats, Dataset
from .graph import CausalDag, topo_order
from .sem import FittedModel

__all__ = ["LinearScm", "random_dag", "random_scm", "simulate", "true_model"]


@dataclass(frozen=True)
class LinearScm:
    dag: CausalDag
    beta: dict[tuple[str, str], float]
    psi: dict[str, float]  # endogenous residual variances; exogenous are unit

    def noise_std(self, v: str) -> float:
        return float(np.sqrt(self.psi.get(v, 1.0)))


def random_dag(rng: np.random.Generator, n_nodes: int, edge_prob: float = 0.35) -> CausalDag:
    """Random DAG over alphabetically ordered nodes; the last node is the outcome.

    Edges only point from lower to higher index, so the node order is a
    topological order by construction. The outcome always gets at least one
    parent.
    """
    names = [f"X{i:02d}" for i in range(n_nodes)]
    edges = {
        (names[i], names[j])
        for i in range(n_nodes)
        for j in range(i + 1, n_nodes)
        if rng.random() < edge_prob
    }
    outcome = names[-1]
    if not any(dst == outcome for _, dst in edges):
        src = names[int(rng.integers(0, n_nodes - 1))]
        edges.add((src, outcome))
    return CausalDag(tuple(names), frozenset(edges), outcome)


def random_scm(seed: int, n_nodes: int, edge_prob: float = 0.35,
               beta_range: tuple[float, float] = (0.3, 0.8),
               psi_min: float = 0.2) -> LinearScm:
    """Random SCM with standardized coefficients of magnitude in ``beta_range``.

    Coefficient rows are redrawn until each node's explained variance leaves
    at least ``psi_min`` residual variance, keeping every node at unit
    population variance.
    """
    rng = np.random.default_rng(seed)
    dag = random_dag(rng, n_nodes, edge_prob)
    order = topo_order(dag)
    idx = {v: i for i, v in enumerate(order)}
    p = len(order)
    sigma = np.eye(p)
    beta: dict[tuple[str, str], float] = {}
    psi: dict[str, float] = {}
    lo, hi = beta_range

    for v in order:
        parents = dag.parents(v)
        if not parents:
            continue
        pa_idx = [idx[u] for u in parents]
        sub = sigma[np.ix_(pa_idx, pa_idx)]
        coefs = None
        for _ in range(200):
            draw = rng.uniform(lo, hi, size=len(parents)) * rng.choice([-1.0, 1.0], size=len(parents))
            explained = float(draw @ sub @ draw)
            if explained <= 1.0 - psi_min:
                coefs = draw
                break
        if coefs is None:
            # Dense, highly correlated parents: shrink a fresh draw into range.
            draw = rng.uniform(lo, hi, size=len(parents)) * rng.choice([-1.0, 1.0], size=len(parents))
            explained = float(draw @ sub @ draw)
            coefs = draw * np.sqrt((1.0 - psi_min) / explained)
        for u, b in zip(parents, coefs):
            beta[(u, v)] = float(b)
        psi[v] = 1.0 - float(coefs @ sub @ coefs)
        # Fill in the implied covariances with everything built so far.
        cov_with_prev = sigma[pa_idx, :] .T @ coefs
        sigma[idx[v], :] = cov_with_prev
        sigma[:, idx[v]] = cov_with_prev
        sigma[idx[v], idx[v]] = 1.0
    return LinearScm(dag=dag, beta=beta, psi=psi)


def simulate(scm: LinearScm, n: int, rng: np.random.Generator) -> Dataset:
    """Draw n observations; columns follow the DAG's node order."""
    order = topo_order(scm.dag)
    data = np.empty((n, len(order)))
    idx = {v: i for i, v in enumerate(order)}
    for v in order:
        noise = rng.normal(0.0, scm.noise_std(v), size=n)
        total = noise
        for u in scm.dag.parents(v):
            total = total + scm.beta[(u, v)] * data[:, idx[u]]
        data[:, idx[v]] = total
    return Dataset(tuple(order), data)


def true_model(scm: LinearScm) -> FittedModel:
    """The generating parameters wrapped as a fitted model (unit stats)."""
    nodes = tuple(topo_order(scm.dag))
    p = len(nodes)
    stats = ColumnStats(
        columns=nodes,
        mean=np.zeros(p),
        std=np.ones(p),
        min=np.full(p, -4.0),
        max=np.full(p, 4.0),
    )
    return FittedModel(
        dag=scm.dag,
        beta=dict(scm.beta),
        residual_variance=dict(scm.psi),
        exo_corr=np.eye(len(scm.dag.exogenous)),
        stats=stats,
    )
