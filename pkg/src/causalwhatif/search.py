"""Structure recovery with the PC algorithm and Fisher-z independence tests.

The output is a CPDAG-shaped :class:`~causalwhatif.graph.MixedGraph`: the
skeleton with unshielded colliders oriented and orientation rules applied to
closure. Remaining undirected edges are up to the expert's edit pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.stats import norm

from .dataset import Dataset
from .errors import SingularityError
from .graph import MixedGraph

__all__ = [
    "CiTestResult",
    "AlgorithmDescriptor",
    "partial_correlation",
    "ci_test",
    "pc_search",
    "list_algorithms",
]

_CORR_CLAMP = 1.0 - 1e-12


@dataclass(frozen=True)
class CiTestResult:
    x: str
    y: str
    conditioning_set: frozenset[str]
    partial_correlation: float
    statistic: float
    independent: bool


@dataclass(frozen=True)
class AlgorithmDescriptor:
    name: str
    params: dict[str, float] = field(default_factory=dict)


def _partial_from_corr(corr: np.ndarray, columns: tuple[str, ...], x: str, y: str,
                       conditioning: tuple[str, ...]) -> float:
    names = (x, y) + tuple(conditioning)
    idx = [columns.index(v) for v in names]
    sub = corr[np.ix_(idx, idx)]
    if len(conditioning) == 0:
        r = sub[0, 1]
    else:
        if np.linalg.cond(sub) > 1e12:
            raise SingularityError(
                f"correlation submatrix over {sorted(names)} is singular"
            )
        precision = np.linalg.inv(sub)
        r = -precision[0, 1] / np.sqrt(precision[0, 0] * precision[1, 1])
    return float(np.clip(r, -_CORR_CLAMP, _CORR_CLAMP))


def partial_correlation(d: Dataset, x: str, y: str, conditioning: set[str] | tuple[str, ...]) -> float:
    """Partial correlation of x and y given the conditioning set.

    Computed from the precision matrix of the sample correlation submatrix
    over {x, y} union S; the result is clamped into (-1, 1).
    """
    conditioning = tuple(sorted(conditioning))
    corr = np.corrcoef(d.rows, rowvar=False)
    corr = np.atleast_2d(corr)
    return _partial_from_corr(corr, d.columns, x, y, conditioning)


def _fisher_z(r: float, n: int, s_size: int) -> float:
    dof = n - s_size - 3
    if dof <= 0:
        raise ValueError(f"need n > |S| + 3, got n={n}, |S|={s_size}")
    return float(np.sqrt(dof) * abs(0.5 * np.log((1.0 + r) / (1.0 - r))))


def ci_test(d: Dataset, x: str, y: str, conditioning: set[str] | tuple[str, ...],
            alpha: float) -> CiTestResult:
    """Fisher-z conditional independence test at level alpha (two-sided)."""
    conditioning = tuple(sorted(conditioning))
    r = partial_correlation(d, x, y, conditioning)
    statistic = _fisher_z(r, d.n, len(conditioning))
    critical = float(norm.ppf(1.0 - alpha / 2.0))
    return CiTestResult(
        x=x,
        y=y,
        conditioning_set=frozenset(conditioning),
        partial_correlation=r,
        statistic=statistic,
        independent=statistic <= critical,
    )


def pc_search(d: Dataset, alpha: float = 0.01, max_cond: int = 3,
              sepsets_out: dict | None = None) -> MixedGraph:
    """PC on standardized data: skeleton, collider orientation, closure rules.

    Iteration order is deterministic (alphabetical node pairs, conditioning
    sets of growing size in lexicographic order) and adjacency sets are
    frozen per level, so the result does not depend on column order.

    ``sepsets_out``, when given, is filled with the separating set recorded
    for each removed pair (keyed by the sorted pair tuple).
    """
    if d.n <= max_cond + 3:
        raise ValueError(f"need n > max_cond + 3, got n={d.n}, max_cond={max_cond}")
    nodes = tuple(sorted(d.columns))
    corr = np.atleast_2d(np.corrcoef(d.rows, rowvar=False))
    critical = float(norm.ppf(1.0 - alpha / 2.0))

    def independent(x: str, y: str, s: tuple[str, ...]) -> bool:
        r = _partial_from_corr(corr, d.columns, x, y, s)
        return _fisher_z(r, d.n, len(s)) <= critical

    adjacency: dict[str, set[str]] = {v: set(nodes) - {v} for v in nodes}
    sepset: dict[tuple[str, str], frozenset[str]] = {}

    for level in range(max_cond + 1):
        snapshot = {v: tuple(sorted(adjacency[v])) for v in nodes}
        pairs = [(x, y) for x in nodes for y in snapshot[x] if x < y]
        for x, y in pairs:
            if y not in adjacency[x]:
                continue
            removed = False
            for base in (x, y):
                other = y if base == x else x
                candidates = tuple(v for v in snapshot[base] if v != other)
                if len(candidates) < level:
                    continue
                for s in combinations(candidates, level):
                    if independent(x, y, s):
                        adjacency[x].discard(y)
                        adjacency[y].discard(x)
                        sepset[(x, y)] = frozenset(s)
                        removed = True
                        break
                if removed:
                    break
        if all(len(adjacency[v]) - 1 < level + 1 for v in nodes):
            break

    if sepsets_out is not None:
        sepsets_out.update(sepset)

    # Orient unshielded colliders x -> z <- y when z is outside sepset(x, y).
    directed: set[tuple[str, str]] = set()
    for z in nodes:
        neighbors = tuple(sorted(adjacency[z]))
        for x, y in combinations(neighbors, 2):
            if y in adjacency[x]:
                continue  # shielded
            key = (x, y) if (x, y) in sepset else (y, x)
            if key not in sepset:
                continue
            if z not in sepset[key]:
                directed.add((x, z))
                directed.add((y, z))

    # Conflicting collider orientations (both directions claimed) fall back
    # to undirected rather than producing an inconsistent graph.
    conflicted = {(u, v) for (u, v) in directed if (v, u) in directed}
    directed -= conflicted

    undirected = {
        frozenset((x, y))
        for x in nodes
        for y in adjacency[x]
        if x < y and (x, y) not in directed and (y, x) not in directed
    }
    directed, undirected = _apply_meek_rules(nodes, adjacency, directed, undirected)
    return MixedGraph(nodes, frozenset(directed), frozenset(undirected))


def _apply_meek_rules(nodes, adjacency, directed: set, undirected: set):
    """Orientation rules applied to closure after collider detection.

    R1: a -> b - c with a, c nonadjacent        => b -> c
    R2: a -> c -> b with a - b                  => a -> b
    R3: a - b, a - c, a - d, c -> b, d -> b,
        c, d nonadjacent                        => a -> b
    R4: a - b, a - c, c -> d, d -> b,
        a, d adjacent, c, b nonadjacent         => a -> b
    """
    def adjacent(u, v):
        return v in adjacency[u]

    def orient(a, b):
        undirected.discard(frozenset((a, b)))
        directed.add((a, b))

    changed = True
    while changed:
        changed = False
        for pair in sorted(undirected, key=sorted):
            a, b = sorted(pair)
            for u, v in ((a, b), (b, a)):
                fired = False
                # R1
                for (s, t) in directed:
                    if t == u and not adjacent(s, v) and s != v:
                        fired = True
                        break
                # R2
                if not fired:
                    for c in sorted(adjacency[u]):
                        if (u, c) in directed and (c, v) in directed:
                            fired = True
                            break
                # R3
                if not fired:
                    into_v = [c for c in sorted(adjacency[u])
                              if (c, v) in directed and frozenset((u, c)) in undirected]
                    for c, dd in combinations(into_v, 2):
                        if not adjacent(c, dd):
                            fired = True
                            break
                # R4
                if not fired:
                    for c in sorted(adjacency[u]):
                        if frozenset((u, c)) not in undirected:
                            continue
                        for (s, t) in directed:
                            if s != c:
                                continue
                            if (t, v) in directed and adjacent(u, t) and not adjacent(c, v):
                                fired = True
                                break
                        if fired:
                            break
                if fired:
                    orient(u, v)
                    changed = True
                    break
            if changed:
                break
    return directed, undirected


def list_algorithms() -> list[AlgorithmDescriptor]:
    """Available structure-search algorithms and their parameter defaults."""
    return [AlgorithmDescriptor(name="pc", params={"alpha": 0.01, "max_cond": 3})]
