"""Mixed graphs (editable, possibly partially directed) and causal DAGs.

A structure search returns a mixed graph that may still contain undirected
edges; the four edit actions let an expert reshape it. Once fully directed
and acyclic it is finalized into a :class:`CausalDag` with role tags and a
designated outcome node.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import CycleError, FinalizeError, GraphEditError

__all__ = [
    "EditAction",
    "MixedGraph",
    "CausalDag",
    "edit",
    "finalize",
    "layers",
    "topo_order",
]

Edge = tuple[str, str]


class EditAction(enum.Enum):
    ADD = "add"
    DIRECT = "direct"
    REMOVE = "remove"
    REVERSE = "reverse"


def _find_cycle(nodes, directed: frozenset[Edge]) -> list[str] | None:
    """Return one directed cycle as [v0, ..., v0], or None if acyclic."""
    children: dict[str, list[str]] = {v: [] for v in nodes}
    for src, dst in sorted(directed):
        children[src].append(dst)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in nodes}
    parent: dict[str, str] = {}
    for root in sorted(nodes):
        if color[root] != WHITE:
            continue
        stack = [(root, iter(children[root]))]
        color[root] = GRAY
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                if color[w] == WHITE:
                    color[w] = GRAY
                    parent[w] = v
                    stack.append((w, iter(children[w])))
                    advanced = True
                    break
                if color[w] == GRAY:
                    cycle = [w, v]
                    cur = v
                    while cur != w:
                        cur = parent[cur]
                        cycle.append(cur)
                    cycle.reverse()
                    return cycle
            if not advanced:
                color[v] = BLACK
                stack.pop()
    return None


@dataclass(frozen=True)
class MixedGraph:
    """Nodes plus directed and undirected edge sets.

    Immutable; edits return copies. A node pair appears in at most one edge
    set, in at most one direction, and never as a self-loop.
    """

    nodes: tuple[str, ...]
    directed_edges: frozenset[Edge] = field(default_factory=frozenset)
    undirected_edges: frozenset[frozenset[str]] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "directed_edges", frozenset(tuple(e) for e in self.directed_edges))
        object.__setattr__(
            self, "undirected_edges", frozenset(frozenset(e) for e in self.undirected_edges)
        )
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise GraphEditError("duplicate node names")
        seen: set[frozenset[str]] = set()
        for src, dst in self.directed_edges:
            if src == dst:
                raise GraphEditError(f"self-loop on {src!r}")
            if src not in node_set or dst not in node_set:
                raise GraphEditError(f"edge ({src!r}, {dst!r}) references unknown node")
            pair = frozenset((src, dst))
            if pair in seen:
                raise GraphEditError(f"pair {sorted(pair)} connected more than once")
            seen.add(pair)
        for pair in self.undirected_edges:
            if len(pair) != 2:
                raise GraphEditError(f"bad undirected edge {sorted(pair)}")
            if not pair <= node_set:
                raise GraphEditError(f"edge {sorted(pair)} references unknown node")
            if pair in seen:
                raise GraphEditError(f"pair {sorted(pair)} connected more than once")
            seen.add(pair)

    def connected(self, a: str, b: str) -> bool:
        pair = frozenset((a, b))
        return pair in self.undirected_edges or any(
            frozenset(e) == pair for e in self.directed_edges
        )


def edit(g: MixedGraph, action: EditAction, edge: Edge) -> MixedGraph:
    """Apply one edit and return the edited copy.

    ADD inserts a new directed edge, DIRECT orients an undirected one,
    REMOVE deletes whichever edge connects the pair, REVERSE flips a
    directed edge. ADD/DIRECT/REVERSE refuse to create a directed cycle.
    """
    src, dst = edge
    for v in (src, dst):
        if v not in g.nodes:
            raise GraphEditError(f"unknown node {v!r}")
    if src == dst:
        raise GraphEditError(f"self-loop on {src!r}")
    pair = frozenset((src, dst))
    directed = set(g.directed_edges)
    undirected = set(g.undirected_edges)

    if action is EditAction.ADD:
        if g.connected(src, dst):
            raise GraphEditError(f"{src!r} and {dst!r} are already connected")
        directed.add((src, dst))
    elif action is EditAction.DIRECT:
        if pair not in undirected:
            raise GraphEditError(f"no undirected edge between {src!r} and {dst!r}")
        undirected.remove(pair)
        directed.add((src, dst))
    elif action is EditAction.REMOVE:
        if pair in undirected:
            undirected.remove(pair)
        elif (src, dst) in directed:
            directed.remove((src, dst))
        elif (dst, src) in directed:
            directed.remove((dst, src))
        else:
            raise GraphEditError(f"{src!r} and {dst!r} are not connected")
    elif action is EditAction.REVERSE:
        if (src, dst) not in directed:
            raise GraphEditError(f"no directed edge {src!r} -> {dst!r}")
        directed.remove((src, dst))
        directed.add((dst, src))
    else:  # pragma: no cover - enum is exhaustive
        raise GraphEditError(f"unknown action {action!r}")

    if action in (EditAction.ADD, EditAction.DIRECT, EditAction.REVERSE):
        cycle = _find_cycle(g.nodes, frozenset(directed))
        if cycle is not None:
            raise CycleError(cycle)
    return MixedGraph(g.nodes, frozenset(directed), frozenset(undirected))


@dataclass(frozen=True)
class CausalDag:
    """A fully directed acyclic graph with role tags and one outcome node.

    Exogenous nodes are exactly those with no parents; the outcome is an
    endogenous node (it has at least one parent).
    """

    nodes: tuple[str, ...]
    directed_edges: frozenset[Edge]
    outcome: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "directed_edges", frozenset(tuple(e) for e in self.directed_edges))
        node_set = set(self.nodes)
        for src, dst in self.directed_edges:
            if src not in node_set or dst not in node_set:
                raise FinalizeError(f"edge ({src!r}, {dst!r}) references unknown node")
            if src == dst:
                raise FinalizeError(f"self-loop on {src!r}")
        cycle = _find_cycle(self.nodes, self.directed_edges)
        if cycle is not None:
            raise CycleError(cycle)
        if self.outcome not in node_set:
            raise FinalizeError(f"outcome {self.outcome!r} is not a node")
        if not self.parents(self.outcome):
            raise FinalizeError(f"outcome {self.outcome!r} has no parents")

    def parents(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(src for src, dst in self.directed_edges if dst == v))

    def children(self, v: str) -> tuple[str, ...]:
        return tuple(sorted(dst for src, dst in self.directed_edges if src == v))

    @property
    def exogenous(self) -> tuple[str, ...]:
        with_parents = {dst for _, dst in self.directed_edges}
        return tuple(v for v in sorted(self.nodes) if v not in with_parents)

    @property
    def endogenous(self) -> tuple[str, ...]:
        with_parents = {dst for _, dst in self.directed_edges}
        return tuple(v for v in sorted(self.nodes) if v in with_parents)

    def role(self, v: str) -> str:
        if v not in self.nodes:
            raise KeyError(f"unknown node {v!r}")
        return "endogenous" if v in set(self.endogenous) else "exogenous"


def finalize(g: MixedGraph, outcome: str) -> CausalDag:
    """Turn a fully directed, acyclic mixed graph into a CausalDag."""
    if g.undirected_edges:
        remaining = sorted(tuple(sorted(pair)) for pair in g.undirected_edges)
        raise FinalizeError(f"undirected edges remain: {remaining}")
    if outcome not in g.nodes:
        raise FinalizeError(f"outcome {outcome!r} is not a node")
    return CausalDag(g.nodes, g.directed_edges, outcome)


def topo_order(d: CausalDag) -> list[str]:
    """Topological order with alphabetical tie-breaking (Kahn's algorithm)."""
    indeg = {v: 0 for v in d.nodes}
    children: dict[str, list[str]] = {v: [] for v in d.nodes}
    for src, dst in d.directed_edges:
        indeg[dst] += 1
        children[src].append(dst)
    ready = sorted(v for v, k in indeg.items() if k == 0)
    order: list[str] = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        changed = False
        for w in children[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
                changed = True
        if changed:
            ready.sort()
    assert len(order) == len(d.nodes), "DAG invariant violated"
    return order


def layers(d: CausalDag) -> list[list[str]]:
    """Group nodes by longest-path depth from any source, for left-to-right display.

    Every edge goes from a strictly lower layer to a higher one.
    """
    depth = {v: 0 for v in d.nodes}
    for v in topo_order(d):
        for w in d.children(v):
            depth[w] = max(depth[w], depth[v] + 1)
    n_layers = max(depth.values(), default=0) + 1
    out: list[list[str]] = [[] for _ in range(n_layers)]
    for v in sorted(d.nodes):
        out[depth[v]].append(v)
    return out
