"""Do-intervention engine: profiles, propagation, and the evolution tracker.

A profile assigns values (original units) to nodes and marks which endogenous
nodes are pinned. Prediction standardizes the pinned/exogenous inputs, sweeps
the DAG in topological order with each free endogenous node set to the
coefficient-weighted sum of its parents, and reports which edges the
interventions deactivated and which variables can no longer reach the
outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .errors import InterventionError
from .graph import topo_order
from .sem import FittedModel

__all__ = [
    "Profile",
    "PredictionResult",
    "TrackerState",
    "initial_profile",
    "set_value",
    "clear_intervention",
    "predict",
    "non_impacting",
    "save_state",
    "restore",
]


@dataclass(frozen=True)
class Profile:
    """A value assignment plus the set of pinned endogenous nodes."""

    id: str  # "A" (green) or "B" (orange)
    values: dict[str, float] = field(default_factory=dict)
    interventions: frozenset[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "values", dict(self.values))
        object.__setattr__(self, "interventions", frozenset(self.interventions))


@dataclass(frozen=True)
class PredictionResult:
    values: dict[str, float]  # every node, original units
    outcome: float
    inactive_edges: frozenset[tuple[str, str]]
    non_impacting: frozenset[str]


def initial_profile(m: FittedModel, profile_id: str) -> Profile:
    """Profile with every exogenous node at its sample mean and nothing pinned."""
    values = {v: m.stats.for_column(v)[0] for v in m.dag.exogenous}
    return Profile(id=profile_id, values=values, interventions=frozenset())


def set_value(m: FittedModel, p: Profile, node: str, value: float) -> Profile:
    """Assign a value; pinning the node if it is endogenous.

    Values outside the observed [min, max] are legal; display clamping is a
    UI concern and the typed value is used in computation as-is. The outcome
    is never settable.
    """
    if node not in m.dag.nodes:
        raise InterventionError(f"unknown node {node!r}")
    if node == m.dag.outcome:
        raise InterventionError(f"outcome {node!r} cannot be intervened; it is always computed")
    values = dict(p.values)
    values[node] = float(value)
    interventions = set(p.interventions)
    if m.dag.role(node) == "endogenous":
        interventions.add(node)
    return replace(p, values=values, interventions=frozenset(interventions))


def clear_intervention(m: FittedModel, p: Profile, node: str) -> Profile:
    """Unpin an endogenous node so prediction re-estimates it from its parents."""
    if node not in p.interventions:
        raise InterventionError(f"node {node!r} is not intervened")
    values = dict(p.values)
    values.pop(node, None)
    return replace(p, values=values, interventions=p.interventions - {node})


def _active_edges(m: FittedModel, interventions: frozenset[str]) -> frozenset[tuple[str, str]]:
    return frozenset(e for e in m.dag.directed_edges if e[1] not in interventions)


def _reaches_outcome(m: FittedModel, active: frozenset[tuple[str, str]]) -> set[str]:
    """Nodes with a directed path to the outcome along active edges."""
    parents_of: dict[str, list[str]] = {v: [] for v in m.dag.nodes}
    for src, dst in active:
        parents_of[dst].append(src)
    reached = {m.dag.outcome}
    frontier = [m.dag.outcome]
    while frontier:
        v = frontier.pop()
        for u in parents_of[v]:
            if u not in reached:
                reached.add(u)
                frontier.append(u)
    return reached


def predict(m: FittedModel, p: Profile) -> PredictionResult:
    """Propagate the profile through the DAG under its interventions.

    Pinned and exogenous nodes contribute their standardized given values;
    every free endogenous node is recomputed, so stale profile values can
    never leak into the result.
    """
    z: dict[str, float] = {}
    given_values: dict[str, float] = {}
    for v in topo_order(m.dag):
        role = m.dag.role(v)
        if role == "exogenous" or v in p.interventions:
            given = p.values.get(v, m.stats.for_column(v)[0])
            given_values[v] = given
            z[v] = m.stats.to_standard(v, given)
        else:
            z[v] = sum(m.beta[(u, v)] * z[u] for u in m.dag.parents(v))
    # Fixed nodes report the given value verbatim; only computed nodes go
    # through de-standardization.
    values = {
        v: given_values[v] if v in given_values else m.stats.to_original(v, z[v])
        for v in z
    }
    active = _active_edges(m, p.interventions)
    inactive = frozenset(m.dag.directed_edges - active)
    impacting = _reaches_outcome(m, active)
    non_impact = frozenset(v for v in m.dag.nodes if v != m.dag.outcome and v not in impacting)
    return PredictionResult(
        values=values,
        outcome=values[m.dag.outcome],
        inactive_edges=inactive,
        non_impacting=non_impact,
    )


def non_impacting(m: FittedModel, p: Profile) -> frozenset[str]:
    """Nodes whose every directed path to the outcome runs through a pinned node.

    Equivalently: nodes with no path to the outcome once intervened nodes'
    incoming edges are deleted. Changing such a node cannot change the
    outcome.
    """
    active = _active_edges(m, p.interventions)
    impacting = _reaches_outcome(m, active)
    return frozenset(v for v in m.dag.nodes if v != m.dag.outcome and v not in impacting)


@dataclass(frozen=True)
class TrackerEntry:
    profile_a: Profile
    profile_b: Profile | None
    outcome_a: float
    outcome_b: float | None


@dataclass(frozen=True)
class TrackerState:
    """Append-only history of saved profile pairs; linear, not branched."""

    entries: tuple[TrackerEntry, ...] = ()
    cursor: int = -1


def save_state(t: TrackerState, m: FittedModel, profile_a: Profile,
               profile_b: Profile | None) -> TrackerState:
    """Append a snapshot of both profiles with their predicted outcomes."""
    entry = TrackerEntry(
        profile_a=profile_a,
        profile_b=profile_b,
        outcome_a=predict(m, profile_a).outcome,
        outcome_b=predict(m, profile_b).outcome if profile_b is not None else None,
    )
    entries = t.entries + (entry,)
    return TrackerState(entries=entries, cursor=len(entries) - 1)


def restore(t: TrackerState, index: int) -> tuple[TrackerState, Profile, Profile | None]:
    """Return the tracker with its cursor moved plus the stored profiles."""
    if not 0 <= index < len(t.entries):
        raise InterventionError(f"tracker index {index} out of range [0, {len(t.entries)})")
    entry = t.entries[index]
    return TrackerState(entries=t.entries, cursor=index), entry.profile_a, entry.profile_b
