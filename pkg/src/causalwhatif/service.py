"""HTTP facade: sessions, model lifecycle, and interpretation endpoints.

One session walks the whole workflow: upload data, run structure search,
edit edges, finalize and fit, save/load the model file, then interpret with
two live profiles. All model math happens here (or deeper); clients only
render what these endpoints return.

State is kept in memory and persisted to disk (write-then-rename) on every
mutation, keyed by unguessable session ids.

Retry semantics: reads and value-setting are idempotent (repeating a
set-value or clear-intervention call converges to the same state), so they
are safe to retry blindly. Saving to the tracker is append-only and NOT
idempotent: a retried save produces a second identical entry. Edits are not
idempotent either (a retried reverse flips back).
"""

from __future__ import annotations

import datetime as dt
import json
import os
import secrets
import tempfile
import threading
from pathlib import Path
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import model_io, profile_map, search
from .realism import GmmModel, fit_profile_gmm, profile_feature_vector
from .realism import realism as realism_score
from .realism import typicality
from .dataset import Dataset, IngestConfig, compute_stats, ingest_csv, split, standardize
from .engine import (
    Profile,
    TrackerEntry,
    TrackerState,
    clear_intervention,
    initial_profile,
    predict,
    restore,
    save_state,
    set_value,
)
from .errors import (
    CausalWhatifError,
    CycleError,
    FitError,
    IngestError,
    InterventionError,
    MapError,
    ModelFileError,
    RealismError,
    SessionError,
    SingularityError,
)
from .graph import EditAction, MixedGraph, edit, finalize, layers, topo_order
from .sem import FittedModel, fit_indices, fit_model, fit_paths

__all__ = ["create_app", "SessionStore"]

_PERSIST_VERSION = 1


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat()


class Session:
    def __init__(self, session_id: str):
        self.id = session_id
        self.lock = threading.Lock()
        self.created = _now()
        self.updated = self.created
        self.dataset: Dataset | None = None
        self.ingest_dropped: list[tuple[int, str]] = []
        self.graph: MixedGraph | None = None
        self.outcome: str | None = None
        self.model: FittedModel | None = None
        self.gmm: GmmModel | None = None
        self.fingerprint: str | None = None
        self.profile_a: Profile | None = None
        self.profile_b: Profile | None = None
        self.tracker = TrackerState()

    def touch(self):
        self.updated = _now()

    def require_dataset(self) -> Dataset:
        if self.dataset is None:
            raise SessionError("session has no dataset; upload one first")
        return self.dataset

    def require_graph(self) -> MixedGraph:
        if self.graph is None:
            raise SessionError("session has no working graph; run a search or load one")
        return self.graph

    def require_model(self) -> FittedModel:
        if self.model is None:
            raise SessionError("session has no fitted model yet")
        return self.model

    def reset_interpretation(self):
        self.model = None
        self.gmm = None
        self.fingerprint = None
        self.profile_a = None
        self.profile_b = None
        self.tracker = TrackerState()


class SessionStore:
    """In-memory sessions backed by JSON files under ``data_dir``."""

    def __init__(self, data_dir: str | Path | None = None):
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self) -> Session:
        session = Session(secrets.token_urlsafe(32))  # 256 random bits
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            session = self._load(session_id)
            if session is None:
                raise SessionError(f"no such session: {session_id}")
            with self._lock:
                self._sessions.setdefault(session_id, session)
        return session

    def _path(self, session_id: str) -> Path | None:
        if self.data_dir is None:
            return None
        safe = "".join(c for c in session_id if c.isalnum() or c in "-_")
        return self.data_dir / f"{safe}.json"

    def persist(self, session: Session) -> None:
        path = self._path(session.id)
        if path is None:
            return
        payload = _session_to_dict(session)
        with tempfile.NamedTemporaryFile(
            "w", dir=path.parent, suffix=".tmp", delete=False, encoding="utf-8"
        ) as fh:
            json.dump(payload, fh)
            tmp = fh.name
        os.replace(tmp, path)

    def _load(self, session_id: str) -> Session | None:
        path = self._path(session_id)
        if path is None or not path.exists():
            return None
        return _session_from_dict(json.loads(path.read_text(encoding="utf-8")))


def _profile_to_dict(p: Profile | None) -> dict | None:
    if p is None:
        return None
    return {
        "id": p.id,
        "values": {k: float(v) for k, v in sorted(p.values.items())},
        "interventions": sorted(p.interventions),
    }


def _profile_from_dict(payload: dict | None) -> Profile | None:
    if payload is None:
        return None
    return Profile(
        id=payload["id"],
        values={k: float(v) for k, v in payload["values"].items()},
        interventions=frozenset(payload["interventions"]),
    )


def _graph_to_dict(g: MixedGraph | None) -> dict | None:
    if g is None:
        return None
    return {
        "nodes": list(g.nodes),
        "directed_edges": sorted([list(e) for e in g.directed_edges]),
        "undirected_edges": sorted(sorted(pair) for pair in g.undirected_edges),
    }


def _session_to_dict(s: Session) -> dict:
    return {
        "version": _PERSIST_VERSION,
        "id": s.id,
        "created": s.created,
        "updated": s.updated,
        "dataset": None if s.dataset is None else {
            "columns": list(s.dataset.columns),
            "rows": [[float(x) for x in row] for row in s.dataset.rows],
        },
        "ingest_dropped": [[n, reason] for n, reason in s.ingest_dropped],
        "graph": _graph_to_dict(s.graph),
        "outcome": s.outcome,
        "model": model_io.model_to_dict(s.model, s.gmm, s.fingerprint) if s.model else None,
        "profile_a": _profile_to_dict(s.profile_a),
        "profile_b": _profile_to_dict(s.profile_b),
        "tracker": {
            "cursor": s.tracker.cursor,
            "entries": [
                {
                    "profile_a": _profile_to_dict(e.profile_a),
                    "profile_b": _profile_to_dict(e.profile_b),
                    "outcome_a": e.outcome_a,
                    "outcome_b": e.outcome_b,
                }
                for e in s.tracker.entries
            ],
        },
    }


def _session_from_dict(payload: dict) -> Session:
    s = Session(payload["id"])
    s.created = payload["created"]
    s.updated = payload["updated"]
    if payload.get("dataset"):
        s.dataset = Dataset(
            tuple(payload["dataset"]["columns"]),
            np.array(payload["dataset"]["rows"], dtype=float),
        )
    s.ingest_dropped = [(int(n), reason) for n, reason in payload.get("ingest_dropped", [])]
    if payload.get("graph"):
        g = payload["graph"]
        s.graph = MixedGraph(
            tuple(g["nodes"]),
            frozenset(tuple(e) for e in g["directed_edges"]),
            frozenset(frozenset(e) for e in g["undirected_edges"]),
        )
    s.outcome = payload.get("outcome")
    if payload.get("model"):
        s.model, s.gmm, s.fingerprint = model_io.model_from_dict(payload["model"])
    s.profile_a = _profile_from_dict(payload.get("profile_a"))
    s.profile_b = _profile_from_dict(payload.get("profile_b"))
    tracker = payload.get("tracker") or {"cursor": -1, "entries": []}
    s.tracker = TrackerState(
        entries=tuple(
            TrackerEntry(
                profile_a=_profile_from_dict(e["profile_a"]),
                profile_b=_profile_from_dict(e["profile_b"]),
                outcome_a=e["outcome_a"],
                outcome_b=e["outcome_b"],
            )
            for e in tracker["entries"]
        ),
        cursor=tracker["cursor"],
    )
    return s


def _prediction_payload(m: FittedModel, p: Profile) -> dict:
    result = predict(m, p)
    return {
        "values": {k: float(v) for k, v in sorted(result.values.items())},
        "outcome": float(result.outcome),
        "inactive_edges": sorted([list(e) for e in result.inactive_edges]),
        "non_impacting": sorted(result.non_impacting),
    }


def _model_summary(s: Session) -> dict | None:
    if s.model is None:
        return None
    summary = model_io.model_to_dict(s.model, None, s.fingerprint)
    summary.pop("gmm")
    summary["layers"] = layers(s.model.dag)
    summary["has_gmm"] = s.gmm is not None
    return summary


def _state_payload(s: Session) -> dict:
    payload: dict[str, Any] = {
        "session_id": s.id,
        "created": s.created,
        "updated": s.updated,
        "dataset": None if s.dataset is None else {
            "columns": list(s.dataset.columns),
            "n": s.dataset.n,
            "dropped_rows": [[n, reason] for n, reason in s.ingest_dropped],
        },
        "graph": _graph_to_dict(s.graph),
        "outcome": s.outcome,
        "model": _model_summary(s),
        "profiles": {"A": None, "B": None},
        "tracker": {
            "cursor": s.tracker.cursor,
            "entries": [
                {"outcome_a": e.outcome_a, "outcome_b": e.outcome_b}
                for e in s.tracker.entries
            ],
        },
    }
    if s.model is not None and s.profile_a is not None:
        payload["profiles"]["A"] = {
            **_profile_to_dict(s.profile_a),
            "prediction": _prediction_payload(s.model, s.profile_a),
        }
        if s.profile_b is not None:
            payload["profiles"]["B"] = {
                **_profile_to_dict(s.profile_b),
                "prediction": _prediction_payload(s.model, s.profile_b),
            }
    return payload


class CreateSessionBody(BaseModel):
    csv: str | None = None
    delimiter: str = ","
    on_invalid: str = "drop"
    model: dict | None = None


class SearchBody(BaseModel):
    algorithm: str = "pc"
    params: dict[str, float] = {}


class EditBody(BaseModel):
    action: str
    src: str
    dst: str
    outcome: str | None = None


class FitBody(BaseModel):
    outcome: str
    test_fraction: float = 0.2
    seed: int = 0
    stats_scope: str = "full"
    gmm_k: int = 3


class ValueBody(BaseModel):
    node: str
    value: float


class PickBody(BaseModel):
    row: int


_ERROR_CODES: list[tuple[type[Exception], int, str]] = [
    (SessionError, 404, "not_found"),
    (CycleError, 409, "cycle"),
    (ModelFileError, 400, "model_file"),
    (IngestError, 400, "ingest"),
    (InterventionError, 400, "intervention"),
    (MapError, 400, "map"),
    (SingularityError, 422, "numeric"),
    (FitError, 422, "fit"),
    (RealismError, 422, "realism"),
    (CausalWhatifError, 400, "domain"),
    (ValueError, 400, "invalid"),
]


def _fit_gmm_for(s: Session, k: int, seed: int) -> GmmModel | None:
    if k <= 0 or s.dataset is None or s.model is None:
        return None
    return fit_profile_gmm(s.dataset, s.model, k=k, seed=seed)


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="causalwhatif", version="0.1.0")
    store = SessionStore(data_dir)
    app.state.store = store

    @app.exception_handler(Exception)
    async def handle_domain_errors(request: Request, exc: Exception):
        for etype, status, code in _ERROR_CODES:
            if isinstance(exc, etype):
                details: dict[str, Any] = {}
                if isinstance(exc, CycleError):
                    details["cycle"] = exc.cycle
                return JSONResponse(
                    status_code=status,
                    content={"code": code, "message": str(exc), "details": details},
                )
        raise exc

    def _ingest_into(session: Session, body: CreateSessionBody):
        if body.on_invalid not in ("drop", "error"):
            raise ValueError("on_invalid must be 'drop' or 'error'")
        with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False,
                                         encoding="utf-8") as fh:
            fh.write(body.csv or "")
            tmp = fh.name
        try:
            dataset, report = ingest_csv(
                tmp, IngestConfig(delimiter=body.delimiter, on_invalid=body.on_invalid)
            )
        finally:
            os.unlink(tmp)
        session.dataset = dataset
        session.ingest_dropped = report.dropped_rows
        session.graph = None
        session.outcome = None
        session.reset_interpretation()

    def _load_model_into(session: Session, payload: dict):
        model, gmm, fingerprint = model_io.model_from_dict(payload)
        warning = None
        if (
            session.dataset is not None
            and fingerprint
            and model_io.dataset_fingerprint(session.dataset) != fingerprint
        ):
            warning = "model fingerprint does not match the session dataset"
        session.model = model
        session.gmm = gmm
        session.fingerprint = fingerprint
        session.outcome = model.dag.outcome
        session.profile_a = initial_profile(model, "A")
        session.profile_b = None
        session.tracker = TrackerState()
        return warning

    @app.get("/api/v1/algorithms")
    def algorithms():
        return [
            {"name": a.name, "params": a.params} for a in search.list_algorithms()
        ]

    @app.post("/api/v1/sessions", status_code=201)
    def create_session(body: CreateSessionBody):
        if body.csv is None and body.model is None:
            raise ValueError("provide 'csv' (creation session) or 'model' (interpretation session)")
        session = store.create()
        with session.lock:
            warning = None
            if body.csv is not None:
                _ingest_into(session, body)
            if body.model is not None:
                warning = _load_model_into(session, body.model)
            session.touch()
            store.persist(session)
            payload = _state_payload(session)
            if warning:
                payload["warning"] = warning
            return payload

    @app.get("/api/v1/sessions/{session_id}/state")
    def get_state(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return _state_payload(session)

    @app.post("/api/v1/sessions/{session_id}/dataset")
    def replace_dataset(session_id: str, body: CreateSessionBody):
        if body.csv is None:
            raise ValueError("'csv' is required")
        session = store.get(session_id)
        with session.lock:
            _ingest_into(session, body)
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.post("/api/v1/sessions/{session_id}/search")
    def run_search(session_id: str, body: SearchBody):
        session = store.get(session_id)
        with session.lock:
            dataset = session.require_dataset()
            known = {a.name: a.params for a in search.list_algorithms()}
            if body.algorithm not in known:
                raise ValueError(f"unknown algorithm {body.algorithm!r}; available: {sorted(known)}")
            params = {**known[body.algorithm], **body.params}
            stats = compute_stats(dataset)
            session.graph = search.pc_search(
                standardize(dataset, stats),
                alpha=float(params["alpha"]),
                max_cond=int(params["max_cond"]),
            )
            session.reset_interpretation()
            session.touch()
            store.persist(session)
            return {"graph": _graph_to_dict(session.graph), "algorithm": body.algorithm,
                    "params": params}

    def _fit_preview(session: Session, outcome: str | None):
        if outcome is None or session.graph is None or session.graph.undirected_edges:
            return None
        if outcome not in session.graph.nodes:
            return None
        try:
            dag = finalize(session.graph, outcome)
        except CausalWhatifError:
            return None
        dataset = session.require_dataset()
        cols = tuple(dag.nodes)
        sub = Dataset(cols, np.column_stack([dataset.column(v) for v in cols]))
        stats = compute_stats(sub)
        sub_std = standardize(sub, stats)
        model = fit_paths(sub_std, dag, stats=stats)
        order = topo_order(dag)
        idx = [sub_std.column_index(v) for v in order]
        corr = np.atleast_2d(np.corrcoef(sub_std.rows[:, idx], rowvar=False))
        report = fit_indices(model, corr, sub.n, order=order)
        return {
            "chi_square": report.chi_square,
            "df": report.df,
            "cfi": report.cfi,
            "gfi": report.gfi,
            "agfi": report.agfi,
            "rmsea": report.rmsea,
            "n_used": report.n_used,
        }

    @app.post("/api/v1/sessions/{session_id}/edits")
    def apply_edit(session_id: str, body: EditBody):
        session = store.get(session_id)
        with session.lock:
            graph = session.require_graph()
            try:
                action = EditAction(body.action.lower())
            except ValueError:
                raise ValueError(
                    f"unknown action {body.action!r}; one of add, direct, remove, reverse"
                ) from None
            session.graph = edit(graph, action, (body.src, body.dst))
            if body.outcome is not None:
                session.outcome = body.outcome
            session.reset_interpretation()
            session.touch()
            store.persist(session)
            return {
                "graph": _graph_to_dict(session.graph),
                "fit_preview": _fit_preview(session, body.outcome or session.outcome),
            }

    @app.post("/api/v1/sessions/{session_id}/fit")
    def finalize_and_fit(session_id: str, body: FitBody):
        session = store.get(session_id)
        with session.lock:
            dataset = session.require_dataset()
            graph = session.require_graph()
            dag = finalize(graph, body.outcome)
            cols = tuple(dag.nodes)
            sub = Dataset(cols, np.column_stack([dataset.column(v) for v in cols]))
            data_split = (
                split(sub, body.test_fraction, body.seed) if body.test_fraction > 0 else None
            )
            session.model = fit_model(sub, dag, data_split, stats_scope=body.stats_scope)
            session.outcome = body.outcome
            session.fingerprint = model_io.dataset_fingerprint(dataset)
            session.gmm = _fit_gmm_for(session, body.gmm_k, body.seed)
            session.profile_a = initial_profile(session.model, "A")
            session.profile_b = None
            session.tracker = TrackerState()
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.get("/api/v1/sessions/{session_id}/model")
    def save_model(session_id: str):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            return model_io.model_to_dict(model, session.gmm, session.fingerprint)

    @app.post("/api/v1/sessions/{session_id}/model")
    def load_model(session_id: str, payload: dict):
        session = store.get(session_id)
        with session.lock:
            warning = _load_model_into(session, payload)
            session.touch()
            store.persist(session)
            state = _state_payload(session)
            if warning:
                state["warning"] = warning
            return state

    @app.post("/api/v1/sessions/{session_id}/profiles/{profile_id}/values")
    def set_profile_value(session_id: str, profile_id: str, body: ValueBody):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            profile = _require_profile(session, profile_id)
            updated = set_value(model, profile, body.node, body.value)
            _store_profile(session, profile_id, updated)
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.delete("/api/v1/sessions/{session_id}/profiles/{profile_id}/interventions/{node}")
    def delete_intervention(session_id: str, profile_id: str, node: str):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            profile = _require_profile(session, profile_id)
            updated = clear_intervention(model, profile, node)
            _store_profile(session, profile_id, updated)
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.post("/api/v1/sessions/{session_id}/compare/init")
    def init_comparison(session_id: str):
        session = store.get(session_id)
        with session.lock:
            session.require_model()
            if session.profile_a is None:
                raise SessionError("no live profile to clone")
            session.profile_b = Profile(
                id="B",
                values=dict(session.profile_a.values),
                interventions=session.profile_a.interventions,
            )
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.get("/api/v1/sessions/{session_id}/map")
    def neighbors_map(session_id: str, radius: float):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            dataset = session.require_dataset()
            if session.profile_a is None:
                raise SessionError("no live profile")
            nmap = profile_map.build_map(dataset, model, session.profile_a, radius)
            payload = {
                "radius": radius,
                "feature_columns": list(nmap.feature_columns),
                "axes": [[float(x) for x in row] for row in nmap.basis],
                "explained_variance": [float(v) for v in nmap.explained_variance],
                "points": [
                    {"x": p.x, "y": p.y, "outcome": p.outcome, "row": p.row}
                    for p in nmap.points
                ],
                "profiles": {
                    "A": list(profile_map.project(nmap, model, session.profile_a)),
                    "B": (
                        list(profile_map.project(nmap, model, session.profile_b))
                        if session.profile_b is not None else None
                    ),
                },
            }
            return payload

    @app.post("/api/v1/sessions/{session_id}/map/pick")
    def map_pick(session_id: str, body: PickBody, radius: float):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            dataset = session.require_dataset()
            if session.profile_a is None:
                raise SessionError("no live profile")
            nmap = profile_map.build_map(dataset, model, session.profile_a, radius)
            session.profile_b = profile_map.pick(nmap, dataset, model, body.row, "B")
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.get("/api/v1/sessions/{session_id}/realism")
    def realism_read(session_id: str, profile: str = "A"):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            if session.gmm is None:
                raise RealismError("no mixture model available (fit with gmm_k > 0)")
            target = _require_profile(session, profile)
            values = predict(model, target).values
            x = profile_feature_vector(model, values)
            reading = realism_score(session.gmm, x)
            return {
                "profile": profile,
                "score": reading.score,
                "component": reading.component,
                "label": reading.label,
                "meter_position": reading.meter_position,
                "typicality": typicality(session.gmm, x),
            }

    @app.get("/api/v1/sessions/{session_id}/tracker")
    def tracker_read(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return _state_payload(session)["tracker"]

    @app.post("/api/v1/sessions/{session_id}/tracker")
    def tracker_save(session_id: str):
        session = store.get(session_id)
        with session.lock:
            model = session.require_model()
            if session.profile_a is None:
                raise SessionError("no live profile to save")
            session.tracker = save_state(
                session.tracker, model, session.profile_a, session.profile_b
            )
            session.touch()
            store.persist(session)
            return _state_payload(session)

    @app.post("/api/v1/sessions/{session_id}/tracker/{index}/restore")
    def tracker_restore(session_id: str, index: int):
        session = store.get(session_id)
        with session.lock:
            session.require_model()
            session.tracker, profile_a, profile_b = restore(session.tracker, index)
            session.profile_a = profile_a
            session.profile_b = profile_b
            session.touch()
            store.persist(session)
            return _state_payload(session)

    return app


def _require_profile(session: Session, profile_id: str) -> Profile:
    if profile_id not in ("A", "B"):
        raise ValueError(f"profile must be 'A' or 'B', got {profile_id!r}")
    profile = session.profile_a if profile_id == "A" else session.profile_b
    if profile is None:
        raise SessionError(f"profile {profile_id} is not initialized")
    return profile


def _store_profile(session: Session, profile_id: str, profile: Profile) -> None:
    if profile_id == "A":
        session.profile_a = profile
    else:
        session.profile_b = profile
