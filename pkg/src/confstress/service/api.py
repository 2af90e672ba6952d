"""Local HTTP API exposing the graph, scans, sessions and what-if overlays.

All bodies are JSON; errors use {code, message, detail} with 400/404/409.
Graph mutations are serialized through one writer lock; what-if overlays
evaluate against a restored copy and never touch the base graph until
explicitly applied.
"""

from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import kg
from ..ahp import FIX_KINDS, PreferenceVector
from ..errors import ConfstressError, SessionError, ValidationError
from ..evaluate import scan_deployment
from ..session import (
    AWAITING_PREFERENCES,
    SUGGESTING,
    StressSession,
    replay_session,
)
from ..vulns import VulnSpec, build_andor_graph


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: str = ""):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail

    def response(self) -> JSONResponse:
        return JSONResponse(
            status_code=self.status,
            content={"code": self.code, "message": self.message,
                     "detail": self.detail})


class WhatIfOverlay:
    """Staged mutations evaluated against a copy of the base graph."""

    def __init__(self, overlay_id: str, base: kg.KnowledgeGraph, mutations: list[dict]):
        self.id = overlay_id
        self.mutations = mutations
        self.graph = kg.restore(kg.snapshot(base))
        for m in mutations:
            self.graph.apply_receipt(_mutation_receipt(m))


def _mutation_receipt(m: dict) -> dict:
    try:
        op = m["op"]
        if op not in ("add_edge", "remove_edge"):
            raise ApiError(400, "bad_mutation", f"unsupported op {op!r}")
        return {"op": op, "a": {"label": m["a"]["label"], "name": m["a"]["name"]},
                "b": {"label": m["b"]["label"], "name": m["b"]["name"]},
                "relation": m["relation"], "assumption": bool(m.get("assumption", True))}
    except (KeyError, TypeError) as exc:
        raise ApiError(400, "bad_mutation", f"malformed mutation: {exc}")


class ServiceState:
    """Everything one running service instance owns."""

    def __init__(self, graph: kg.KnowledgeGraph, catalog: list[VulnSpec],
                 home: str | Path | None = None):
        self.graph = graph
        self.catalog = catalog
        self.by_id = {v.cve_id: v for v in catalog}
        self.home = Path(home) if home else None
        self.sessions: dict[str, StressSession] = {}
        self.session_locks: dict[str, threading.Lock] = {}
        self.overlays: dict[str, WhatIfOverlay] = {}
        self.write_lock = threading.Lock()
        if self.home:
            (self.home / "sessions").mkdir(parents=True, exist_ok=True)
            self._resume_sessions()

    def _session_dir(self) -> Path | None:
        return self.home / "sessions" if self.home else None

    def _resume_sessions(self) -> None:
        for path in sorted((self.home / "sessions").glob("*.jsonl")):
            first = path.read_text().splitlines()
            if not first:
                continue
            head = json.loads(first[0])
            vuln = self.by_id.get(head.get("vulnerability"))
            if vuln is None or head.get("container") not in self.graph.container_configs:
                continue
            session = replay_session(self.graph, vuln, path)
            self.sessions[session.id] = session
            self.session_locks[session.id] = threading.Lock()

    def new_session(self, cve_id: str, container: str) -> StressSession:
        vuln = self.by_id.get(cve_id)
        if vuln is None:
            raise ApiError(404, "unknown_vulnerability", f"no catalog entry {cve_id!r}")
        if container not in self.graph.container_configs:
            raise ApiError(404, "unknown_container", f"no container {container!r}")
        journal = None
        if self._session_dir():
            seq = len(self.sessions) + 1
            sid = uuid.uuid4().hex[:12]
            journal = self._session_dir() / f"{seq:04d}-{sid}.jsonl"
        session = StressSession(self.graph, vuln, container, journal_path=journal)
        self.sessions[session.id] = session
        self.session_locks[session.id] = threading.Lock()
        return session

    def get_session(self, session_id: str) -> StressSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return session


def _stats_payload(g: kg.KnowledgeGraph) -> dict:
    stats = g.stats()
    return {
        "nodes": stats.node_count,
        "edges": stats.edge_count,
        "per_label": dict(sorted(stats.per_label.items())),
        "containers": g.containers(),
    }


def _suggestion_payload(session: StressSession) -> dict | None:
    if session.state != SUGGESTING:
        return None
    candidate = session.current_candidate()
    patch = session.current_patch()
    link = candidate.link
    bound_edge = None
    if link.bound_kind == "edge":
        a, b, rel = link.bound
        bound_edge = {"a": {"label": a[0], "name": a[1]},
                      "b": {"label": b[0], "name": b[1]}, "relation": rel}
    return {
        "index": session.candidate_idx,
        "fix_kind": candidate.fix_kind,
        "label": candidate.label,
        "weight": candidate.weight,
        "leaf": link.leaf_id,
        "atom": link.atom.describe(),
        "bound_edge": bound_edge,
        "patch": {
            "description": patch.description,
            "add_options": list(patch.add_options),
            "remove_options": list(patch.remove_options),
            "advisory": patch.advisory,
        },
    }


def _session_payload(session: StressSession) -> dict:
    return {
        "id": session.id,
        "state": session.state,
        "vulnerability": session.vuln.cve_id,
        "container": session.container,
        "resilience_score": session.resilience_score,
        "risk_accepted": session.risk_accepted,
        "verdict": None if session.verdict is None else {
            "satisfied": session.verdict.satisfied,
            "witness": list(session.verdict.witness),
        },
        "current_suggestion": _suggestion_payload(session),
        "candidates": [
            {"fix_kind": c.fix_kind, "label": c.label, "weight": c.weight,
             "leaf": c.link.leaf_id}
            for c in session.candidates
        ],
        "journal_tail": [
            {"event": e.event, **e.payload} for e in session.events[-10:]
        ],
    }


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="confstress", docs_url=None, redoc_url=None)

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return exc.response()

    @app.exception_handler(ConfstressError)
    async def _domain_error(_req: Request, exc: ConfstressError):
        status = 409 if isinstance(exc, SessionError) else 400
        return JSONResponse(status_code=status, content={
            "code": type(exc).__name__, "message": str(exc), "detail": ""})

    @app.get("/v1/graph/stats")
    def graph_stats():
        return _stats_payload(state.graph)

    @app.get("/v1/graph/exists")
    def graph_exists(a_label: str, a_name: str, b_label: str, b_name: str,
                     rel: str | None = None):
        exists = state.graph.exists_relation(
            (a_label, a_name), rel, (b_label, b_name))
        return {"exists": exists}

    @app.get("/v1/vulns")
    def vulns():
        out = []
        for spec in state.catalog:
            andor = build_andor_graph(spec, state.graph)
            out.append({
                "id": spec.cve_id,
                "cvss_v3": spec.cvss_v3,
                "mitre_tactic": spec.mitre_tactic,
                "mitre_technique": spec.mitre_technique,
                "category": spec.category,
                "andor_nodes": andor.node_count,
                "andor_edges": andor.edge_count,
            })
        return out

    @app.post("/v1/scan")
    async def scan(request: Request):
        body = await _json_body(request, optional=True)
        report = scan_deployment(state.graph, state.catalog)
        doc = report.to_document()
        payload = {"report": doc, "exit_hint": 1 if report.any_satisfied else 0}
        prior_path = (body or {}).get("diff_against")
        if prior_path:
            try:
                prior = json.loads(Path(prior_path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ApiError(400, "bad_diff_target", f"cannot read prior report: {exc}")
            payload["diff"] = _report_diff(prior, doc)
        return payload

    @app.post("/v1/sessions", status_code=201)
    async def create_session(request: Request):
        body = await _json_body(request)
        for key in ("cve_id", "container"):
            if key not in body:
                raise ApiError(400, "missing_field", f"body needs {key!r}")
        with state.write_lock:
            session = state.new_session(body["cve_id"], body["container"])
            if "preferences" in body:
                session.set_preferences(_preferences(body["preferences"]))
        return _session_payload(session)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        return _session_payload(state.get_session(session_id))

    @app.post("/v1/sessions/{session_id}/preferences")
    async def set_preferences(session_id: str, request: Request):
        session = state.get_session(session_id)
        body = await _json_body(request)
        matrix = body.get("matrix")
        prefs = None if matrix is not None else _preferences(body.get("scores", body))
        with state.session_locks[session_id], state.write_lock:
            if session.state != AWAITING_PREFERENCES:
                raise ApiError(409, "wrong_state",
                               f"session is {session.state}, not AwaitingPreferences")
            if matrix is not None:
                try:
                    session.set_preference_matrix(matrix)
                except ValidationError as exc:
                    raise ApiError(400, "bad_matrix", str(exc))
            else:
                session.set_preferences(prefs)
        return _session_payload(session)

    @app.post("/v1/sessions/{session_id}/decision")
    async def decide(session_id: str, request: Request):
        session = state.get_session(session_id)
        body = await _json_body(request)
        decision = body.get("decision")
        if decision not in ("accept", "reject", "stop", "accept_risk"):
            raise ApiError(400, "bad_decision", f"unknown decision {decision!r}")
        with state.session_locks[session_id], state.write_lock:
            if session.state != SUGGESTING:
                raise ApiError(409, "wrong_state",
                               f"session is {session.state}, no pending suggestion")
            session.decide(decision)
        return _session_payload(session)

    @app.post("/v1/whatif", status_code=201)
    async def create_whatif(request: Request):
        body = await _json_body(request)
        mutations = body.get("mutations")
        if not isinstance(mutations, list) or not mutations:
            raise ApiError(400, "bad_request", "body needs a non-empty mutations list")
        overlay_id = uuid.uuid4().hex[:12]
        try:
            overlay = WhatIfOverlay(overlay_id, state.graph, mutations)
        except kg.GraphError as exc:
            raise ApiError(400, "bad_mutation", str(exc))
        state.overlays[overlay_id] = overlay
        report = scan_deployment(overlay.graph, state.catalog)
        return {
            "id": overlay_id,
            "stats": _stats_payload(overlay.graph),
            "verdicts": report.to_document()["verdicts"],
        }

    @app.delete("/v1/whatif/{overlay_id}")
    def discard_whatif(overlay_id: str):
        if overlay_id not in state.overlays:
            raise ApiError(404, "unknown_overlay", f"no overlay {overlay_id!r}")
        del state.overlays[overlay_id]
        return {"discarded": overlay_id}

    @app.post("/v1/whatif/{overlay_id}/apply")
    def apply_whatif(overlay_id: str):
        overlay = state.overlays.get(overlay_id)
        if overlay is None:
            raise ApiError(404, "unknown_overlay", f"no overlay {overlay_id!r}")
        receipts = []
        with state.write_lock:
            try:
                for m in overlay.mutations:
                    receipt = _mutation_receipt(m)
                    state.graph.apply_receipt(receipt)
                    receipts.append(receipt)
            except kg.GraphError as exc:
                raise ApiError(409, "conflict", f"overlay no longer applies: {exc}")
        del state.overlays[overlay_id]
        return {"applied": receipts, "stats": _stats_payload(state.graph)}

    return app


async def _json_body(request: Request, optional: bool = False) -> dict:
    raw = await request.body()
    if not raw:
        if optional:
            return {}
        raise ApiError(400, "bad_request", "JSON body required")
    try:
        body = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ApiError(400, "bad_json", f"invalid JSON: {exc}")
    if not isinstance(body, dict):
        raise ApiError(400, "bad_request", "body must be a JSON object")
    return body


def _preferences(scores: dict) -> PreferenceVector:
    if not isinstance(scores, dict):
        raise ApiError(400, "bad_preferences", "scores must be an object")
    missing = [k for k in FIX_KINDS if k not in scores]
    if missing:
        raise ApiError(400, "bad_preferences",
                       f"missing fix kinds: {missing}")
    try:
        return PreferenceVector({k: int(v) for k, v in scores.items()})
    except (TypeError, ValueError) as exc:
        raise ApiError(400, "bad_preferences", f"scores must be integers 1..9: {exc}")
    except ValidationError as exc:
        raise ApiError(400, "bad_preferences", str(exc))


def _report_diff(prior: dict, current: dict) -> list[dict]:
    def index(doc: dict) -> dict[tuple[str, str], bool]:
        return {(v["container"], v["cve_id"]): v["satisfied"]
                for v in doc.get("verdicts", [])}

    before, after = index(prior), index(current)
    diff = []
    for key in sorted(set(before) | set(after)):
        was, now = before.get(key), after.get(key)
        if was != now:
            diff.append({"container": key[0], "cve_id": key[1],
                         "was": was, "now": now})
    return diff
