"""The Test & Fix loop: suggest, decide, apply, re-evaluate.

One session stresses one (vulnerability, container) pair. While the
vulnerability query holds, assumptions are collected, ordered by AHP
weight, and suggested one at a time. An accepted fix is applied as a
config patch plus the equivalent journaled graph mutation, then the
query is re-run and the remaining assumptions re-ranked. A rejection
advances within the current ordering; exhausting it (or an explicit
stop) aborts.
"""

from __future__ import annotations

import datetime as _dt
import json
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import kg
from .ahp import (
    FIX_KINDS,
    FixCandidate,
    PreferenceVector,
    PriorityResult,
    costs_from_weights,
    priority_vector,
    rank_candidate_fixes,
    weights_from_preferences,
)
from .errors import SessionError, ValidationError
from .evaluate import evaluate, minimal_invalidation_sets
from .fixes import (
    ConfigPatch,
    apply_patch_to_run,
    check_patch_conflicts,
    fix_to_patch,
)
from .ingest.resolve import resolve_effective_config
from .ingest.types import (
    AppArmorProfile,
    ContainerConfig,
    RunOptions,
    SeccompProfile,
)
from .vulns import VulnSpec, build_andor_graph, link_assumptions

AWAITING_PREFERENCES = "AwaitingPreferences"
EVALUATING = "Evaluating"
SUGGESTING = "Suggesting"
APPLYING = "Applying"
RESOLVED = "Resolved"
ABORTED = "Aborted"

ACCEPT = "accept"
REJECT = "reject"
STOP = "stop"
ACCEPT_RISK = "accept_risk"

DecisionSource = Callable[["StressSession", FixCandidate | None], str]


def auto_accept(_session: "StressSession", _suggestion) -> str:
    """Decision source that always takes the most preferred fix."""
    return ACCEPT


def run_options_from_config(cfg: ContainerConfig) -> RunOptions:
    """Reconstruct run options from an effective config (restored snapshots)."""
    from . import catalogs

    default = frozenset(catalogs.default_capabilities())
    cap_add: tuple[str, ...] = ()
    cap_drop: tuple[str, ...] = ()
    if not cfg.privileged and cfg.capability_source == "custom":
        cap_add = tuple(sorted(cfg.effective_capabilities - default))
        cap_drop = tuple(sorted(default - cfg.effective_capabilities))
    return RunOptions(
        privileged=cfg.privileged,
        cap_add=cap_add,
        cap_drop=cap_drop,
        apparmor=(cfg.apparmor_profile_name if cfg.apparmor_mode == "custom"
                  else cfg.apparmor_mode),
        seccomp=(cfg.seccomp_profile_name if cfg.seccomp_mode == "custom"
                 else cfg.seccomp_mode),
        no_new_privileges=cfg.no_new_privileges,
        user_override=(cfg.effective_user
                       if cfg.effective_user != cfg.image.default_user else None),
        read_only=cfg.read_only,
        volumes=cfg.volumes,
        network_mode=cfg.network_mode,
        ipc_mode=cfg.ipc_mode,
        pid_mode=cfg.pid_mode,
        name=cfg.container_name,
        image=cfg.image.reference,
        devices=cfg.devices,
    )


def _profiles_from_config(cfg: ContainerConfig) -> tuple[SeccompProfile | None,
                                                         AppArmorProfile | None]:
    seccomp = apparmor = None
    if cfg.seccomp_mode == "custom":
        seccomp = SeccompProfile(
            name=cfg.seccomp_profile_name or "custom",
            default_action="errno",
            allowed_syscalls=cfg.allowed_syscalls)
    if cfg.apparmor_mode == "custom":
        apparmor = AppArmorProfile(
            name=cfg.apparmor_profile_name or "custom",
            granted_capabilities=cfg.effective_capabilities)
    return seccomp, apparmor


@dataclass
class SessionEvent:
    event: str
    payload: dict


class StressSession:
    """Algorithm-1 state machine for one vulnerability on one container."""

    def __init__(
        self,
        graph: kg.KnowledgeGraph,
        vuln: VulnSpec,
        container: str,
        run_options: RunOptions | None = None,
        journal_path: str | Path | None = None,
        session_id: str | None = None,
    ):
        if container not in graph.container_configs:
            raise SessionError(f"container {container!r} is not in the graph")
        self.id = session_id or uuid.uuid4().hex[:12]
        self.graph = graph
        self.vuln = vuln
        self.container = container
        self.andor = build_andor_graph(vuln, graph)
        self.state = AWAITING_PREFERENCES
        self.preferences: PreferenceVector | None = None
        self.weights: PriorityResult | None = None
        self.links = []
        self.verdict = None
        self.candidates: list[FixCandidate] = []
        self.ranking: list[FixCandidate] = []
        self.candidate_idx = 0
        self.applied_patches: list[ConfigPatch] = []
        self.generated_profiles: list[SeccompProfile] = []
        self.resilience_score = 0
        self.risk_accepted = False
        self.events: list[SessionEvent] = []
        self._journal_path = Path(journal_path) if journal_path else None
        self._replaying = False
        if run_options is None:
            run_options = run_options_from_config(graph.container_configs[container])
        self.run_options = run_options
        self._log("created", {"vulnerability": vuln.cve_id, "container": container})

    # -- journal --------------------------------------------------------------

    def _log(self, event: str, payload: dict) -> None:
        self.events.append(SessionEvent(event, payload))
        if self._journal_path and not self._replaying:
            line = json.dumps({
                "ts": _dt.datetime.now(_dt.timezone.utc).isoformat(),
                "session": self.id,
                "event": event,
                **payload,
            }, sort_keys=True)
            with open(self._journal_path, "a", encoding="utf-8") as f:
                f.write(line + "\n")
                f.flush()

    # -- state machine ---------------------------------------------------------

    @property
    def cfg(self) -> ContainerConfig:
        return self.graph.container_configs[self.container]

    def set_preferences(self, preferences: PreferenceVector) -> None:
        if self.state != AWAITING_PREFERENCES:
            raise SessionError(f"preferences cannot be set in state {self.state}")
        self.preferences = preferences
        self.weights = weights_from_preferences(preferences)
        self._log("preferences", {"scores": dict(sorted(preferences.scores.items()))})
        self._reevaluate()

    def set_preference_matrix(self, matrix) -> None:
        """Full pairwise judgment entry, for users who skip the 1..9 shortcut."""
        if self.state != AWAITING_PREFERENCES:
            raise SessionError(f"preferences cannot be set in state {self.state}")
        result = priority_vector(matrix)
        if set(result.weights) != set(FIX_KINDS):
            raise ValidationError(
                f"pairwise matrix must be {len(FIX_KINDS)}x{len(FIX_KINDS)}, "
                "one row per fix kind")
        self.weights = result
        self._log("preferences_matrix",
                  {"matrix": [[float(x) for x in row] for row in matrix]})
        self._reevaluate()

    def _reevaluate(self) -> None:
        self.state = EVALUATING
        self.links = link_assumptions(self.andor, self.graph, self.container)
        self.verdict = evaluate(self.andor, self.links, container=self.container)
        if not self.verdict.satisfied:
            self.state = RESOLVED
            self._log("resolved", {"resilience_score": self.resilience_score,
                                   "risk_accepted": self.risk_accepted})
            return
        cuts = minimal_invalidation_sets(
            self.andor, self.links, costs_from_weights(self.weights))
        ranked = rank_candidate_fixes(cuts, self.weights)
        self.ranking = ranked
        # only suggest fixes that can actually change the model: capability,
        # syscall and apparmor fixes are masked while --privileged holds, and
        # a version upgrade needs a safe catalog version to move to
        self.candidates = [c for c in ranked if self._applicable(c)]
        self.candidate_idx = 0
        if not self.candidates:
            self.state = ABORTED
            self._log("aborted", {"reason": "no applicable fix candidates"})
            return
        self.state = SUGGESTING
        self._log_suggestion()

    def _applicable(self, candidate: FixCandidate) -> bool:
        try:
            return fix_to_patch(candidate, self.cfg).applicable
        except ValidationError:
            return False

    def _log_suggestion(self) -> None:
        c = self.current_candidate()
        self._log("suggested", {
            "index": self.candidate_idx,
            "fix_kind": c.fix_kind,
            "label": c.label,
            "leaf": c.link.leaf_id,
            "weight": round(c.weight, 9),
        })

    def current_candidate(self) -> FixCandidate:
        if self.state != SUGGESTING:
            raise SessionError(f"no suggestion in state {self.state}")
        return self.candidates[self.candidate_idx]

    def current_patch(self) -> ConfigPatch:
        return fix_to_patch(self.current_candidate(), self.cfg)

    def decide(self, decision: str) -> None:
        """Apply one user decision (accept / reject / stop / accept_risk)."""
        if self.state != SUGGESTING:
            raise SessionError(f"no pending suggestion in state {self.state}")
        if decision == ACCEPT:
            self._accept()
        elif decision == REJECT:
            self._log("rejected", {"index": self.candidate_idx})
            self.candidate_idx += 1
            if self.candidate_idx >= len(self.candidates):
                self.state = ABORTED
                self._log("aborted", {"reason": "candidates exhausted"})
            else:
                self._log_suggestion()
        elif decision == STOP:
            self.state = ABORTED
            self._log("aborted", {"reason": "user stop"})
        elif decision == ACCEPT_RISK:
            self.risk_accepted = True
            self.state = RESOLVED
            self._log("resolved", {"resilience_score": self.resilience_score,
                                   "risk_accepted": True})
        else:
            raise ValidationError(f"unknown decision {decision!r}")

    def _accept(self) -> None:
        candidate = self.current_candidate()
        patch = fix_to_patch(candidate, self.cfg)
        check_patch_conflicts(patch, self.applied_patches)
        self.state = APPLYING
        self._log("accepted", {"index": self.candidate_idx,
                               "fix_kind": patch.fix_kind,
                               "description": patch.description})

        assumption_edges = frozenset(
            l.bound for l in self.links if l.bound_kind == "edge")
        if patch.fix_kind == "version_upgrade":
            receipts = kg.upgrade_component_version(
                self.graph, patch.component, patch.safe_version, assumption_edges)
        else:
            new_run, generated = apply_patch_to_run(self.run_options, patch, self.cfg)
            seccomp, apparmor = _profiles_from_config(self.cfg)
            if generated is not None:
                seccomp = generated
                self.generated_profiles.append(generated)
            new_cfg = resolve_effective_config(
                image=self.cfg.image,
                run=new_run,
                seccomp=seccomp if new_run.seccomp not in ("default", "unconfined") else None,
                apparmor=apparmor if new_run.apparmor not in ("default", "unconfined") else None,
                container_name=self.container,
            )
            receipts = kg.update_container_config(
                self.graph, self.container, new_cfg, assumption_edges)
            self.run_options = new_run
        removed = sum(1 for r in receipts
                      if r["op"] == "remove_edge" and r.get("assumption"))
        self.resilience_score += removed
        self.applied_patches.append(patch)
        self._log("applied", {
            "description": patch.description,
            "assumption_edges_removed": removed,
            "receipts": receipts,
        })
        self._reevaluate()

    # -- resumption -------------------------------------------------------------


def replay_session(
    graph: kg.KnowledgeGraph,
    vuln: VulnSpec,
    journal_path: str | Path,
) -> StressSession:
    """Rebuild a session from its journal by replaying inputs.

    The engine is deterministic, so replaying preferences and decisions
    reproduces state, graph mutations and score; the journal keeps
    appending afterwards.
    """
    path = Path(journal_path)
    lines = [json.loads(l) for l in path.read_text().splitlines() if l.strip()]
    if not lines:
        raise SessionError(f"journal {path} is empty")
    created = lines[0]
    s = _construct_silently(graph, vuln, created["container"], path, created["session"])
    s._replaying = True
    try:
        for entry in lines[1:]:
            if entry["event"] == "preferences":
                s.set_preferences(PreferenceVector(dict(entry["scores"])))
            elif entry["event"] == "preferences_matrix":
                s.set_preference_matrix(entry["matrix"])
            elif entry["event"] == "accepted":
                s.decide(ACCEPT)
            elif entry["event"] == "rejected":
                s.decide(REJECT)
            elif entry["event"] == "aborted" and entry.get("reason") == "user stop":
                s.decide(STOP)
            elif entry["event"] == "resolved" and entry.get("risk_accepted"):
                if s.state == SUGGESTING:
                    s.decide(ACCEPT_RISK)
    finally:
        s._replaying = False
    return s


def _construct_silently(graph, vuln, container, journal_path, session_id):
    s = StressSession.__new__(StressSession)
    s.id = session_id
    s.graph = graph
    s.vuln = vuln
    s.container = container
    s.andor = build_andor_graph(vuln, graph)
    s.state = AWAITING_PREFERENCES
    s.preferences = None
    s.weights = None
    s.links = []
    s.verdict = None
    s.candidates = []
    s.ranking = []
    s.candidate_idx = 0
    s.applied_patches = []
    s.generated_profiles = []
    s.resilience_score = 0
    s.risk_accepted = False
    s.events = []
    s._journal_path = Path(journal_path)
    s._replaying = False
    s.run_options = run_options_from_config(graph.container_configs[container])
    return s


def run_stress_session(
    graph: kg.KnowledgeGraph,
    vuln: VulnSpec,
    container: str,
    preferences: PreferenceVector,
    decision_source: DecisionSource = auto_accept,
    run_options: RunOptions | None = None,
    journal_path: str | Path | None = None,
) -> StressSession:
    """Drive a full session loop with the given decision source."""
    session = StressSession(graph, vuln, container,
                            run_options=run_options, journal_path=journal_path)
    session.set_preferences(preferences)
    while session.state == SUGGESTING:
        decision = decision_source(session, session.current_candidate())
        session.decide(decision)
    return session
