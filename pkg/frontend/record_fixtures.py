"""Record API fixtures for the UI contract tests.

Runs the real service in-process over the vulnerable one-container
workspace and dumps canonical JSON responses into fixtures/. Re-run after
any API change: python3 frontend/record_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from confstress import kg
from confstress.ingest import (
    parse_dockerfile,
    parse_host_descriptor,
    parse_run_command,
    resolve_effective_config,
)
from confstress.service.api import ServiceState, create_app
from confstress.vulns import bundled_catalog

FIXTURES = Path(__file__).parent / "fixtures"

HOST = json.dumps({"hostname": "vm-1", "kernel": "5.16", "docker": "20.10.14",
                   "containerd": "1.5.11", "runc": "1.0.3"})
COMMAND = ("docker run --rm -it --cap-add=SYS_ADMIN "
           "--security-opt apparmor=unconfined ubuntu bash")
PREFS = {"version_upgrade": 2, "not_privileged": 5, "not_root": 3,
         "not_capability": 9, "not_syscall": 4, "read_only_fs": 2,
         "no_new_priv": 1}
UNIFORM = {k: 5 for k in PREFS}


def build_client() -> TestClient:
    g = kg.init_baseline(parse_host_descriptor(HOST))
    image = parse_dockerfile("FROM ubuntu")
    run = parse_run_command(COMMAND)
    cfg = resolve_effective_config(image, run, container_name="listing1")
    kg.add_container(g, cfg)
    return TestClient(create_app(ServiceState(g, bundled_catalog())))


def dump(name: str, payload) -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / f"{name}.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n")


def main() -> None:
    client = build_client()
    dump("graph_stats", client.get("/v1/graph/stats").json())
    dump("vulns", client.get("/v1/vulns").json())
    dump("scan", client.post("/v1/scan").json())

    created = client.post("/v1/sessions", json={
        "cve_id": "cgroup-escape", "container": "listing1"}).json()
    dump("session_created", created)
    sid = created["id"]
    with_prefs = client.post(f"/v1/sessions/{sid}/preferences",
                             json={"scores": PREFS}).json()
    dump("session_prefs", with_prefs)

    # predicted verdict for the pending suggestion, via a what-if overlay
    edge = with_prefs["current_suggestion"]["bound_edge"]
    predict = client.post("/v1/whatif", json={"mutations": [
        {"op": "remove_edge", **edge}]}).json()
    dump("whatif_predict", predict)
    client.delete(f"/v1/whatif/{predict['id']}")

    accepted = client.post(f"/v1/sessions/{sid}/decision",
                           json={"decision": "accept"}).json()
    dump("decision_accept", accepted)
    dump("stats_after_accept", client.get("/v1/graph/stats").json())

    # fresh service: staging apparmor confinement + discard flow
    client2 = build_client()
    base_stats = client2.get("/v1/graph/stats").json()
    dump("stats_base", base_stats)
    confine = client2.post("/v1/whatif", json={"mutations": [
        {"op": "add_edge",
         "a": {"label": "Container", "name": "listing1"},
         "b": {"label": "AppArmorProfileNode", "name": "docker-default"},
         "relation": "CONFINED_BY"}]}).json()
    dump("whatif_confine", confine)
    dump("whatif_discard", client2.delete(f"/v1/whatif/{confine['id']}").json())
    dump("stats_after_discard", client2.get("/v1/graph/stats").json())

    # uniform preferences for the tie-break contract
    client3 = build_client()
    created3 = client3.post("/v1/sessions", json={
        "cve_id": "cgroup-escape", "container": "listing1"}).json()
    uniform = client3.post(f"/v1/sessions/{created3['id']}/preferences",
                           json={"scores": UNIFORM}).json()
    dump("session_uniform", uniform)

    # a rejected decision for the panel's reject flow
    client4 = build_client()
    created4 = client4.post("/v1/sessions", json={
        "cve_id": "cgroup-escape", "container": "listing1",
        "preferences": PREFS}).json()
    rejected = client4.post(f"/v1/sessions/{created4['id']}/decision",
                            json={"decision": "reject"}).json()
    dump("decision_reject", rejected)

    # and a stop for the abort badge
    client5 = build_client()
    created5 = client5.post("/v1/sessions", json={
        "cve_id": "cgroup-escape", "container": "listing1",
        "preferences": PREFS}).json()
    stopped = client5.post(f"/v1/sessions/{created5['id']}/decision",
                           json={"decision": "stop"}).json()
    dump("decision_stop", stopped)

    print(f"fixtures written to {FIXTURES}")


if __name__ == "__main__":
    main()
