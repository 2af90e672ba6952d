"""confstress command line: ingest | scan | stress | report | serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .. import kg
from ..ahp import FIX_KINDS, PreferenceVector
from ..errors import ConfstressError
from ..evaluate import scan_deployment
from ..ingest.runcmd import render_run_command
from ..session import ABORTED, StressSession, auto_accept, run_stress_session
from ..vulns import bundled_catalog, load_catalog
from .manifest import load_manifest
from .workspace import ingest_workspace

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2
EXIT_ABORTED = 3


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_ERROR


def _load_catalog_arg(path: str | None):
    if path is None:
        return bundled_catalog()
    return load_catalog(Path(path).read_text())


def _restore_snapshot(path: str) -> kg.KnowledgeGraph:
    return kg.restore(Path(path).read_text())


def cmd_ingest(args: argparse.Namespace) -> int:
    try:
        manifest = load_manifest(args.manifest)
        graph, _run_options = ingest_workspace(manifest)
    except (ConfstressError, OSError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    out = Path(args.snapshot) if args.snapshot else \
        (manifest.snapshot_dir or manifest.root) / "snapshot.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(kg.snapshot_json(graph), encoding="utf-8")
    stats = graph.stats()
    print(f"nodes={stats.node_count} edges={stats.edge_count}")
    print(f"snapshot written to {out}")
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    try:
        graph = _restore_snapshot(args.snapshot)
        catalog = _load_catalog_arg(args.catalog)
    except (ConfstressError, OSError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    report = scan_deployment(graph, catalog)
    doc = report.to_document()
    if args.report:
        Path(args.report).write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    satisfied = [v for v in report.verdicts if v.satisfied]
    for v in report.verdicts:
        mark = "EXPLOITABLE" if v.satisfied else "ok"
        print(f"{v.container:20s} {v.cve_id:20s} {mark}")
    print(f"satisfied={len(satisfied)} total={len(report.verdicts)} "
          f"resilience_score={report.resilience_score}")
    return EXIT_FINDINGS if satisfied else EXIT_OK


def _interactive_source(session: StressSession, candidate) -> str:
    patch = session.current_patch()
    print(f"\nsuggestion #{session.candidate_idx}: {candidate.label}"
          f" (fix kind: {candidate.fix_kind}, weight {candidate.weight:.3f})")
    print(f"  patch: {patch.description}")
    while True:
        answer = input("accept / reject / stop / risk? ").strip().lower()
        if answer in ("a", "accept"):
            return "accept"
        if answer in ("r", "reject"):
            return "reject"
        if answer in ("s", "stop"):
            return "stop"
        if answer in ("k", "risk"):
            return "accept_risk"


def cmd_stress(args: argparse.Namespace) -> int:
    try:
        graph = _restore_snapshot(args.snapshot)
        catalog = _load_catalog_arg(args.catalog)
        prefs_raw = json.loads(Path(args.prefs).read_text())
        missing = [k for k in FIX_KINDS if k not in prefs_raw]
        if missing:
            return _fail(f"preferences file is missing fix kinds: {missing}")
        preferences = PreferenceVector({k: int(v) for k, v in prefs_raw.items()})
    except (ConfstressError, OSError, json.JSONDecodeError, ValueError) as exc:
        return _fail(str(exc))

    by_id = {v.cve_id: v for v in catalog}
    if args.cve not in by_id:
        return _fail(f"unknown vulnerability {args.cve!r}")
    if args.container not in graph.container_configs:
        return _fail(f"unknown container {args.container!r}")

    out_dir = Path(args.out_dir) if args.out_dir else Path(args.snapshot).parent
    out_dir.mkdir(parents=True, exist_ok=True)
    source = auto_accept if args.auto else _interactive_source
    try:
        session = run_stress_session(
            graph, by_id[args.cve], args.container, preferences,
            decision_source=source,
            journal_path=out_dir / f"session-{args.cve}-{args.container}.jsonl")
    except ConfstressError as exc:
        return _fail(str(exc))

    print(f"session {session.id}: {session.state}, "
          f"resilience_score={session.resilience_score}")
    if session.state == ABORTED:
        print("snapshot unchanged")
        return EXIT_ABORTED

    (out_dir / "stressed-snapshot.json").write_text(
        kg.snapshot_json(graph), encoding="utf-8")
    patched = render_run_command(session.run_options)
    run_file = out_dir / f"run-{args.container}.txt"
    run_file.write_text(patched + "\n", encoding="utf-8")
    print(f"patched run command: {patched}")
    for profile in session.generated_profiles:
        profile_doc = {
            "defaultAction": "SCMP_ACT_ERRNO",
            "syscalls": [{"names": sorted(profile.allowed_syscalls),
                          "action": "SCMP_ACT_ALLOW"}],
        }
        (out_dir / f"{profile.name}.json").write_text(
            json.dumps(profile_doc, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    try:
        graph = _restore_snapshot(args.snapshot)
    except (ConfstressError, OSError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    stats = graph.stats()
    print(f"nodes: {stats.node_count}")
    print(f"edges: {stats.edge_count}")
    for label in sorted(stats.per_label):
        print(f"  {label:22s} {stats.per_label[label]}")
    print(f"containers: {', '.join(graph.containers()) or '(none)'}")
    if args.catalog is not None or args.scan:
        catalog = _load_catalog_arg(args.catalog)
        report = scan_deployment(graph, catalog)
        print("verdicts:")
        for v in report.verdicts:
            mark = "EXPLOITABLE" if v.satisfied else "ok"
            print(f"  {v.container:18s} {v.cve_id:20s} {mark}")
        print(f"resilience score: {report.resilience_score}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .api import ServiceState, create_app

    try:
        graph = _restore_snapshot(args.snapshot)
        catalog = _load_catalog_arg(args.catalog)
        host, _, port = args.bind.rpartition(":")
        state = ServiceState(graph, catalog, home=args.home)
        app = create_app(state)
        uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    except (ConfstressError, OSError, json.JSONDecodeError, ValueError) as exc:
        return _fail(str(exc))
    except SystemExit:
        raise
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confstress",
        description="Stress-test container deployments: model, detect, fix.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a workspace and write a snapshot")
    p.add_argument("--manifest", required=True)
    p.add_argument("--snapshot", help="output path (default: <snapshot_dir>/snapshot.json)")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("scan", help="evaluate every container against the catalog")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--catalog", help="catalog JSON (default: bundled dataset)")
    p.add_argument("--report", help="write the report JSON here")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("stress", help="run the interactive Test & Fix loop")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--catalog")
    p.add_argument("--cve", required=True)
    p.add_argument("--container", required=True)
    p.add_argument("--prefs", required=True, help="JSON file scoring the 7 fix kinds 1..9")
    p.add_argument("--auto", action="store_true", help="auto-accept the top suggestion")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_stress)

    p = sub.add_parser("report", help="print snapshot statistics")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--catalog")
    p.add_argument("--scan", action="store_true", help="include verdicts (bundled catalog)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="serve the HTTP API")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--catalog")
    p.add_argument("--bind", default="127.0.0.1:8787")
    p.add_argument("--home", help="state directory for session journals")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
