"""Turn a workspace manifest into a knowledge graph (workflow step one)."""

from __future__ import annotations

from pathlib import Path

from .. import kg
from ..errors import ValidationError
from ..ingest import (
    parse_apparmor_profile,
    parse_dockerfile,
    parse_host_descriptor,
    parse_run_command,
    parse_seccomp_profile,
    resolve_effective_config,
)
from ..ingest.types import RunOptions
from ..vulns import VulnSpec, bundled_catalog, load_catalog
from .manifest import WorkspaceManifest


def _first_command_line(text: str) -> str:
    for line in text.splitlines():
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            return stripped
    raise ValidationError("run-command file has no command line")


def ingest_workspace(manifest: WorkspaceManifest) -> tuple[kg.KnowledgeGraph,
                                                           dict[str, RunOptions]]:
    """Parse every artifact and build the deployment graph.

    Returns the graph plus the per-container run options (sessions patch
    those). Any parse error propagates; callers must not write partial
    snapshots.
    """
    host = parse_host_descriptor(manifest.host.read_text())
    graph = kg.init_baseline(host)
    run_options: dict[str, RunOptions] = {}
    for entry in manifest.containers:
        image = parse_dockerfile(entry.dockerfile.read_text())
        line = entry.run if entry.run is not None else \
            _first_command_line(entry.run_command.read_text())
        run = parse_run_command(line)

        seccomp = apparmor = None
        if run.seccomp not in ("default", "unconfined"):
            path = manifest.seccomp_profiles.get(run.seccomp)
            if path is None:
                candidate = Path(run.seccomp)
                path = candidate if candidate.is_absolute() else manifest.root / candidate
            if not path.exists():
                raise ValidationError(
                    f"named seccomp profile {run.seccomp!r} not found in workspace")
            seccomp = parse_seccomp_profile(path.read_text(), name=run.seccomp)
        if run.apparmor not in ("default", "unconfined"):
            path = manifest.apparmor_profiles.get(run.apparmor)
            if path is None:
                raise ValidationError(
                    f"named AppArmor profile {run.apparmor!r} not found in workspace")
            apparmor = parse_apparmor_profile(path.read_text())

        cfg = resolve_effective_config(
            image, run, seccomp=seccomp, apparmor=apparmor,
            container_name=entry.name or run.name)
        kg.add_container(graph, cfg)
        run_options[cfg.container_name] = run
    return graph, run_options


def load_workspace_catalog(manifest: WorkspaceManifest) -> list[VulnSpec]:
    if manifest.catalog is None:
        return bundled_catalog()
    return load_catalog(manifest.catalog.read_text())
