"""Workspace manifest: where a deployment's artifacts live on disk."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ValidationError

ENV_HOME = "CONFSTRESS_HOME"


@dataclass
class ContainerEntry:
    dockerfile: Path
    run_command: Path | None = None
    run: str | None = None  # inline command line, alternative to a file
    name: str | None = None


@dataclass
class WorkspaceManifest:
    root: Path
    host: Path
    containers: list[ContainerEntry] = field(default_factory=list)
    seccomp_profiles: dict[str, Path] = field(default_factory=dict)
    apparmor_profiles: dict[str, Path] = field(default_factory=dict)
    catalog: Path | None = None
    snapshot_dir: Path | None = None


def _resolve(root: Path, value: str) -> Path:
    p = Path(value)
    return p if p.is_absolute() else root / p


def load_manifest(path: str | Path) -> WorkspaceManifest:
    """Load and validate a manifest; every referenced path must exist."""
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"manifest {path} does not exist")
    doc = json.loads(path.read_text())
    root = Path(os.environ.get(ENV_HOME) or path.parent)

    def existing(value: str, what: str) -> Path:
        p = _resolve(root, value)
        if not p.exists():
            raise ValidationError(f"{what} path does not exist: {p}")
        return p

    if "host" not in doc:
        raise ValidationError("manifest is missing 'host'")
    containers = []
    for i, entry in enumerate(doc.get("containers", [])):
        if "dockerfile" not in entry:
            raise ValidationError(f"containers[{i}] is missing 'dockerfile'")
        if "run_command" not in entry and "run" not in entry:
            raise ValidationError(f"containers[{i}] needs 'run_command' or 'run'")
        containers.append(ContainerEntry(
            dockerfile=existing(entry["dockerfile"], f"containers[{i}].dockerfile"),
            run_command=(existing(entry["run_command"], f"containers[{i}].run_command")
                         if "run_command" in entry else None),
            run=entry.get("run"),
            name=entry.get("name"),
        ))
    snapshot_dir = None
    if "snapshot_dir" in doc:
        snapshot_dir = _resolve(root, doc["snapshot_dir"])
        snapshot_dir.mkdir(parents=True, exist_ok=True)
        if not os.access(snapshot_dir, os.W_OK):
            raise ValidationError(f"snapshot dir not writable: {snapshot_dir}")
    return WorkspaceManifest(
        root=root,
        host=existing(doc["host"], "host"),
        containers=containers,
        seccomp_profiles={name: existing(p, f"seccomp profile {name}")
                          for name, p in doc.get("seccomp_profiles", {}).items()},
        apparmor_profiles={name: existing(p, f"apparmor profile {name}")
                           for name, p in doc.get("apparmor_profiles", {}).items()},
        catalog=existing(doc["catalog"], "catalog") if "catalog" in doc else None,
        snapshot_dir=snapshot_dir,
    )
