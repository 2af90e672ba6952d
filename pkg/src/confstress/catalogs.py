"""Fixed catalogs the knowledge graph is initialized from.

Sizes are load-bearing: 41 capabilities, 364 syscalls, 50 kernel versions,
132 Docker versions, 83 containerd versions, 18 runc versions. The graph
cost model depends on them exactly.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .errors import CatalogError
from .versions import VersionId

ENGINE_COMPONENTS = ("docker", "containerd", "runc")


@lru_cache(maxsize=1)
def _raw() -> dict:
    with resources.files("confstress.data").joinpath("catalogs.json").open("r") as f:
        return json.load(f)


@lru_cache(maxsize=1)
def capabilities() -> tuple[str, ...]:
    return tuple(_raw()["capabilities"])


@lru_cache(maxsize=1)
def default_capabilities() -> tuple[str, ...]:
    """Docker's 14-entry default capability set."""
    return tuple(_raw()["default_capabilities"])


@lru_cache(maxsize=1)
def syscalls() -> tuple[str, ...]:
    return tuple(_raw()["syscalls"])


@lru_cache(maxsize=1)
def version_strings(component: str) -> tuple[str, ...]:
    """Catalog version strings for 'kernel', 'docker', 'containerd' or 'runc'."""
    key = f"{component}_versions"
    if key not in _raw():
        raise CatalogError(f"no version catalog for component {component!r}")
    return tuple(_raw()[key])


@lru_cache(maxsize=8)
def versions(component: str) -> tuple[VersionId, ...]:
    return tuple(VersionId.parse(s) for s in version_strings(component))


def canonical_version_string(component: str, version: VersionId | str) -> str:
    """Map a version (however spelled) to its catalog string.

    Raises CatalogError when the version is not in the component's catalog.
    """
    v = VersionId.parse(version) if isinstance(version, str) else version
    for s, parsed in zip(version_strings(component), versions(component)):
        if parsed == v:
            return s
    raise CatalogError(f"{component} version {v} is not in the catalog")


def normalize_capability(name: str) -> str:
    """Upper-case CAP_-less capability name, validated against the catalog."""
    n = name.strip().upper()
    if n.startswith("CAP_"):
        n = n[4:]
    if n not in set(capabilities()):
        raise CatalogError(f"unknown capability {name!r}")
    return n


def validate_syscalls(names) -> list[str]:
    """Return offenders (unknown syscall names), empty when all are known."""
    known = set(syscalls())
    return [n for n in names if n not in known]


@lru_cache(maxsize=1)
def default_seccomp_document() -> dict:
    """The bundled reference default seccomp profile (Docker JSON layout)."""
    with resources.files("confstress.data").joinpath("seccomp_default.json").open("r") as f:
        return json.load(f)


@lru_cache(maxsize=1)
def docker_default_apparmor_text() -> str:
    """The bundled docker-default AppArmor reduction."""
    return resources.files("confstress.data").joinpath("apparmor_docker_default.txt").read_text()
