"""Parsed configuration artifacts and the merged per-container view."""

from __future__ import annotations

from dataclasses import dataclass

from .. import catalogs
from ..errors import CatalogError, ValidationError
from ..versions import VersionId

ALL = "ALL"

APPARMOR_DEFAULT = "default"
APPARMOR_UNCONFINED = "unconfined"
SECCOMP_DEFAULT = "default"
SECCOMP_UNCONFINED = "unconfined"


@dataclass(frozen=True)
class HostDescriptor:
    hostname: str
    kernel_version: VersionId
    docker_version: VersionId
    containerd_version: VersionId
    runc_version: VersionId
    engine: str = "docker"

    def __post_init__(self) -> None:
        # membership of the engine component versions is checked at graph
        # init; the kernel is checked here because every downstream step
        # needs a catalog kernel
        catalogs.canonical_version_string("kernel", self.kernel_version)


@dataclass(frozen=True)
class ImageSpec:
    name: str
    tag: str = "latest"
    default_user: str = "root"
    exposed_ports: frozenset[int] = frozenset()
    declared_volumes: frozenset[str] = frozenset()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.name:
            raise ValidationError("image name must be non-empty")
        bad = [p for p in self.exposed_ports if not 1 <= p <= 65535]
        if bad:
            raise ValidationError(f"ports out of range: {sorted(bad)}")

    @property
    def reference(self) -> str:
        return f"{self.name}:{self.tag}"


def _check_cap_list(entries: tuple[str, ...], which: str) -> None:
    if len(set(entries)) != len(entries):
        raise ValidationError(f"duplicate capability in {which}")
    if ALL in entries and len(entries) > 1:
        raise ValidationError(f"{which}: ALL excludes other entries")
    for e in entries:
        if e != ALL:
            catalogs.normalize_capability(e)


@dataclass(frozen=True)
class RunOptions:
    """docker-run flags that matter to the security model.

    `apparmor`/`seccomp` hold "default", "unconfined", or a profile
    name/path; `cap_add`/`cap_drop` keep command-line order and may be the
    single token ALL.
    """

    privileged: bool = False
    cap_add: tuple[str, ...] = ()
    cap_drop: tuple[str, ...] = ()
    apparmor: str = APPARMOR_DEFAULT
    seccomp: str = SECCOMP_DEFAULT
    no_new_privileges: bool = False
    user_override: str | None = None
    read_only: bool = False
    volumes: tuple[tuple[str, str, str], ...] = ()  # (host, container, mode)
    network_mode: str = "bridge"
    ipc_mode: str = "private"
    pid_mode: str = "private"
    devices: tuple[str, ...] = ()
    name: str | None = None
    image: str | None = None
    command: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        _check_cap_list(self.cap_add, "cap_add")
        _check_cap_list(self.cap_drop, "cap_drop")


@dataclass(frozen=True)
class SeccompProfile:
    name: str
    default_action: str  # allow | errno | kill
    allowed_syscalls: frozenset[str] = frozenset()
    denied_syscalls: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if self.default_action not in ("allow", "errno", "kill"):
            raise ValidationError(f"bad defaultAction {self.default_action!r}")
        overlap = self.allowed_syscalls & self.denied_syscalls
        if overlap:
            raise ValidationError(f"syscalls both allowed and denied: {sorted(overlap)}")
        offenders = catalogs.validate_syscalls(self.allowed_syscalls | self.denied_syscalls)
        if offenders:
            raise ValidationError("unknown syscall names", offenders=sorted(offenders))

    def effective_allowlist(self) -> frozenset[str]:
        """Set of syscalls this profile lets through, resolved against the catalog."""
        if self.default_action == "allow":
            return frozenset(catalogs.syscalls()) - self.denied_syscalls
        return frozenset(self.allowed_syscalls)


@dataclass(frozen=True)
class AppArmorProfile:
    name: str
    granted_capabilities: frozenset[str] = frozenset()
    denied_mounts: bool = False
    denied_raw_network: bool = False

    def __post_init__(self) -> None:
        known = set(catalogs.capabilities())
        bad = sorted(c for c in self.granted_capabilities if c not in known)
        if bad:
            raise ValidationError("unknown capability names", offenders=bad)


CAPSOURCE_DEFAULT = "default-set"
CAPSOURCE_CUSTOM = "custom"


@dataclass(frozen=True)
class ContainerConfig:
    """Effective merged configuration of one container."""

    container_name: str
    image: ImageSpec
    effective_user: str
    effective_capabilities: frozenset[str]
    capability_source: str  # default-set | custom
    allowed_syscalls: frozenset[str]
    seccomp_mode: str  # default | unconfined | custom
    apparmor_mode: str  # default | unconfined | custom
    seccomp_profile_name: str | None = None
    apparmor_profile_name: str | None = None
    privileged: bool = False
    read_only: bool = False
    no_new_privileges: bool = False
    volumes: tuple[tuple[str, str, str], ...] = ()
    devices: tuple[str, ...] = ()
    network_mode: str = "bridge"
    ipc_mode: str = "private"
    pid_mode: str = "private"

    def __post_init__(self) -> None:
        full = frozenset(catalogs.capabilities())
        if self.privileged:
            if (self.effective_capabilities != full
                    or self.seccomp_mode != SECCOMP_UNCONFINED
                    or self.apparmor_mode != APPARMOR_UNCONFINED):
                raise ValidationError(
                    "privileged container must carry all capabilities with "
                    "seccomp and apparmor unconfined")
        unknown = self.effective_capabilities - full
        if unknown:
            raise CatalogError(f"unknown capabilities: {sorted(unknown)}")
