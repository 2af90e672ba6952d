"""Merge image defaults, run options and security profiles into one view."""

from __future__ import annotations

from .. import catalogs
from ..errors import ValidationError
from .profiles import default_seccomp_profile
from .types import (
    ALL,
    APPARMOR_DEFAULT,
    APPARMOR_UNCONFINED,
    CAPSOURCE_CUSTOM,
    CAPSOURCE_DEFAULT,
    SECCOMP_DEFAULT,
    SECCOMP_UNCONFINED,
    AppArmorProfile,
    ContainerConfig,
    ImageSpec,
    RunOptions,
    SeccompProfile,
)

# syscalls an AppArmor mount denial takes away on top of seccomp
_MOUNT_FAMILY = frozenset({"mount", "umount2", "move_mount", "fsmount", "mount_setattr"})


def effective_capability_set(cap_add: tuple[str, ...], cap_drop: tuple[str, ...]) -> frozenset[str]:
    """((default - drop) + add); the token ALL expands to the full catalog."""
    caps = set(catalogs.default_capabilities())
    if ALL in cap_drop:
        caps.clear()
    else:
        caps -= set(cap_drop)
    if ALL in cap_add:
        caps = set(catalogs.capabilities())
    else:
        caps |= set(cap_add)
    return frozenset(caps)


def resolve_effective_config(
    image: ImageSpec,
    run: RunOptions,
    seccomp: SeccompProfile | None = None,
    apparmor: AppArmorProfile | None = None,
    container_name: str | None = None,
    warnings: list[str] | None = None,
) -> ContainerConfig:
    """Resolve the effective per-container configuration.

    Run options override Dockerfile values; privileged overrides
    everything else (with a warning when combined with cap_drop). Named
    profiles must be supplied when the run options reference them.
    """
    warn = warnings if warnings is not None else []
    name = container_name or run.name or image.name
    user = run.user_override if run.user_override else image.default_user
    full_caps = frozenset(catalogs.capabilities())
    all_syscalls = frozenset(catalogs.syscalls())

    if run.privileged:
        if run.cap_drop:
            warn.append("--privileged given together with --cap-drop: privileged wins")
        if run.apparmor not in (APPARMOR_DEFAULT, APPARMOR_UNCONFINED) or \
           run.seccomp not in (SECCOMP_DEFAULT, SECCOMP_UNCONFINED):
            warn.append("--privileged disables named security profiles")
        return ContainerConfig(
            container_name=name,
            image=image,
            effective_user=user,
            effective_capabilities=full_caps,
            capability_source=CAPSOURCE_CUSTOM,
            allowed_syscalls=all_syscalls,
            seccomp_mode=SECCOMP_UNCONFINED,
            apparmor_mode=APPARMOR_UNCONFINED,
            privileged=True,
            read_only=run.read_only,
            no_new_privileges=run.no_new_privileges,
            volumes=run.volumes,
            devices=run.devices,
            network_mode=run.network_mode,
            ipc_mode=run.ipc_mode,
            pid_mode=run.pid_mode,
        )

    caps = effective_capability_set(run.cap_add, run.cap_drop)
    source = CAPSOURCE_DEFAULT if not run.cap_add and not run.cap_drop else CAPSOURCE_CUSTOM

    if run.seccomp == SECCOMP_DEFAULT:
        seccomp_mode = SECCOMP_DEFAULT
        profile_name = None
        allowed = default_seccomp_profile().effective_allowlist()
    elif run.seccomp == SECCOMP_UNCONFINED:
        seccomp_mode = SECCOMP_UNCONFINED
        profile_name = None
        allowed = all_syscalls
    else:
        if seccomp is None:
            raise ValidationError(
                f"run options name seccomp profile {run.seccomp!r} but none was supplied")
        seccomp_mode = "custom"
        profile_name = seccomp.name
        allowed = seccomp.effective_allowlist()

    apparmor_profile_name = None
    if run.apparmor == APPARMOR_DEFAULT:
        apparmor_mode = APPARMOR_DEFAULT
    elif run.apparmor == APPARMOR_UNCONFINED:
        apparmor_mode = APPARMOR_UNCONFINED
    else:
        if apparmor is None:
            raise ValidationError(
                f"run options name AppArmor profile {run.apparmor!r} but none was supplied")
        apparmor_mode = "custom"
        apparmor_profile_name = apparmor.name
        # a custom profile's grants and denials intersect what Docker granted
        caps = caps & apparmor.granted_capabilities
        if apparmor.denied_raw_network:
            caps = caps - {"NET_RAW"}
        if apparmor.denied_mounts:
            allowed = allowed - _MOUNT_FAMILY

    return ContainerConfig(
        container_name=name,
        image=image,
        effective_user=user,
        effective_capabilities=caps,
        capability_source=source,
        allowed_syscalls=allowed,
        seccomp_mode=seccomp_mode,
        apparmor_mode=apparmor_mode,
        seccomp_profile_name=profile_name,
        apparmor_profile_name=apparmor_profile_name,
        privileged=False,
        read_only=run.read_only,
        no_new_privileges=run.no_new_privileges,
        volumes=run.volumes,
        devices=run.devices,
        network_mode=run.network_mode,
        ipc_mode=run.ipc_mode,
        pid_mode=run.pid_mode,
    )
