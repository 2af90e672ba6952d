"""Concrete configuration patches for ranked fix candidates."""

from __future__ import annotations

from dataclasses import dataclass, replace

from . import catalogs
from .ahp import FixCandidate
from .errors import PatchConflictError, ValidationError
from .ingest.types import ContainerConfig, RunOptions, SeccompProfile
from .versions import VersionId

DEFAULT_NONROOT_USER = "65534:65534"


@dataclass(frozen=True)
class ConfigPatch:
    """A fix made concrete: human action plus machine run-option diff."""

    fix_kind: str | None
    description: str
    add_options: tuple[str, ...] = ()
    remove_options: tuple[str, ...] = ()
    seccomp_deny: tuple[str, ...] = ()
    new_user: str | None = None
    advisory: bool = False
    component: str | None = None      # version_upgrade: what to upgrade
    safe_version: str | None = None   # version_upgrade: catalog target
    target_leaf: str = ""

    @property
    def applicable(self) -> bool:
        """Whether applying this patch can change the model at all."""
        if self.fix_kind == "version_upgrade":
            return self.safe_version is not None
        return bool(self.add_options or self.remove_options
                    or self.seccomp_deny or self.new_user)


def _seccomp_profile_name(cfg: ContainerConfig, denied: str) -> str:
    base = cfg.seccomp_profile_name or "default"
    return f"{base}-no-{denied}"


def fix_to_patch(candidate: FixCandidate, cfg: ContainerConfig,
                 nonroot_user: str = DEFAULT_NONROOT_USER) -> ConfigPatch:
    """Translate a fix candidate into the run-option diff that implements it.

    Host-level fixes (version upgrades) come back advisory. Vacuous fixes
    (removing --privileged from an unprivileged container) are errors.
    """
    kind = candidate.fix_kind
    atom = candidate.link.atom
    leaf = candidate.link.leaf_id

    if kind == "not_capability":
        cap = atom.name
        if cfg.privileged:
            raise ValidationError(
                f"{cap} is granted by --privileged; remove --privileged first")
        if cap not in cfg.effective_capabilities:
            raise ValidationError(f"nothing to remove: {cap} is not granted")
        return ConfigPatch(
            fix_kind=kind,
            description=f"drop capability {cap}",
            add_options=(f"--cap-drop={cap}",),
            remove_options=(f"--cap-add={cap}",),
            target_leaf=leaf,
        )
    if kind == "not_privileged":
        if not cfg.privileged:
            raise ValidationError("nothing to remove: container is not privileged")
        return ConfigPatch(
            fix_kind=kind,
            description="remove --privileged",
            remove_options=("--privileged",),
            target_leaf=leaf,
        )
    if kind == "not_root":
        if cfg.effective_user != "root":
            raise ValidationError("nothing to change: container does not run as root")
        return ConfigPatch(
            fix_kind=kind,
            description=f"run as user {nonroot_user}",
            add_options=(f"--user={nonroot_user}",),
            new_user=nonroot_user,
            target_leaf=leaf,
        )
    if kind == "not_syscall":
        name = atom.name
        if cfg.privileged:
            raise ValidationError(
                f"syscall {name} is allowed by --privileged; remove --privileged first")
        if name not in cfg.allowed_syscalls:
            raise ValidationError(f"nothing to remove: syscall {name} already denied")
        profile = _seccomp_profile_name(cfg, name)
        return ConfigPatch(
            fix_kind=kind,
            description=f"deny syscall {name} via seccomp profile {profile}",
            add_options=(f"--security-opt=seccomp={profile}",),
            seccomp_deny=(name,),
            target_leaf=leaf,
        )
    if kind == "read_only_fs":
        return ConfigPatch(
            fix_kind=kind,
            description="mount the container filesystem read-only",
            add_options=("--read-only",),
            target_leaf=leaf,
        )
    if kind == "no_new_priv":
        return ConfigPatch(
            fix_kind=kind,
            description="forbid privilege escalation (no-new-privileges)",
            add_options=("--security-opt=no-new-privileges",),
            target_leaf=leaf,
        )
    if kind == "version_upgrade":
        component = atom.component
        bound = atom.version
        safe = _first_safe_version(component, bound)
        return ConfigPatch(
            fix_kind=kind,
            description=(
                f"upgrade {component} to a version above {bound or 'the vulnerable range'}"
                + (f" (first safe catalog version: {safe})" if safe else "")),
            advisory=True,
            component=component,
            safe_version=safe,
            target_leaf=leaf,
        )
    # unmappable assumption: advisory, but still actionable when it names an option
    if atom.kind == "apparmor_unconfined":
        if cfg.privileged:
            raise ValidationError(
                "AppArmor is disabled by --privileged; remove --privileged first")
        return ConfigPatch(
            fix_kind=None,
            description="restore the default AppArmor profile",
            remove_options=("--security-opt=apparmor=unconfined",),
            advisory=True,
            target_leaf=leaf,
        )
    return ConfigPatch(
        fix_kind=None,
        description=f"manually invalidate assumption: {atom.describe()}",
        advisory=True,
        target_leaf=leaf,
    )


def _first_safe_version(component: str, bound: str) -> str | None:
    if not bound:
        return None
    try:
        hi = VersionId.parse(bound)
    except Exception:
        return None
    for name, v in zip(catalogs.version_strings(component),
                       catalogs.versions(component)):
        if hi < v:
            return name
    return None


def check_patch_conflicts(patch: ConfigPatch, applied: list[ConfigPatch]) -> None:
    """Reject a patch that undoes an already-applied one."""
    conflicts = []
    for prev in applied:
        overlap_ar = set(patch.add_options) & set(prev.remove_options)
        overlap_ra = set(patch.remove_options) & set(prev.add_options)
        for opt in sorted(overlap_ar | overlap_ra):
            conflicts.append(f"{opt} conflicts with applied patch {prev.description!r}")
    if conflicts:
        raise PatchConflictError("patch contradicts applied patches", conflicts)


def apply_patch_to_run(run: RunOptions, patch: ConfigPatch,
                       cfg: ContainerConfig) -> tuple[RunOptions, SeccompProfile | None]:
    """Apply a patch's option diff to run options.

    Returns the new options plus the generated seccomp profile when the
    patch narrows the syscall allowlist.
    """
    out = run
    profile: SeccompProfile | None = None
    for opt in patch.remove_options:
        if opt == "--privileged":
            out = replace(out, privileged=False)
        elif opt.startswith("--cap-add="):
            cap = opt.split("=", 1)[1]
            out = replace(out, cap_add=tuple(c for c in out.cap_add if c != cap))
        elif opt == "--security-opt=apparmor=unconfined":
            if out.apparmor == "unconfined":
                out = replace(out, apparmor="default")
    for opt in patch.add_options:
        if opt.startswith("--cap-drop="):
            cap = opt.split("=", 1)[1]
            # only needed when the capability survives the cap-add removal
            if cap in effective_after(out):
                if cap not in out.cap_drop:
                    out = replace(out, cap_drop=out.cap_drop + (cap,))
        elif opt.startswith("--user="):
            out = replace(out, user_override=opt.split("=", 1)[1])
        elif opt == "--read-only":
            out = replace(out, read_only=True)
        elif opt == "--security-opt=no-new-privileges":
            out = replace(out, no_new_privileges=True)
        elif opt.startswith("--security-opt=seccomp="):
            name = opt.split("seccomp=", 1)[1]
            allowed = frozenset(cfg.allowed_syscalls) - set(patch.seccomp_deny)
            profile = SeccompProfile(
                name=name, default_action="errno",
                allowed_syscalls=allowed)
            out = replace(out, seccomp=name)
    return out, profile


def effective_after(run: RunOptions) -> frozenset[str]:
    from .ingest.resolve import effective_capability_set

    if run.privileged:
        return frozenset(catalogs.capabilities())
    return effective_capability_set(run.cap_add, run.cap_drop)
