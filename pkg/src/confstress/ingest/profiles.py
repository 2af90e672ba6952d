"""Seccomp (Docker JSON layout) and reduced-grammar AppArmor parsers."""

from __future__ import annotations

import json
import re

from .. import catalogs
from ..errors import ParseError, ValidationError
from .types import AppArmorProfile, SeccompProfile

_ACTION_MAP = {
    "SCMP_ACT_ALLOW": "allow",
    "SCMP_ACT_ERRNO": "errno",
    "SCMP_ACT_KILL": "kill",
    "SCMP_ACT_KILL_PROCESS": "kill",
    "SCMP_ACT_KILL_THREAD": "kill",
}


def parse_seccomp_profile(doc: dict | str, name: str = "custom") -> SeccompProfile:
    """Map a Docker seccomp profile document onto allowed/denied syscall sets."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"seccomp profile is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ValidationError("seccomp profile must be a JSON object")
    if "defaultAction" not in doc:
        raise ValidationError("seccomp profile is missing defaultAction")
    raw_default = doc["defaultAction"]
    if raw_default not in _ACTION_MAP:
        raise ValidationError(f"unknown defaultAction {raw_default!r}")
    default_action = _ACTION_MAP[raw_default]

    allowed: set[str] = set()
    denied: set[str] = set()
    for entry in doc.get("syscalls", []):
        action = entry.get("action")
        if action not in _ACTION_MAP:
            raise ValidationError(f"unknown syscall action {action!r}")
        names = entry.get("names")
        if names is None and "name" in entry:  # legacy single-name layout
            names = [entry["name"]]
        if not isinstance(names, list):
            raise ValidationError("syscalls entry has no names list")
        target = allowed if _ACTION_MAP[action] == "allow" else denied
        target.update(names)

    offenders = catalogs.validate_syscalls(allowed | denied)
    if offenders:
        raise ValidationError("unknown syscall names in profile",
                              offenders=sorted(offenders))
    return SeccompProfile(
        name=name,
        default_action=default_action,
        allowed_syscalls=frozenset(allowed),
        denied_syscalls=frozenset(denied),
    )


def default_seccomp_profile() -> SeccompProfile:
    """The bundled reference default profile (319-syscall allowlist)."""
    return parse_seccomp_profile(catalogs.default_seccomp_document(), name="default")


_PROFILE_RE = re.compile(r"^profile\s+(\S+)\s*\{$")
_CAP_RE = re.compile(r"^capability\s+([A-Za-z0-9_]+)\s*,$")


def parse_apparmor_profile(text: str) -> AppArmorProfile:
    """Parse the reduced AppArmor grammar.

    Accepted inside a `profile <name> {` block: `capability <name>,`,
    `deny mount,`, `deny network raw,`. Anything else is an error carrying
    its line number.
    """
    name = None
    caps: set[str] = set()
    denied_mounts = False
    denied_raw = False
    closed = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if name is None:
            m = _PROFILE_RE.match(line)
            if not m:
                raise ParseError(
                    f"line {lineno}: expected 'profile <name> {{'", position=lineno)
            name = m.group(1)
            continue
        if line == "}":
            closed = True
            continue
        if closed:
            raise ParseError(f"line {lineno}: content after closing brace",
                             position=lineno)
        m = _CAP_RE.match(line)
        if m:
            caps.add(catalogs.normalize_capability(m.group(1)))
            continue
        if line == "deny mount,":
            denied_mounts = True
            continue
        if line == "deny network raw,":
            denied_raw = True
            continue
        raise ParseError(f"line {lineno}: unparseable line {line!r}", position=lineno)
    if name is None:
        raise ParseError("no profile block found")
    if not closed:
        raise ParseError("profile block not closed")
    return AppArmorProfile(
        name=name,
        granted_capabilities=frozenset(caps),
        denied_mounts=denied_mounts,
        denied_raw_network=denied_raw,
    )


def docker_default_apparmor() -> AppArmorProfile:
    """The bundled docker-default reduction (grants the 14 default capabilities)."""
    return parse_apparmor_profile(catalogs.docker_default_apparmor_text())
