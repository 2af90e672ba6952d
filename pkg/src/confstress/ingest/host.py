"""Host descriptor loading (JSON, or a flat TOML-style key/value file)."""

from __future__ import annotations

import json
import re

from ..errors import ParseError, ValidationError
from ..versions import VersionId
from .types import HostDescriptor

_TOML_LINE = re.compile(r"""^([A-Za-z_][\w.-]*)\s*=\s*(?:"([^"]*)"|'([^']*)'|(\S+))\s*$""")

_ALIASES = {
    "kernel": "kernel_version",
    "kernel_version": "kernel_version",
    "docker": "docker_version",
    "docker_version": "docker_version",
    "containerd": "containerd_version",
    "containerd_version": "containerd_version",
    "runc": "runc_version",
    "runc_version": "runc_version",
    "hostname": "hostname",
    "engine": "engine",
}


def _parse_flat_toml(text: str) -> dict:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#") or line.startswith("["):
            continue
        m = _TOML_LINE.match(line)
        if not m:
            raise ParseError(f"line {lineno}: cannot parse key-value line {line!r}",
                             position=lineno)
        out[m.group(1)] = next(g for g in m.groups()[1:] if g is not None)
    return out


def parse_host_descriptor(text: str) -> HostDescriptor:
    text = text.strip()
    raw = json.loads(text) if text.startswith("{") else _parse_flat_toml(text)
    fields: dict[str, str] = {}
    for key, value in raw.items():
        canon = _ALIASES.get(key.lower())
        if canon is None:
            raise ValidationError(f"unknown host descriptor key {key!r}")
        fields[canon] = str(value)
    missing = [k for k in ("kernel_version", "docker_version",
                           "containerd_version", "runc_version") if k not in fields]
    if missing:
        raise ValidationError(f"host descriptor missing keys: {missing}")
    return HostDescriptor(
        hostname=fields.get("hostname", "host"),
        kernel_version=VersionId.parse(fields["kernel_version"]),
        docker_version=VersionId.parse(fields["docker_version"]),
        containerd_version=VersionId.parse(fields["containerd_version"]),
        runc_version=VersionId.parse(fields["runc_version"]),
        engine=fields.get("engine", "docker"),
    )
