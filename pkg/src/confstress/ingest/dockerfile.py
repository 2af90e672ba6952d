"""Minimal Dockerfile reader: FROM/USER/EXPOSE/VOLUME feed the model."""

from __future__ import annotations

import json
import re

from ..errors import ParseError
from .types import ImageSpec

_KNOWN_IGNORED = {
    "RUN", "CMD", "LABEL", "MAINTAINER", "ENV", "ADD", "COPY", "ENTRYPOINT",
    "ONBUILD", "STOPSIGNAL", "HEALTHCHECK", "SHELL", "ARG", "WORKDIR",
}


def _logical_lines(text: str) -> list[str]:
    lines: list[str] = []
    pending = ""
    for raw in text.splitlines():
        stripped = raw.strip()
        if not pending and (not stripped or stripped.startswith("#")):
            continue
        if stripped.endswith("\\"):
            pending += stripped[:-1] + " "
            continue
        lines.append((pending + stripped).strip())
        pending = ""
    if pending:
        lines.append(pending.strip())
    return lines


def _split_image_ref(ref: str) -> tuple[str, str]:
    # the tag colon is the one after the last slash
    slash = ref.rfind("/")
    colon = ref.rfind(":")
    if colon > slash:
        return ref[:colon], ref[colon + 1:]
    return ref, "latest"


def parse_dockerfile(text: str) -> ImageSpec:
    """Build an ImageSpec from Dockerfile text.

    FROM sets name:tag (last stage wins in multi-stage files); the last
    USER wins; EXPOSE and VOLUME accumulate. Every other instruction is
    ignored with a warning. Missing FROM is an error.
    """
    name = tag = None
    user = "root"
    ports: set[int] = set()
    volumes: set[str] = set()
    warnings: list[str] = []

    for line in _logical_lines(text):
        fields = line.split()
        instruction = fields[0].upper()
        args = fields[1:]
        if instruction == "FROM":
            if not args:
                raise ParseError("FROM requires an image reference", token=line)
            ref = args[0]
            name, tag = _split_image_ref(ref)
        elif name is None:
            raise ParseError(f"first instruction must be FROM, got {instruction}")
        elif instruction == "USER":
            if not args:
                raise ParseError("USER requires a name or uid", token=line)
            user = args[0]
        elif instruction == "EXPOSE":
            for a in args:
                m = re.match(r"^(\d+)(?:/(?:tcp|udp))?$", a)
                if not m:
                    raise ParseError(f"malformed EXPOSE argument {a!r}", token=a)
                ports.add(int(m.group(1)))
        elif instruction == "VOLUME":
            rest = line[len("VOLUME"):].strip()
            if rest.startswith("["):
                try:
                    volumes.update(json.loads(rest))
                except (json.JSONDecodeError, TypeError) as exc:
                    raise ParseError(f"malformed VOLUME list: {exc}", token=rest)
            else:
                volumes.update(args)
        elif instruction in _KNOWN_IGNORED:
            warnings.append(f"ignored instruction {instruction}")
        else:
            warnings.append(f"unknown instruction {instruction}")

    if name is None:
        raise ParseError("missing FROM instruction")
    return ImageSpec(
        name=name,
        tag=tag or "latest",
        default_user=user,
        exposed_ports=frozenset(ports),
        declared_volumes=frozenset(volumes),
        warnings=tuple(warnings),
    )
