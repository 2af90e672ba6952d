"""Parser for `docker run` command lines and the inverse renderer."""

from __future__ import annotations

import shlex

from .. import catalogs
from ..errors import ParseError
from .types import ALL, RunOptions

# flags that take no value and do not affect the security model
_IGNORED_BARE = {"--rm", "--detach", "--interactive", "--tty", "--init", "--quiet"}
# flags whose value must be consumed but is otherwise irrelevant here
_IGNORED_VALUED = {
    "-e", "--env", "-p", "--publish", "-h", "--hostname", "-w", "--workdir",
    "--entrypoint", "-l", "--label", "--memory", "-m", "--cpus", "--restart",
    "--platform", "--pull", "--env-file",
}


def _is_combined_short(tok: str) -> bool:
    # -it, -itd and friends
    return (
        len(tok) > 1
        and tok[0] == "-"
        and tok[1] != "-"
        and all(c in "itd" for c in tok[1:])
    )


def _split_eq(tok: str) -> tuple[str, str | None]:
    if tok.startswith("--") and "=" in tok:
        flag, _, value = tok.partition("=")
        return flag, value
    return tok, None


class _Cursor:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.idx = 0

    def next_value(self, flag: str) -> str:
        """Consume the following token as the value of *flag*."""
        if self.idx + 1 >= len(self.tokens):
            raise ParseError(
                f"flag {flag!r} expects a value", token=flag, position=self.idx)
        self.idx += 1
        return self.tokens[self.idx]


def _norm_cap(token: str) -> str:
    if token.strip().upper() in (ALL, "CAP_ALL"):
        return ALL
    return catalogs.normalize_capability(token)


def parse_run_command(cmdline: str) -> RunOptions:
    """Parse one `docker run ...` line into RunOptions.

    Leading shell prompt characters ($, #, >) are stripped. Unrecognized
    flags are collected into `warnings`, never silently dropped; a flag
    that is missing its value raises ParseError naming token and position.
    """
    line = cmdline.strip()
    while line[:1] in ("$", "#", ">"):
        line = line[1:].lstrip()
    tokens = shlex.split(line)
    if tokens[:2] != ["docker", "run"]:
        raise ParseError("command line must begin with 'docker run'", token=line[:20])

    cur = _Cursor(tokens)
    cur.idx = 2
    privileged = False
    cap_add: list[str] = []
    cap_drop: list[str] = []
    apparmor = "default"
    seccomp = "default"
    nnp = False
    user = None
    read_only = False
    volumes: list[tuple[str, str, str]] = []
    network, ipc, pid = "bridge", "private", "private"
    devices: list[str] = []
    name = None
    image = None
    command: list[str] = []
    warnings: list[str] = []

    def handle_security_opt(value: str, position: int) -> None:
        nonlocal apparmor, seccomp, nnp
        if value.startswith("apparmor="):
            apparmor = value.split("=", 1)[1]
        elif value.startswith("seccomp="):
            seccomp = value.split("=", 1)[1]
        elif value in ("no-new-privileges", "no-new-privileges:true",
                       "no-new-privileges=true"):
            nnp = True
        else:
            raise ParseError(
                f"unsupported --security-opt value {value!r}",
                token=value, position=position)

    def parse_volume(value: str) -> tuple[str, str, str]:
        parts = value.split(":")
        if len(parts) == 1:
            return ("", parts[0], "rw")  # anonymous volume
        if len(parts) == 2:
            return (parts[0], parts[1], "rw")
        if len(parts) == 3:
            return (parts[0], parts[1], parts[2])
        raise ParseError(f"malformed volume spec {value!r}", token=value)

    while cur.idx < len(tokens):
        raw = tokens[cur.idx]
        if image is None and not raw.startswith("-"):
            image = raw
            command = tokens[cur.idx + 1:]
            break
        flag, inline = _split_eq(raw)
        pos = cur.idx

        def value() -> str:
            return inline if inline is not None else cur.next_value(flag)

        if flag == "--privileged":
            privileged = True
        elif flag == "--cap-add":
            cap_add.append(_norm_cap(value()))
        elif flag == "--cap-drop":
            cap_drop.append(_norm_cap(value()))
        elif flag == "--security-opt":
            handle_security_opt(value(), pos)
        elif flag in ("-u", "--user"):
            user = value()
        elif flag == "--read-only":
            read_only = True
        elif flag in ("-v", "--volume"):
            volumes.append(parse_volume(value()))
        elif flag in ("--network", "--net"):
            network = value()
        elif flag == "--ipc":
            ipc = value()
        elif flag == "--pid":
            pid = value()
        elif flag == "--device":
            devices.append(value())
        elif flag == "--name":
            name = value()
        elif flag in _IGNORED_BARE or _is_combined_short(flag):
            pass
        elif flag in _IGNORED_VALUED:
            value()
        else:
            warnings.append(f"unrecognized flag {raw!r} at position {pos}")
        cur.idx += 1

    return RunOptions(
        privileged=privileged,
        cap_add=tuple(cap_add),
        cap_drop=tuple(cap_drop),
        apparmor=apparmor,
        seccomp=seccomp,
        no_new_privileges=nnp,
        user_override=user,
        read_only=read_only,
        volumes=tuple(volumes),
        network_mode=network,
        ipc_mode=ipc,
        pid_mode=pid,
        devices=tuple(devices),
        name=name,
        image=image,
        command=tuple(command),
        warnings=tuple(warnings),
    )


def render_run_command(opts: RunOptions) -> str:
    """Render RunOptions back to a command line (normalized flag order)."""
    if opts.image is None:
        raise ValueError("cannot render RunOptions without an image")
    parts = ["docker", "run"]
    if opts.name:
        parts += ["--name", opts.name]
    if opts.privileged:
        parts.append("--privileged")
    if opts.user_override:
        parts += ["--user", opts.user_override]
    if opts.read_only:
        parts.append("--read-only")
    for cap in opts.cap_drop:
        parts.append(f"--cap-drop={cap}")
    for cap in opts.cap_add:
        parts.append(f"--cap-add={cap}")
    if opts.apparmor != "default":
        parts += ["--security-opt", f"apparmor={opts.apparmor}"]
    if opts.seccomp != "default":
        parts += ["--security-opt", f"seccomp={opts.seccomp}"]
    if opts.no_new_privileges:
        parts += ["--security-opt", "no-new-privileges"]
    if opts.network_mode != "bridge":
        parts += ["--network", opts.network_mode]
    if opts.ipc_mode != "private":
        parts += ["--ipc", opts.ipc_mode]
    if opts.pid_mode != "private":
        parts += ["--pid", opts.pid_mode]
    for host, cont, mode in opts.volumes:
        spec = cont if not host else f"{host}:{cont}"
        if host and mode != "rw":
            spec += f":{mode}"
        parts += ["-v", spec]
    for dev in opts.devices:
        parts += ["--device", dev]
    parts.append(opts.image)
    parts += list(opts.command)
    return " ".join(shlex.quote(p) for p in parts)
