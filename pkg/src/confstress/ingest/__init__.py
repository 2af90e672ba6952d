from .dockerfile import parse_dockerfile
from .host import parse_host_descriptor
from .profiles import (
    default_seccomp_profile,
    docker_default_apparmor,
    parse_apparmor_profile,
    parse_seccomp_profile,
)
from .resolve import effective_capability_set, resolve_effective_config
from .runcmd import parse_run_command, render_run_command
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
    HostDescriptor,
    ImageSpec,
    RunOptions,
    SeccompProfile,
)

__all__ = [
    "ALL",
    "APPARMOR_DEFAULT",
    "APPARMOR_UNCONFINED",
    "CAPSOURCE_CUSTOM",
    "CAPSOURCE_DEFAULT",
    "SECCOMP_DEFAULT",
    "SECCOMP_UNCONFINED",
    "AppArmorProfile",
    "ContainerConfig",
    "HostDescriptor",
    "ImageSpec",
    "RunOptions",
    "SeccompProfile",
    "default_seccomp_profile",
    "docker_default_apparmor",
    "effective_capability_set",
    "parse_apparmor_profile",
    "parse_dockerfile",
    "parse_host_descriptor",
    "parse_run_command",
    "parse_seccomp_profile",
    "render_run_command",
    "resolve_effective_config",
]
