import json
from pathlib import Path

import pytest

from confstress import kg
from confstress.ahp import PreferenceVector
from confstress.ingest import (
    parse_dockerfile,
    parse_host_descriptor,
    parse_run_command,
    resolve_effective_config,
)
from confstress.vulns import bundled_catalog

LISTING1_COMMAND = ("docker run --rm -it --cap-add=SYS_ADMIN "
                    "--security-opt apparmor=unconfined ubuntu bash")

HOST_JSON = json.dumps({
    "hostname": "vm-1",
    "kernel": "5.16",
    "docker": "20.10.14",
    "containerd": "1.5.11",
    "runc": "1.0.3",
})

HARDENED_HOST_JSON = json.dumps({
    "hostname": "vm-1",
    "kernel": "5.17",
    "docker": "20.10.14",
    "containerd": "1.5.11",
    "runc": "1.0.3",
})


@pytest.fixture(scope="session")
def catalog():
    return bundled_catalog()


@pytest.fixture(scope="session")
def catalog_by_id(catalog):
    return {v.cve_id: v for v in catalog}


@pytest.fixture
def host():
    return parse_host_descriptor(HOST_JSON)


def make_container(command: str, name: str, dockerfile: str = "FROM ubuntu",
                   seccomp=None, apparmor=None):
    image = parse_dockerfile(dockerfile)
    run = parse_run_command(command)
    return resolve_effective_config(image, run, seccomp=seccomp,
                                    apparmor=apparmor, container_name=name), run


@pytest.fixture
def listing1_graph(host):
    """Baseline graph plus the vulnerable container from the escape PoC."""
    g = kg.init_baseline(host)
    cfg, run = make_container(LISTING1_COMMAND, "listing1")
    kg.add_container(g, cfg)
    return g, run


@pytest.fixture
def default_graph(host):
    g = kg.init_baseline(host)
    cfg, run = make_container("docker run ubuntu", "plain")
    kg.add_container(g, cfg)
    return g, run


@pytest.fixture
def preferences():
    return PreferenceVector({
        "version_upgrade": 2, "not_privileged": 5, "not_root": 3,
        "not_capability": 9, "not_syscall": 4, "read_only_fs": 2,
        "no_new_priv": 1,
    })


def write_workspace(root: Path, host_json: str = HOST_JSON,
                    run_command: str = LISTING1_COMMAND,
                    container_name: str = "listing1") -> Path:
    """Materialize a one-container workspace; returns the manifest path."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "host.json").write_text(host_json)
    (root / "Dockerfile").write_text("FROM ubuntu\n")
    (root / "run.txt").write_text("# container invocation\n" + run_command + "\n")
    manifest = {
        "host": "host.json",
        "containers": [
            {"name": container_name, "dockerfile": "Dockerfile", "run_command": "run.txt"},
        ],
        "snapshot_dir": "snapshots",
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2))
    return path


@pytest.fixture
def listing1_workspace(tmp_path):
    return write_workspace(tmp_path / "ws")
