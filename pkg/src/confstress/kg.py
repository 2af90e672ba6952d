"""In-memory labeled undirected multigraph of one deployment.

Node identity is the (label, name) pair. Edges are undirected and unique
per (endpoints, relation). Every mutation after baseline initialization is
journaled with enough payload to replay it or apply its inverse.

The construction rules pin the storage-cost model exactly: baseline
691 nodes / 6 edges, +2/+2 per image, and for default containers
+3 nodes / +10 edges each on top of 333 lazily materialized shared edges
(14 capability-set members + 319 default-profile syscalls).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import catalogs
from .errors import CatalogError, GraphError, SnapshotError
from .ingest.types import (
    APPARMOR_DEFAULT,
    CAPSOURCE_DEFAULT,
    SECCOMP_DEFAULT,
    ContainerConfig,
    HostDescriptor,
    ImageSpec,
)
from .versions import VersionId

# node labels
HOST_VM = "HostVM"
KERNEL_COMPONENT = "KernelComponent"
KERNEL_VERSION = "KernelVersion"
ENGINE_COMPONENT = "EngineComponent"
DOCKER_VERSION = "DockerVersion"
CONTAINERD_VERSION = "ContainerdVersion"
RUNC_VERSION = "RuncVersion"
CAPABILITY = "Capability"
SYSCALL = "Syscall"
IMAGE = "Image"
TAG = "Tag"
CONTAINER = "Container"
USER = "User"
APPARMOR_PROFILE = "AppArmorProfileNode"
SECCOMP_PROFILE = "SeccompProfileNode"
CAPSET = "CapSet"
NETWORK_MODE = "NetworkMode"
IPC_MODE = "IpcMode"
PID_MODE = "PidMode"
UTS_MODE = "UtsMode"

NODE_LABELS = (
    HOST_VM, KERNEL_COMPONENT, KERNEL_VERSION, ENGINE_COMPONENT,
    DOCKER_VERSION, CONTAINERD_VERSION, RUNC_VERSION, CAPABILITY, SYSCALL,
    IMAGE, TAG, CONTAINER, USER, APPARMOR_PROFILE, SECCOMP_PROFILE, CAPSET,
    NETWORK_MODE, IPC_MODE, PID_MODE, UTS_MODE,
)

# relations
RUNS = "RUNS"
HOSTS = "HOSTS"
VERSION = "VERSION"
USES = "USES"
STORES = "STORES"
TAGGED = "TAGGED"
FROM = "FROM"
RUNS_AS = "RUNS_AS"
CONFINED_BY = "CONFINED_BY"
FILTERED_BY = "FILTERED_BY"
GRANTED = "GRANTED"
INCLUDES = "INCLUDES"
ALLOWS = "ALLOWS"
NETWORK = "NETWORK"
IPC = "IPC"
PID = "PID"
HAS = "HAS"

RELATIONS = (
    RUNS, HOSTS, VERSION, USES, STORES, TAGGED, FROM, RUNS_AS, CONFINED_BY,
    FILTERED_BY, GRANTED, INCLUDES, ALLOWS, NETWORK, IPC, PID, HAS,
)

NodeRef = tuple[str, str]  # (label, name)
EdgeKey = tuple[NodeRef, NodeRef, str]

KERNEL_NODE: NodeRef = (KERNEL_COMPONENT, "kernel")
ENGINE_NODE: NodeRef = (ENGINE_COMPONENT, "docker")
DEFAULT_CAPSET: NodeRef = (CAPSET, "default")
DEFAULT_SECCOMP: NodeRef = (SECCOMP_PROFILE, "default")
DEFAULT_APPARMOR: NodeRef = (APPARMOR_PROFILE, "docker-default")
ROOT_USER: NodeRef = (USER, "root")

_VERSION_LABELS = {
    "kernel": KERNEL_VERSION,
    "docker": DOCKER_VERSION,
    "containerd": CONTAINERD_VERSION,
    "runc": RUNC_VERSION,
}


def edge_key(a: NodeRef, b: NodeRef, relation: str) -> EdgeKey:
    """Canonical undirected edge key: endpoints ordered by (label, name)."""
    return (a, b, relation) if a <= b else (b, a, relation)


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    per_label: dict[str, int] = field(default_factory=dict)


class KnowledgeGraph:
    """Deployment knowledge graph with journaled mutations.

    Single-writer / multi-reader: mutations go through this handle,
    concurrent readers should work on `snapshot()` documents or a
    `restore()`d copy.
    """

    def __init__(self) -> None:
        self.nodes: set[NodeRef] = set()
        self.edges: set[EdgeKey] = set()
        self._adj: dict[NodeRef, set[tuple[NodeRef, str]]] = {}
        self.journal: list[dict] = []
        self._journaling = True
        self.host: HostDescriptor | None = None
        self.images: dict[str, ImageSpec] = {}
        self.container_configs: dict[str, ContainerConfig] = {}

    # -- primitive mutations ------------------------------------------------

    def _record(self, receipt: dict) -> dict:
        if self._journaling:
            self.journal.append(receipt)
        return receipt

    def add_node(self, label: str, name: str) -> NodeRef:
        if label not in NODE_LABELS:
            raise GraphError(f"unknown node label {label!r}")
        ref = (label, name)
        if ref in self.nodes:
            raise GraphError(f"duplicate node ({label}, {name})")
        self.nodes.add(ref)
        self._adj[ref] = set()
        self._record({"op": "add_node", "label": label, "name": name,
                      "inverse": "remove_node"})
        return ref

    def remove_node(self, ref: NodeRef) -> dict:
        if ref not in self.nodes:
            raise GraphError(f"no such node {ref}")
        if self._adj[ref]:
            raise GraphError(f"node {ref} still has edges")
        self.nodes.remove(ref)
        del self._adj[ref]
        return self._record({"op": "remove_node", "label": ref[0], "name": ref[1],
                             "inverse": "add_node"})

    def add_edge(self, a: NodeRef, b: NodeRef, relation: str,
                 assumption: bool = False) -> dict:
        if relation not in RELATIONS:
            raise GraphError(f"unknown relation {relation!r}")
        if a not in self.nodes or b not in self.nodes:
            raise GraphError(f"edge endpoint missing: {a if a not in self.nodes else b}")
        key = edge_key(a, b, relation)
        if key in self.edges:
            raise GraphError(f"duplicate edge {key}")
        self.edges.add(key)
        self._adj[key[0]].add((key[1], relation))
        self._adj[key[1]].add((key[0], relation))
        return self._record(_edge_receipt("add_edge", key, assumption))

    def remove_edge(self, a: NodeRef, b: NodeRef, relation: str,
                    assumption: bool = False) -> dict:
        key = edge_key(a, b, relation)
        if key not in self.edges:
            raise GraphError(f"no such edge {key}")
        self.edges.remove(key)
        self._adj[key[0]].discard((key[1], relation))
        self._adj[key[1]].discard((key[0], relation))
        return self._record(_edge_receipt("remove_edge", key, assumption))

    def apply_receipt(self, receipt: dict) -> None:
        """Replay a journal receipt (used by crash recovery)."""
        op = receipt["op"]
        if op == "add_node":
            self.add_node(receipt["label"], receipt["name"])
        elif op == "remove_node":
            self.remove_node((receipt["label"], receipt["name"]))
        elif op == "add_edge":
            self.add_edge(_ref(receipt["a"]), _ref(receipt["b"]), receipt["relation"],
                          assumption=receipt.get("assumption", False))
        elif op == "remove_edge":
            self.remove_edge(_ref(receipt["a"]), _ref(receipt["b"]), receipt["relation"],
                             assumption=receipt.get("assumption", False))
        else:
            raise GraphError(f"unknown receipt op {op!r}")

    # -- queries ------------------------------------------------------------

    def has_node(self, ref: NodeRef) -> bool:
        return ref in self.nodes

    def has_edge(self, a: NodeRef, b: NodeRef, relation: str) -> bool:
        return edge_key(a, b, relation) in self.edges

    def neighbors(self, ref: NodeRef, relation: str | None = None,
                  label: str | None = None) -> Iterator[NodeRef]:
        for other, rel in self._adj.get(ref, ()):
            if relation is not None and rel != relation:
                continue
            if label is not None and other[0] != label:
                continue
            yield other

    def exists_relation(self, node_a: NodeRef, relation: str | None,
                        node_b: NodeRef) -> bool:
        """Listing-3 style existence query.

        Unknown node names yield False, never an error. The pair
        (Permissions, "Privileged") is a virtual predicate answered from
        the capability grants (a privileged container holds all 41 direct
        GRANTED edges); it matches under relation HAS or no relation.
        """
        for virtual, other in ((node_a, node_b), (node_b, node_a)):
            if virtual == ("Permissions", "Privileged"):
                if relation not in (None, HAS):
                    return False
                return other[0] == CONTAINER and self.is_privileged(other)
        if node_a not in self.nodes or node_b not in self.nodes:
            return False
        if relation is None:
            return any(other == node_b for other, _ in self._adj[node_a])
        return self.has_edge(node_a, node_b, relation)

    def is_privileged(self, container: NodeRef) -> bool:
        if container not in self.nodes:
            return False
        granted = {o for o, r in self._adj[container] if r == GRANTED and o[0] == CAPABILITY}
        return len(granted) == len(catalogs.capabilities())

    def stats(self) -> GraphStats:
        per_label: dict[str, int] = {}
        for label, _ in self.nodes:
            per_label[label] = per_label.get(label, 0) + 1
        return GraphStats(len(self.nodes), len(self.edges), per_label)

    def containers(self) -> list[str]:
        return sorted(name for label, name in self.nodes if label == CONTAINER)

    def graph_equal(self, other: "KnowledgeGraph") -> bool:
        return self.nodes == other.nodes and self.edges == other.edges

    def current_version_node(self, component: str) -> NodeRef:
        if self.host is None:
            raise GraphError("graph has no host descriptor")
        version = getattr(self.host, f"{component}_version")
        name = catalogs.canonical_version_string(component, version)
        return (_VERSION_LABELS[component], name)


def _edge_receipt(op: str, key: EdgeKey, assumption: bool) -> dict:
    return {
        "op": op,
        "a": {"label": key[0][0], "name": key[0][1]},
        "b": {"label": key[1][0], "name": key[1][1]},
        "relation": key[2],
        "assumption": assumption,
        "inverse": "remove_edge" if op == "add_edge" else "add_edge",
    }


def _ref(d: dict) -> NodeRef:
    return (d["label"], d["name"])


def inverse_receipt(receipt: dict) -> dict:
    inv = dict(receipt)
    inv["op"], inv["inverse"] = receipt["inverse"], receipt["op"]
    return inv


def rollback(g: KnowledgeGraph, to_length: int = 0) -> None:
    """Apply inverses of journaled mutations in reverse order."""
    while len(g.journal) > to_length:
        receipt = g.journal.pop()
        was = g._journaling
        g._journaling = False
        try:
            g.apply_receipt(inverse_receipt(receipt))
        finally:
            g._journaling = was


# -- construction ------------------------------------------------------------


def init_baseline(host: HostDescriptor) -> KnowledgeGraph:
    """Build the 691-node / 6-edge baseline for one host.

    Nodes: host VM, kernel component + 50 kernel versions, engine
    component + 132/83/18 engine component versions, 41 capabilities and
    364 syscalls. Edges wire the host to its components and each component
    to its currently running version.
    """
    for component in ("kernel", "docker", "containerd", "runc"):
        version = getattr(host, f"{component}_version")
        try:
            catalogs.canonical_version_string(component, version)
        except CatalogError:
            raise CatalogError(
                f"host {component} version {version} is not in the catalog")

    g = KnowledgeGraph()
    g._journaling = False
    host_node = g.add_node(HOST_VM, host.hostname)
    g.add_node(*KERNEL_NODE)
    g.add_node(*ENGINE_NODE)
    for component, label in _VERSION_LABELS.items():
        for name in catalogs.version_strings(component):
            g.add_node(label, name)
    for cap in catalogs.capabilities():
        g.add_node(CAPABILITY, cap)
    for sc in catalogs.syscalls():
        g.add_node(SYSCALL, sc)

    g.host = host
    g.add_edge(host_node, KERNEL_NODE, RUNS)
    g.add_edge(host_node, ENGINE_NODE, HOSTS)
    g.add_edge(KERNEL_NODE, g.current_version_node("kernel"), VERSION)
    g.add_edge(ENGINE_NODE, g.current_version_node("docker"), VERSION)
    g.add_edge(ENGINE_NODE, g.current_version_node("containerd"), USES)
    g.add_edge(ENGINE_NODE, g.current_version_node("runc"), USES)
    g._journaling = True
    return g


def add_image(g: KnowledgeGraph, image: ImageSpec) -> NodeRef:
    """Register an image: +2 nodes (Image, Tag) and +2 edges."""
    node = (IMAGE, image.name)
    if node in g.nodes:
        raise GraphError(f"image {image.name!r} already present")
    g.add_node(*node)
    tag_node = (TAG, image.reference)  # image-qualified, tags are not shared
    g.add_node(*tag_node)
    g.add_edge(ENGINE_NODE, node, STORES)
    g.add_edge(node, tag_node, TAGGED)
    g.images[image.name] = image
    return node


def _ensure_node(g: KnowledgeGraph, ref: NodeRef) -> None:
    if ref not in g.nodes:
        g.add_node(*ref)


def _ensure_edge(g: KnowledgeGraph, a: NodeRef, b: NodeRef, relation: str) -> None:
    if not g.has_edge(a, b, relation):
        g.add_edge(a, b, relation)


SHARED_SINGLETONS: tuple[NodeRef, ...] = (
    ROOT_USER,
    DEFAULT_APPARMOR,
    DEFAULT_SECCOMP,
    DEFAULT_CAPSET,
    (NETWORK_MODE, "bridge"),
    (IPC_MODE, "private"),
    (PID_MODE, "private"),
    (UTS_MODE, "private"),
)


def container_subgraph(cfg: ContainerConfig) -> tuple[set[NodeRef], set[EdgeKey]]:
    """Nodes and edges one container contributes (beyond baseline/singletons).

    Includes its image pair and, for custom profiles, the profile node and
    its ALLOWS fan-out; excludes the lazily shared default-capset/seccomp
    edges, which depend on the whole deployment.
    """
    c = (CONTAINER, cfg.container_name)
    image_node = (IMAGE, cfg.image.name)
    tag_node = (TAG, cfg.image.reference)
    user_node = (USER, cfg.effective_user)
    nodes: set[NodeRef] = {c, image_node, tag_node, user_node}
    edges: set[EdgeKey] = {
        edge_key(ENGINE_NODE, image_node, STORES),
        edge_key(image_node, tag_node, TAGGED),
        edge_key(c, image_node, FROM),
        edge_key(c, user_node, RUNS_AS),
    }

    if cfg.privileged:
        for cap in catalogs.capabilities():
            edges.add(edge_key(c, (CAPABILITY, cap), GRANTED))
        for sc in catalogs.syscalls():
            edges.add(edge_key(c, (SYSCALL, sc), ALLOWS))
    else:
        if cfg.capability_source == CAPSOURCE_DEFAULT:
            edges.add(edge_key(c, DEFAULT_CAPSET, GRANTED))
        else:
            for cap in sorted(cfg.effective_capabilities):
                edges.add(edge_key(c, (CAPABILITY, cap), GRANTED))
        if cfg.seccomp_mode == SECCOMP_DEFAULT:
            edges.add(edge_key(c, DEFAULT_SECCOMP, FILTERED_BY))
        elif cfg.seccomp_mode == "custom":
            profile = (SECCOMP_PROFILE, cfg.seccomp_profile_name or "custom")
            nodes.add(profile)
            edges.add(edge_key(c, profile, FILTERED_BY))
            for sc in sorted(cfg.allowed_syscalls):
                edges.add(edge_key(profile, (SYSCALL, sc), ALLOWS))
        if cfg.apparmor_mode == APPARMOR_DEFAULT:
            edges.add(edge_key(c, DEFAULT_APPARMOR, CONFINED_BY))
        elif cfg.apparmor_mode == "custom":
            profile = (APPARMOR_PROFILE, cfg.apparmor_profile_name or "custom")
            nodes.add(profile)
            edges.add(edge_key(c, profile, CONFINED_BY))

    for mode_label, mode_value, rel in (
        (NETWORK_MODE, cfg.network_mode, NETWORK),
        (IPC_MODE, cfg.ipc_mode, IPC),
        (PID_MODE, cfg.pid_mode, PID),
    ):
        mode_node = (mode_label, mode_value)
        nodes.add(mode_node)
        edges.add(edge_key(c, mode_node, rel))
    return nodes, edges


def _shared_lazy_edges(configs: Iterable[ContainerConfig]) -> set[EdgeKey]:
    """Default capset/seccomp member edges, present only while referenced."""
    edges: set[EdgeKey] = set()
    configs = list(configs)
    if any(c.capability_source == CAPSOURCE_DEFAULT and not c.privileged for c in configs):
        for cap in catalogs.default_capabilities():
            edges.add(edge_key(DEFAULT_CAPSET, (CAPABILITY, cap), INCLUDES))
    if any(c.seccomp_mode == SECCOMP_DEFAULT and not c.privileged for c in configs):
        from .ingest.profiles import default_seccomp_profile
        for sc in default_seccomp_profile().effective_allowlist():
            edges.add(edge_key(DEFAULT_SECCOMP, (SYSCALL, sc), ALLOWS))
    return edges


def _sync_shared_edges(g: KnowledgeGraph,
                       assumption_edges: frozenset[EdgeKey] = frozenset()) -> list[dict]:
    receipts = []
    desired = _shared_lazy_edges(g.container_configs.values())
    current = {e for e in g.edges
               if e[0] in (DEFAULT_CAPSET, DEFAULT_SECCOMP)
               and e[2] in (INCLUDES, ALLOWS)}
    for e in sorted(current - desired):
        receipts.append(g.remove_edge(e[0], e[1], e[2],
                                      assumption=e in assumption_edges))
    for e in sorted(desired - current):
        receipts.append(g.add_edge(e[0], e[1], e[2]))
    return receipts


def add_container(g: KnowledgeGraph, cfg: ContainerConfig) -> NodeRef:
    """Add one container per the construction rules.

    The first container materializes the eight shared singleton nodes;
    shared default-capset/-seccomp member edges appear lazily, once some
    container references them.
    """
    c = (CONTAINER, cfg.container_name)
    if c in g.nodes:
        raise GraphError(f"container {cfg.container_name!r} already present")
    if cfg.image.name not in g.images:
        add_image(g, cfg.image)
    if not g.container_configs:
        for singleton in SHARED_SINGLETONS:
            _ensure_node(g, singleton)
    nodes, edges = container_subgraph(cfg)
    for ref in sorted(nodes):
        _ensure_node(g, ref)
    for a, b, rel in sorted(edges):
        _ensure_edge(g, a, b, rel)
    g.container_configs[cfg.container_name] = cfg
    _sync_shared_edges(g)
    return c


def update_container_config(
    g: KnowledgeGraph,
    name: str,
    new_cfg: ContainerConfig,
    assumption_edges: frozenset[EdgeKey] = frozenset(),
) -> list[dict]:
    """Re-point one container's subgraph at a new effective configuration.

    Applies the minimal node/edge diff (so unchanged edges are never
    journaled) and returns the receipts. Removals of edges listed in
    *assumption_edges* are flagged in their receipts; the resilience score
    counts exactly those.
    """
    if name not in g.container_configs:
        raise GraphError(f"unknown container {name!r}")
    if new_cfg.container_name != name:
        raise GraphError("container rename is not supported")
    old_cfg = g.container_configs[name]
    old_nodes, old_edges = container_subgraph(old_cfg)
    new_nodes, new_edges = container_subgraph(new_cfg)

    receipts: list[dict] = []
    start = len(g.journal)
    for ref in sorted(new_nodes - old_nodes):
        _ensure_node(g, ref)
    # edges still needed by other containers must survive the diff
    other_edges: set[EdgeKey] = set()
    for other_name, other_cfg in g.container_configs.items():
        if other_name != name:
            other_edges |= container_subgraph(other_cfg)[1]
    for a, b, rel in sorted((old_edges - new_edges) - other_edges):
        g.remove_edge(a, b, rel, assumption=edge_key(a, b, rel) in assumption_edges)
    for a, b, rel in sorted(new_edges - old_edges):
        _ensure_edge(g, a, b, rel)
    g.container_configs[name] = new_cfg
    g.images.setdefault(new_cfg.image.name, new_cfg.image)
    _sync_shared_edges(g, assumption_edges)
    # orphaned custom nodes (profiles, users, modes) disappear with their container
    removable_labels = {SECCOMP_PROFILE, APPARMOR_PROFILE, USER,
                        NETWORK_MODE, IPC_MODE, PID_MODE, IMAGE, TAG}
    for ref in sorted(old_nodes - new_nodes):
        if ref in SHARED_SINGLETONS or ref[0] not in removable_labels:
            continue
        if ref in g.nodes and not g._adj[ref]:
            g.remove_node(ref)
            if ref[0] == IMAGE:
                g.images.pop(ref[1], None)
    return g.journal[start:]


def upgrade_component_version(
    g: KnowledgeGraph,
    component: str,
    new_version: str,
    assumption_edges: frozenset[EdgeKey] = frozenset(),
) -> list[dict]:
    """Re-point a component's current-version edge (a host-level fix).

    The alternative-version nodes are always in the graph, so an upgrade
    is one edge swap. The removal is flagged when the old edge backs an
    attack assumption.
    """
    import dataclasses

    if g.host is None:
        raise GraphError("graph has no host descriptor")
    if component not in _VERSION_LABELS:
        raise GraphError(f"unknown component {component!r}")
    canonical = catalogs.canonical_version_string(component, new_version)
    old_node = g.current_version_node(component)
    new_node = (_VERSION_LABELS[component], canonical)
    if old_node == new_node:
        raise GraphError(f"{component} already at version {canonical}")
    source = KERNEL_NODE if component == "kernel" else ENGINE_NODE
    rel = VERSION if component in ("kernel", "docker") else USES
    start = len(g.journal)
    g.remove_edge(source, old_node, rel,
                  assumption=edge_key(source, old_node, rel) in assumption_edges)
    g.host = dataclasses.replace(
        g.host, **{f"{component}_version": VersionId.parse(canonical)})
    g.add_edge(source, new_node, rel)
    return g.journal[start:]


def rebuild_from_configs(host: HostDescriptor, images: Iterable[ImageSpec],
                         configs: Iterable[ContainerConfig]) -> KnowledgeGraph:
    """Fresh graph from scratch; the oracle for incremental-mutation equality."""
    g = init_baseline(host)
    for image in images:
        if image.name not in g.images:
            add_image(g, image)
    for cfg in configs:
        add_container(g, cfg)
    return g


# -- snapshots ----------------------------------------------------------------

SNAPSHOT_FORMAT = "confstress-snapshot/1"


def _serialize_image(image: ImageSpec) -> dict:
    return {
        "name": image.name,
        "tag": image.tag,
        "default_user": image.default_user,
        "exposed_ports": sorted(image.exposed_ports),
        "declared_volumes": sorted(image.declared_volumes),
    }


def _deserialize_image(d: dict) -> ImageSpec:
    return ImageSpec(
        name=d["name"],
        tag=d["tag"],
        default_user=d["default_user"],
        exposed_ports=frozenset(d["exposed_ports"]),
        declared_volumes=frozenset(d["declared_volumes"]),
    )


def _serialize_config(cfg: ContainerConfig) -> dict:
    return {
        "container_name": cfg.container_name,
        "image": _serialize_image(cfg.image),
        "effective_user": cfg.effective_user,
        "effective_capabilities": sorted(cfg.effective_capabilities),
        "capability_source": cfg.capability_source,
        "allowed_syscalls": sorted(cfg.allowed_syscalls),
        "seccomp_mode": cfg.seccomp_mode,
        "apparmor_mode": cfg.apparmor_mode,
        "seccomp_profile_name": cfg.seccomp_profile_name,
        "apparmor_profile_name": cfg.apparmor_profile_name,
        "privileged": cfg.privileged,
        "read_only": cfg.read_only,
        "no_new_privileges": cfg.no_new_privileges,
        "volumes": [list(v) for v in cfg.volumes],
        "devices": list(cfg.devices),
        "network_mode": cfg.network_mode,
        "ipc_mode": cfg.ipc_mode,
        "pid_mode": cfg.pid_mode,
    }


def _deserialize_config(d: dict) -> ContainerConfig:
    return ContainerConfig(
        container_name=d["container_name"],
        image=_deserialize_image(d["image"]),
        effective_user=d["effective_user"],
        effective_capabilities=frozenset(d["effective_capabilities"]),
        capability_source=d["capability_source"],
        allowed_syscalls=frozenset(d["allowed_syscalls"]),
        seccomp_mode=d["seccomp_mode"],
        apparmor_mode=d["apparmor_mode"],
        seccomp_profile_name=d.get("seccomp_profile_name"),
        apparmor_profile_name=d.get("apparmor_profile_name"),
        privileged=d["privileged"],
        read_only=d["read_only"],
        no_new_privileges=d["no_new_privileges"],
        volumes=tuple(tuple(v) for v in d["volumes"]),
        devices=tuple(d["devices"]),
        network_mode=d["network_mode"],
        ipc_mode=d["ipc_mode"],
        pid_mode=d["pid_mode"],
    )


def snapshot(g: KnowledgeGraph) -> dict:
    """Canonically ordered snapshot document (nodes, edges, journal + context)."""
    doc: dict = {"format": SNAPSHOT_FORMAT}
    if g.host is not None:
        doc["host"] = {
            "hostname": g.host.hostname,
            "engine": g.host.engine,
            "kernel_version": str(g.host.kernel_version),
            "docker_version": str(g.host.docker_version),
            "containerd_version": str(g.host.containerd_version),
            "runc_version": str(g.host.runc_version),
        }
    doc["images"] = [_serialize_image(g.images[k]) for k in sorted(g.images)]
    doc["containers"] = [_serialize_config(g.container_configs[k])
                         for k in sorted(g.container_configs)]
    doc["nodes"] = [{"label": label, "name": name}
                    for label, name in sorted(g.nodes)]
    doc["edges"] = [{"a": {"label": a[0], "name": a[1]},
                     "b": {"label": b[0], "name": b[1]},
                     "relation": rel}
                    for a, b, rel in sorted(g.edges)]
    doc["journal"] = list(g.journal)
    return doc


def snapshot_json(g: KnowledgeGraph) -> str:
    return json.dumps(snapshot(g), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def restore(doc: dict | str) -> KnowledgeGraph:
    """Rebuild a graph from a snapshot document; inverse of snapshot()."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SnapshotError(f"snapshot is not valid JSON: {exc}",
                                location=f"char {exc.pos}")
    if not isinstance(doc, dict) or doc.get("format") != SNAPSHOT_FORMAT:
        raise SnapshotError("unrecognized snapshot format", location="format")
    for section in ("nodes", "edges", "journal"):
        if section not in doc:
            raise SnapshotError(f"snapshot is missing {section!r}", location=section)

    g = KnowledgeGraph()
    g._journaling = False
    try:
        for n in doc["nodes"]:
            g.add_node(n["label"], n["name"])
        for e in doc["edges"]:
            g.add_edge(_ref(e["a"]), _ref(e["b"]), e["relation"])
    except (KeyError, TypeError) as exc:
        raise SnapshotError(f"malformed node/edge entry: {exc}", location="nodes/edges")
    except GraphError as exc:
        raise SnapshotError(str(exc), location="nodes/edges")
    g._journaling = True
    g.journal = list(doc["journal"])
    if "host" in doc:
        h = doc["host"]
        try:
            g.host = HostDescriptor(
                hostname=h["hostname"],
                engine=h.get("engine", "docker"),
                kernel_version=VersionId.parse(h["kernel_version"]),
                docker_version=VersionId.parse(h["docker_version"]),
                containerd_version=VersionId.parse(h["containerd_version"]),
                runc_version=VersionId.parse(h["runc_version"]),
            )
        except KeyError as exc:
            raise SnapshotError(f"host section missing {exc}", location="host")
    for d in doc.get("images", []):
        g.images[d["name"]] = _deserialize_image(d)
    for d in doc.get("containers", []):
        cfg = _deserialize_config(d)
        g.container_configs[cfg.container_name] = cfg
    return g
