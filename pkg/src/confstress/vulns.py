"""Vulnerability dataset: schema, AND/OR compilation, graph linking.

Each catalog entry compiles to a goal-rooted AND/OR graph. Condition sets
are disjuncts; atoms within a set are conjuncts. A version bound becomes
an OR over catalog version nodes. Structural children are chosen at
release granularity (a release node also stands for its rc line), while
per-leaf satisfaction applies the exact rc-aware bound; this is what makes
a ``max 5.17-rc3`` bound cover all 50 kernel nodes structurally yet leave
the 5.17 leaf unsatisfiable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from . import catalogs, kg
from .errors import ValidationError
from .ingest.types import ContainerConfig
from .versions import VersionId

CATEGORIES = ("container_misconfig", "kernel_bug", "engine_vuln")

REQUIRES_PRESENT = "requires-present"
REQUIRES_ABSENT = "requires-absent"

_COMPONENTS = ("kernel", "docker", "containerd", "runc")


@dataclass(frozen=True)
class ConditionSet:
    """One conjunction of attack assumptions."""

    min_kernel_version: VersionId | None = None
    max_kernel_version: VersionId | None = None
    min_docker_version: VersionId | None = None
    max_docker_version: VersionId | None = None
    min_containerd_version: VersionId | None = None
    max_containerd_version: VersionId | None = None
    min_runc_version: VersionId | None = None
    max_runc_version: VersionId | None = None
    required_capabilities: tuple[str, ...] = ()  # any-of
    required_syscalls: tuple[str, ...] = ()      # all required
    requires_privileged: bool = False
    requires_root: bool = False
    requires_host_mounts: tuple[str, ...] = ()
    requires_apparmor_unconfined: bool = False
    user_or_capability: bool = False

    def __post_init__(self) -> None:
        atoms = (
            bool(self.required_capabilities) or bool(self.required_syscalls)
            or self.requires_privileged or self.requires_root
            or bool(self.requires_host_mounts) or self.requires_apparmor_unconfined
            or any(self.version_bound(c) != (None, None) for c in _COMPONENTS)
        )
        if not atoms:
            raise ValidationError("condition set has no atoms")
        for component in _COMPONENTS:
            lo, hi = self.version_bound(component)
            if lo is not None and hi is not None and hi < lo:
                raise ValidationError(
                    f"{component} version bound is empty: {lo} > {hi}")

    def version_bound(self, component: str) -> tuple[VersionId | None, VersionId | None]:
        return (getattr(self, f"min_{component}_version"),
                getattr(self, f"max_{component}_version"))


@dataclass(frozen=True)
class VulnSpec:
    cve_id: str
    cvss_v3: float
    mitre_tactic: str
    mitre_technique: str
    category: str
    pre_conditions: tuple[ConditionSet, ...]
    post_conditions: tuple[str, ...]

    def __post_init__(self) -> None:
        if not 0.0 <= self.cvss_v3 <= 10.0:
            raise ValidationError(f"CVSS {self.cvss_v3} out of [0, 10]")
        if self.category not in CATEGORIES:
            raise ValidationError(f"unknown category {self.category!r}")
        if not self.pre_conditions:
            raise ValidationError("at least one condition set required")


# -- catalog file handling ----------------------------------------------------

_ENTRY_KEYS = {"CVSS_v3", "mitre_tactic", "mitre_technique", "category",
               "pre_conditions", "post_conditions"}
_CONDITION_KEYS = {
    "capability", "syscall", "user_or_capability", "requires_privileged",
    "requires_root", "requires_host_mounts", "requires_apparmor_unconfined",
} | {f"{m}_{c}_version" for m in ("min", "max") for c in _COMPONENTS}


def _split_list(value: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in value.split(",") if part.strip())


def _parse_condition(raw: dict, where: str) -> ConditionSet:
    unknown = set(raw) - _CONDITION_KEYS
    if unknown:
        raise ValidationError(f"{where}: unknown condition fields {sorted(unknown)}")
    kwargs: dict = {}
    for m in ("min", "max"):
        for c in _COMPONENTS:
            key = f"{m}_{c}_version"
            if key in raw:
                kwargs[key] = VersionId.parse(str(raw[key]))
    if "capability" in raw:
        kwargs["required_capabilities"] = tuple(
            catalogs.normalize_capability(c) for c in _split_list(raw["capability"]))
    if "syscall" in raw:
        names = _split_list(raw["syscall"])
        offenders = catalogs.validate_syscalls(names)
        if offenders:
            raise ValidationError(f"{where}: unknown syscalls", offenders=offenders)
        kwargs["required_syscalls"] = names
    for flag in ("user_or_capability", "requires_privileged", "requires_root",
                 "requires_apparmor_unconfined"):
        if flag in raw:
            kwargs[flag] = bool(raw[flag])
    if "requires_host_mounts" in raw:
        kwargs["requires_host_mounts"] = tuple(raw["requires_host_mounts"])
    return ConditionSet(**kwargs)


def _infer_category(conditions: tuple[ConditionSet, ...]) -> str:
    for cs in conditions:
        if cs.version_bound("kernel") != (None, None):
            return "kernel_bug"
    for cs in conditions:
        for c in ("docker", "containerd", "runc"):
            if cs.version_bound(c) != (None, None):
                return "engine_vuln"
    return "container_misconfig"


def load_catalog(doc: dict | str) -> list[VulnSpec]:
    """Load a map of vulnerability id -> entry list (Listing-style layout)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    if not isinstance(doc, dict):
        raise ValidationError("catalog must be a JSON object")
    specs: list[VulnSpec] = []
    for vid, entries in doc.items():
        if vid.startswith("_"):  # file-level commentary
            continue
        if not isinstance(entries, list):
            raise ValidationError(f"{vid}: expected an array of entries")
        for i, entry in enumerate(entries):
            where = f"{vid}[{i}]"
            unknown = set(entry) - _ENTRY_KEYS
            if unknown:
                raise ValidationError(f"{where}: unknown fields {sorted(unknown)}")
            missing = {"CVSS_v3", "mitre_tactic", "mitre_technique",
                       "pre_conditions", "post_conditions"} - set(entry)
            if missing:
                raise ValidationError(f"{where}: missing fields {sorted(missing)}")
            conditions = tuple(
                _parse_condition(c, where) for c in entry["pre_conditions"])
            impacts = tuple(p["impact"] for p in entry["post_conditions"])
            specs.append(VulnSpec(
                cve_id=vid,
                cvss_v3=float(entry["CVSS_v3"]),
                mitre_tactic=entry["mitre_tactic"],
                mitre_technique=entry["mitre_technique"],
                category=entry.get("category") or _infer_category(conditions),
                pre_conditions=conditions,
                post_conditions=impacts,
            ))
    return specs


def serialize_catalog(specs: list[VulnSpec]) -> dict:
    """Re-emit a loaded catalog as a document (key order normalized)."""
    doc: dict = {}
    for spec in specs:
        conditions = []
        for cs in spec.pre_conditions:
            c: dict = {}
            for m in ("min", "max"):
                for comp in _COMPONENTS:
                    v = getattr(cs, f"{m}_{comp}_version")
                    if v is not None:
                        c[f"{m}_{comp}_version"] = str(v)
            if cs.required_capabilities:
                c["capability"] = ", ".join(
                    f"CAP_{x}" for x in cs.required_capabilities)
            if cs.required_syscalls:
                c["syscall"] = ", ".join(cs.required_syscalls)
            for flag in ("user_or_capability", "requires_privileged",
                         "requires_root", "requires_apparmor_unconfined"):
                if getattr(cs, flag):
                    c[flag] = True
            if cs.requires_host_mounts:
                c["requires_host_mounts"] = list(cs.requires_host_mounts)
            conditions.append(c)
        doc.setdefault(spec.cve_id, []).append({
            "CVSS_v3": f"{spec.cvss_v3:.1f}",
            "mitre_tactic": spec.mitre_tactic,
            "mitre_technique": spec.mitre_technique,
            "category": spec.category,
            "pre_conditions": conditions,
            "post_conditions": [{"impact": i} for i in spec.post_conditions],
        })
    return doc


def bundled_catalog() -> list[VulnSpec]:
    """The three validated entries shipped with the package."""
    text = resources.files("confstress.data").joinpath("vuln_catalog.json").read_text()
    return load_catalog(text)


def community_catalog() -> list[VulnSpec]:
    """Extra entries compiled from public advisories (unvalidated)."""
    text = resources.files("confstress.data").joinpath(
        "vuln_catalog_community.json").read_text()
    return load_catalog(text)


# -- AND/OR graphs ------------------------------------------------------------

GOAL = "goal"
AND = "and"
OR = "or"
LEAF = "leaf"

# atom kinds
A_CAPABILITY = "capability"
A_SYSCALL = "syscall"
A_ROOT_USER = "root_user"
A_PRIVILEGED = "privileged"
A_APPARMOR_UNCONFINED = "apparmor_unconfined"
A_HOST_MOUNT = "host_mount"
A_VERSION = "version"


@dataclass(frozen=True)
class Atom:
    kind: str
    name: str = ""            # capability/syscall/user name, mount path
    component: str = ""       # version atoms: kernel/docker/containerd/runc
    version: str = ""         # version atoms: catalog version string
    in_bound: bool = True     # version atoms: exact rc-aware bound check

    def describe(self) -> str:
        if self.kind == A_VERSION:
            return f"{self.component} version {self.version or '(none)'}"
        if self.kind in (A_CAPABILITY, A_SYSCALL, A_HOST_MOUNT):
            return f"{self.kind} {self.name}"
        return self.kind


@dataclass(frozen=True)
class AndOrNode:
    node_id: str
    kind: str
    children: tuple[str, ...] = ()
    atom: Atom | None = None

    def __post_init__(self) -> None:
        if self.kind in (AND, OR) and not self.children:
            raise ValidationError(f"{self.kind.upper()} node must have children")
        if self.kind == LEAF and self.atom is None:
            raise ValidationError("leaf node must carry an atom")


@dataclass
class AndOrGraph:
    vuln_id: str
    root: str
    nodes: dict[str, AndOrNode]
    warnings: list[str] = field(default_factory=list)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return sum(len(n.children) for n in self.nodes.values())

    def leaves(self) -> list[AndOrNode]:
        return [n for n in self.nodes.values() if n.kind == LEAF]

    def leaf_by_atom(self, kind: str, name: str = "") -> AndOrNode:
        for n in self.leaves():
            if n.atom.kind == kind and (not name or n.atom.name == name):
                return n
        raise KeyError(f"no leaf with atom ({kind}, {name})")


class _Builder:
    def __init__(self, vuln_id: str):
        self.vuln_id = vuln_id
        self.nodes: dict[str, AndOrNode] = {}
        self.counter = 0
        self.warnings: list[str] = []

    def _new_id(self, stem: str) -> str:
        self.counter += 1
        return f"n{self.counter:03d}:{stem}"

    def leaf(self, atom: Atom, stem: str) -> str:
        nid = self._new_id(stem)
        self.nodes[nid] = AndOrNode(nid, LEAF, atom=atom)
        return nid

    def gate(self, kind: str, children: list[str], stem: str) -> str:
        nid = self._new_id(stem)
        self.nodes[nid] = AndOrNode(nid, kind, children=tuple(children))
        return nid


def _structural_versions(component: str, lo: VersionId | None,
                         hi: VersionId | None) -> list[str]:
    out = []
    for name, v in zip(catalogs.version_strings(component), catalogs.versions(component)):
        if lo is not None and v.release < lo.release:
            continue
        if hi is not None and v.release > hi.release:
            continue
        out.append(name)
    return out


def _exact_in_bound(v: VersionId, lo: VersionId | None, hi: VersionId | None) -> bool:
    if lo is not None and v < lo:
        return False
    if hi is not None and hi < v:
        return False
    return True


def _compile_version_or(b: _Builder, component: str,
                        lo: VersionId | None, hi: VersionId | None) -> str:
    names = _structural_versions(component, lo, hi)
    if not names:
        b.warnings.append(
            f"{component} bound [{lo}, {hi}] matches no catalog version; "
            "branch is vacuously unsatisfiable")
        leaf = b.leaf(Atom(A_VERSION, component=component, version="", in_bound=False),
                      f"ver:{component}:none")
        return b.gate(OR, [leaf], f"verset:{component}")
    children = []
    for name in names:
        v = VersionId.parse(name)
        children.append(b.leaf(
            Atom(A_VERSION, component=component, version=name,
                 in_bound=_exact_in_bound(v, lo, hi)),
            f"ver:{component}:{name}"))
    return b.gate(OR, children, f"verset:{component}")


def _compile_condition_set(b: _Builder, cs: ConditionSet) -> str:
    members: list[str] = []
    if cs.requires_privileged:
        members.append(b.leaf(Atom(A_PRIVILEGED), "privileged"))
    if cs.user_or_capability:
        alternatives = [b.leaf(Atom(A_ROOT_USER), "root-user")]
        for cap in cs.required_capabilities:
            alternatives.append(b.leaf(Atom(A_CAPABILITY, name=cap), f"cap:{cap}"))
        members.append(b.gate(OR, alternatives, "user-or-cap")
                       if len(alternatives) > 1 else alternatives[0])
    else:
        if cs.requires_root:
            members.append(b.leaf(Atom(A_ROOT_USER), "root-user"))
        if cs.required_capabilities:
            caps = [b.leaf(Atom(A_CAPABILITY, name=c), f"cap:{c}")
                    for c in cs.required_capabilities]
            members.append(b.gate(OR, caps, "any-cap") if len(caps) > 1 else caps[0])
    for sc in cs.required_syscalls:
        members.append(b.leaf(Atom(A_SYSCALL, name=sc), f"sys:{sc}"))
    if cs.requires_apparmor_unconfined:
        members.append(b.leaf(Atom(A_APPARMOR_UNCONFINED), "apparmor-unconfined"))
    for path in cs.requires_host_mounts:
        members.append(b.leaf(Atom(A_HOST_MOUNT, name=path), "host-mount"))
    for component in _COMPONENTS:
        lo, hi = cs.version_bound(component)
        if lo is not None or hi is not None:
            members.append(_compile_version_or(b, component, lo, hi))
    if len(members) == 1:
        return members[0]
    return b.gate(AND, members, "all-of")


def build_andor_graph(vuln: VulnSpec, graph: kg.KnowledgeGraph | None = None) -> AndOrGraph:
    """Compile a vulnerability into its goal-rooted AND/OR graph.

    Deterministic for a given spec and catalog; the optional knowledge
    graph is accepted for interface symmetry (catalogs are process-wide).
    """
    b = _Builder(vuln.cve_id)
    branches = [_compile_condition_set(b, cs) for cs in vuln.pre_conditions]
    child = branches[0] if len(branches) == 1 else b.gate(OR, branches, "any-setting")
    root_id = "goal"
    b.nodes[root_id] = AndOrNode(root_id, GOAL, children=(child,))
    return AndOrGraph(vuln_id=vuln.cve_id, root=root_id, nodes=b.nodes,
                      warnings=b.warnings)


# -- linking ------------------------------------------------------------------


@dataclass(frozen=True)
class AssumptionLink:
    """Binding of one AND/OR leaf to a knowledge-graph element."""

    leaf_id: str
    atom: Atom
    bound_kind: str               # "edge" | "node"
    bound: tuple                  # EdgeKey or NodeRef
    polarity: str                 # requires-present | requires-absent
    satisfied: bool

    def bound_edge(self) -> kg.EdgeKey | None:
        return self.bound if self.bound_kind == "edge" else None


def _link_capability(g: kg.KnowledgeGraph, c: kg.NodeRef, name: str) -> tuple:
    cap = (kg.CAPABILITY, name)
    if g.has_edge(c, cap, kg.GRANTED):
        return "edge", kg.edge_key(c, cap, kg.GRANTED), True
    if g.has_edge(c, kg.DEFAULT_CAPSET, kg.GRANTED) and \
       g.has_edge(kg.DEFAULT_CAPSET, cap, kg.INCLUDES):
        # container-adjacent chain link: removing it invalidates the leaf
        return "edge", kg.edge_key(c, kg.DEFAULT_CAPSET, kg.GRANTED), True
    return "node", cap, False


def _link_syscall(g: kg.KnowledgeGraph, c: kg.NodeRef, name: str,
                  cfg: ContainerConfig | None) -> tuple:
    sc = (kg.SYSCALL, name)
    if g.has_edge(c, sc, kg.ALLOWS):
        return "edge", kg.edge_key(c, sc, kg.ALLOWS), True
    for profile in g.neighbors(c, kg.FILTERED_BY):
        if g.has_edge(profile, sc, kg.ALLOWS):
            return "edge", kg.edge_key(c, profile, kg.FILTERED_BY), True
        return "node", sc, False
    # no filter edge at all: unconfined seccomp lets everything through
    if cfg is not None and cfg.seccomp_mode == "unconfined":
        return "node", c, True
    return "node", sc, False


def _link_version(g: kg.KnowledgeGraph, atom: Atom) -> tuple:
    if not atom.version:
        return "node", kg.KERNEL_NODE, False
    label = {"kernel": kg.KERNEL_VERSION, "docker": kg.DOCKER_VERSION,
             "containerd": kg.CONTAINERD_VERSION, "runc": kg.RUNC_VERSION}[atom.component]
    vnode = (label, atom.version)
    current = g.current_version_node(atom.component)
    if current != vnode or not atom.in_bound:
        return "node", vnode, False
    source = kg.KERNEL_NODE if atom.component == "kernel" else kg.ENGINE_NODE
    rel = kg.VERSION if atom.component in ("kernel", "docker") else kg.USES
    return "edge", kg.edge_key(source, vnode, rel), True


def link_assumptions(andor: AndOrGraph, g: kg.KnowledgeGraph,
                     container: kg.NodeRef | str) -> list[AssumptionLink]:
    """Bind every leaf of the compiled graph to the deployment.

    Unbindable leaves come back with polarity requires-present and
    satisfied=False rather than erroring.
    """
    c = (kg.CONTAINER, container) if isinstance(container, str) else container
    if c not in g.nodes:
        raise kg.GraphError(f"container {c[1]!r} not in graph")
    cfg = g.container_configs.get(c[1])
    links: list[AssumptionLink] = []
    for leaf in sorted(andor.leaves(), key=lambda n: n.node_id):
        atom = leaf.atom
        polarity = REQUIRES_PRESENT
        if atom.kind == A_CAPABILITY:
            bound_kind, bound, sat = _link_capability(g, c, atom.name)
        elif atom.kind == A_SYSCALL:
            bound_kind, bound, sat = _link_syscall(g, c, atom.name, cfg)
        elif atom.kind == A_ROOT_USER:
            if g.has_edge(c, kg.ROOT_USER, kg.RUNS_AS):
                bound_kind, bound, sat = "edge", kg.edge_key(c, kg.ROOT_USER, kg.RUNS_AS), True
            else:
                bound_kind, bound, sat = "node", kg.ROOT_USER, False
        elif atom.kind == A_PRIVILEGED:
            bound_kind, bound, sat = "node", c, g.is_privileged(c)
        elif atom.kind == A_APPARMOR_UNCONFINED:
            polarity = REQUIRES_ABSENT
            confined = list(g.neighbors(c, kg.CONFINED_BY))
            if confined:
                bound_kind, bound = "edge", kg.edge_key(c, confined[0], kg.CONFINED_BY)
                sat = False
            else:
                bound_kind, bound, sat = "node", c, True
        elif atom.kind == A_HOST_MOUNT:
            bound_kind, bound = "node", c
            sat = False
            if cfg is not None and not cfg.read_only:
                for host_path, _cont, mode in cfg.volumes:
                    if host_path and host_path.startswith(atom.name) and mode != "ro":
                        sat = True
                        break
        elif atom.kind == A_VERSION:
            bound_kind, bound, sat = _link_version(g, atom)
        else:
            bound_kind, bound, sat = "node", c, False
        links.append(AssumptionLink(
            leaf_id=leaf.node_id, atom=atom, bound_kind=bound_kind,
            bound=bound, polarity=polarity, satisfied=sat))
    return links
