"""AND/OR evaluation, minimal invalidation sets, deployment scans."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import kg
from .errors import GraphError, ValidationError
from .vulns import (
    AND,
    GOAL,
    LEAF,
    OR,
    AndOrGraph,
    AssumptionLink,
    VulnSpec,
    build_andor_graph,
    link_assumptions,
)

# default per-fix costs for cut ordering when no AHP weights are given
EXHAUSTIVE_LEAF_LIMIT = 16

_ATOM_TO_FIX = {
    "capability": "not_capability",
    "syscall": "not_syscall",
    "privileged": "not_privileged",
    "root_user": "not_root",
    "version": "version_upgrade",
    "host_mount": "read_only_fs",
}


def atom_fix_kind(atom) -> str | None:
    """FixKind responsible for invalidating an atom, None when unmappable."""
    return _ATOM_TO_FIX.get(atom.kind)


@dataclass(frozen=True)
class ExploitVerdict:
    cve_id: str
    container: str
    satisfied: bool
    satisfied_assumptions: tuple[AssumptionLink, ...]
    witness: tuple[str, ...]  # node ids of the minimal satisfied subtree

    def witness_atoms(self) -> tuple[str, ...]:
        return self.witness


@dataclass(frozen=True)
class InvalidationSet:
    links: frozenset[AssumptionLink]
    cost: float

    def leaf_ids(self) -> frozenset[str]:
        return frozenset(l.leaf_id for l in self.links)


def _valuation(links: list[AssumptionLink],
               off: frozenset[str] = frozenset()) -> dict[str, bool]:
    return {l.leaf_id: (l.satisfied and l.leaf_id not in off) for l in links}


def _eval_node(andor: AndOrGraph, node_id: str, values: dict[str, bool]) -> bool:
    node = andor.nodes[node_id]
    if node.kind == LEAF:
        return values.get(node.node_id, False)
    child_values = [_eval_node(andor, c, values) for c in node.children]
    if node.kind == AND:
        if not child_values:
            raise ValidationError("empty AND node (rejected at compile)")
        return all(child_values)
    if node.kind == OR:
        if not child_values:
            raise ValidationError("empty OR node (rejected at compile)")
        return any(child_values)
    if node.kind == GOAL:
        return child_values[0]
    raise ValidationError(f"unknown node kind {node.kind!r}")


def _witness(andor: AndOrGraph, node_id: str, values: dict[str, bool]) -> tuple[str, ...]:
    node = andor.nodes[node_id]
    if node.kind == LEAF:
        return (node.node_id,)
    if node.kind == AND:
        out: tuple[str, ...] = (node.node_id,)
        for c in node.children:
            out += _witness(andor, c, values)
        return out
    # OR and GOAL contribute exactly one satisfied child
    for c in node.children:
        if _eval_node(andor, c, values):
            return (node.node_id,) + _witness(andor, c, values)
    raise GraphError("witness requested for unsatisfied subtree")


def evaluate(andor: AndOrGraph, links: list[AssumptionLink],
             container: str = "") -> ExploitVerdict:
    """Bottom-up AND/OR evaluation with a minimal witness.

    Every satisfied OR contributes exactly its first satisfied child (in
    canonical node order), so removing any witness leaf falsifies the
    witness subtree.
    """
    leaf_ids = {n.node_id for n in andor.leaves()}
    covered = {l.leaf_id for l in links}
    if leaf_ids - covered:
        raise ValidationError(f"links do not cover leaves: {sorted(leaf_ids - covered)}")
    values = _valuation(links)
    satisfied = _eval_node(andor, andor.root, values)
    witness = _witness(andor, andor.root, values) if satisfied else ()
    return ExploitVerdict(
        cve_id=andor.vuln_id,
        container=container,
        satisfied=satisfied,
        satisfied_assumptions=tuple(l for l in links if l.satisfied),
        witness=witness,
    )


def _link_cost(link: AssumptionLink, costs: dict[str, float] | None) -> float:
    if not costs:
        return 1.0
    fix = atom_fix_kind(link.atom)
    return costs.get(fix, 1.0) if fix else 1.0


def minimal_invalidation_sets(
    andor: AndOrGraph,
    links: list[AssumptionLink],
    costs: dict[str, float] | None = None,
) -> list[InvalidationSet]:
    """All minimal sets of satisfied assumptions whose removal kills the goal.

    Exhaustive (by increasing size, supersets pruned) up to
    EXHAUSTIVE_LEAF_LIMIT satisfied leaves; beyond that a greedy weighted
    pass returns a single, possibly non-minimum-cost, set. Results are
    ordered by ascending cost. A version OR never contributes more than
    one satisfied leaf (only the running version can match), so the
    upgrade fix is naturally a single unit here.
    """
    values = _valuation(links)
    if not _eval_node(andor, andor.root, values):
        raise GraphError("nothing to cut: verdict is not satisfied")
    satisfied = [l for l in links if l.satisfied]
    by_id = {l.leaf_id: l for l in satisfied}
    ids = sorted(by_id)

    def falsifies(off: frozenset[str]) -> bool:
        return not _eval_node(andor, andor.root, _valuation(links, off))

    found: list[frozenset[str]] = []
    if len(ids) <= EXHAUSTIVE_LEAF_LIMIT:
        for size in range(1, len(ids) + 1):
            for combo in combinations(ids, size):
                candidate = frozenset(combo)
                if any(prev <= candidate for prev in found):
                    continue
                if falsifies(candidate):
                    found.append(candidate)
    else:
        # greedy: cheapest-first accumulation, then prune to minimality
        order = sorted(ids, key=lambda i: (_link_cost(by_id[i], costs), i))
        acc: set[str] = set()
        for i in order:
            acc.add(i)
            if falsifies(frozenset(acc)):
                break
        for i in sorted(acc):
            if falsifies(frozenset(acc - {i})):
                acc.remove(i)
        found.append(frozenset(acc))

    sets = [
        InvalidationSet(
            links=frozenset(by_id[i] for i in f),
            cost=sum(_link_cost(by_id[i], costs) for i in f),
        )
        for f in found
    ]
    return sorted(sets, key=lambda s: (s.cost, len(s.links), sorted(s.leaf_ids())))


@dataclass
class DeploymentReport:
    verdicts: list[ExploitVerdict]
    totals: dict[str, dict[str, dict[str, int]]]  # category -> tactic -> counts
    resilience_score: int

    @property
    def any_satisfied(self) -> bool:
        return any(v.satisfied for v in self.verdicts)

    def to_document(self) -> dict:
        return {
            "verdicts": [
                {
                    "container": v.container,
                    "cve_id": v.cve_id,
                    "satisfied": v.satisfied,
                    "witness": list(v.witness),
                    "satisfied_assumptions": [
                        {"leaf": l.leaf_id, "atom": l.atom.describe(),
                         "polarity": l.polarity}
                        for l in v.satisfied_assumptions
                    ],
                }
                for v in self.verdicts
            ],
            "totals": self.totals,
            "resilience_score": self.resilience_score,
        }


def resilience_from_journal(journal: list[dict]) -> int:
    """Assumption-bearing edge removals recorded so far."""
    return sum(1 for r in journal
               if r.get("op") == "remove_edge" and r.get("assumption"))


def scan_deployment(g: kg.KnowledgeGraph, catalog: list[VulnSpec]) -> DeploymentReport:
    """Evaluate every (container, vulnerability) pair.

    Verdicts are grouped by the two-dimensional taxonomy
    (category x tactic); the resilience score is read off the graph
    journal so it survives snapshot/restore.
    """
    compiled: dict[str, AndOrGraph] = {}
    verdicts: list[ExploitVerdict] = []
    totals: dict[str, dict[str, dict[str, int]]] = {}
    for container in g.containers():
        for spec in catalog:
            andor = compiled.get(spec.cve_id)
            if andor is None:
                andor = compiled[spec.cve_id] = build_andor_graph(spec, g)
            links = link_assumptions(andor, g, container)
            verdict = evaluate(andor, links, container=container)
            verdicts.append(verdict)
            bucket = totals.setdefault(spec.category, {}).setdefault(
                spec.mitre_tactic, {"satisfied": 0, "total": 0})
            bucket["total"] += 1
            if verdict.satisfied:
                bucket["satisfied"] += 1
    return DeploymentReport(
        verdicts=verdicts,
        totals=totals,
        resilience_score=resilience_from_journal(g.journal),
    )
