"""Independent oracles the implementation is checked against.

The AND/OR oracle renders a graph into a Python boolean expression and
evaluates it with eval(); minimal hitting sets are found by scanning all
subsets of satisfied leaves and filtering to subset-minimal ones. Neither
path shares code with the production evaluator.
"""

from __future__ import annotations

import random
from itertools import combinations

from confstress.vulns import (
    AND,
    GOAL,
    LEAF,
    OR,
    A_CAPABILITY,
    AndOrGraph,
    AndOrNode,
    AssumptionLink,
    Atom,
    REQUIRES_PRESENT,
)


def random_andor(rng: random.Random, max_leaves: int = 12) -> tuple[AndOrGraph, str]:
    """Random goal-rooted AND/OR tree plus its boolean expression string."""
    n_leaves = rng.randint(1, max_leaves)
    counter = [0]
    leaf_budget = [n_leaves]
    nodes: dict[str, AndOrNode] = {}

    def new_leaf() -> tuple[str, str]:
        i = counter[0]
        counter[0] += 1
        nid = f"n{i:03d}:leaf"
        nodes[nid] = AndOrNode(nid, LEAF, atom=Atom(A_CAPABILITY, name=f"CAP{i}"))
        return nid, f"v['{nid}']"

    def build(depth: int) -> tuple[str, str]:
        if depth >= 3 or leaf_budget[0] <= 1 or rng.random() < 0.3:
            leaf_budget[0] -= 1
            return new_leaf()
        kind = rng.choice([AND, OR])
        width = rng.randint(1, min(3, leaf_budget[0]))
        children, exprs = [], []
        for _ in range(width):
            cid, cexpr = build(depth + 1)
            children.append(cid)
            exprs.append(cexpr)
        i = counter[0]
        counter[0] += 1
        nid = f"n{i:03d}:{kind}"
        nodes[nid] = AndOrNode(nid, kind, children=tuple(children))
        joiner = " and " if kind == AND else " or "
        return nid, "(" + joiner.join(exprs) + ")"

    child, expr = build(0)
    nodes["goal"] = AndOrNode("goal", GOAL, children=(child,))
    return AndOrGraph(vuln_id="random", root="goal", nodes=nodes), expr


def random_links(rng: random.Random, andor: AndOrGraph) -> list[AssumptionLink]:
    links = []
    for leaf in sorted(andor.leaves(), key=lambda n: n.node_id):
        links.append(AssumptionLink(
            leaf_id=leaf.node_id, atom=leaf.atom, bound_kind="node",
            bound=("Capability", leaf.atom.name), polarity=REQUIRES_PRESENT,
            satisfied=rng.random() < 0.7))
    return links


def oracle_eval(expr: str, links, off: frozenset[str] = frozenset()) -> bool:
    v = {l.leaf_id: (l.satisfied and l.leaf_id not in off) for l in links}
    return bool(eval(expr, {"__builtins__": {}}, {"v": v}))


def oracle_minimal_hitting_sets(expr: str, links) -> set[frozenset[str]]:
    """All subset-minimal sets of satisfied leaves whose removal kills the root."""
    if not oracle_eval(expr, links):
        raise ValueError("root not satisfied")
    satisfied = sorted(l.leaf_id for l in links if l.satisfied)
    cutting = []
    for size in range(1, len(satisfied) + 1):
        for combo in combinations(satisfied, size):
            if not oracle_eval(expr, links, frozenset(combo)):
                cutting.append(frozenset(combo))
    return {c for c in cutting if not any(o < c for o in cutting)}
