import random

import pytest

from confstress import kg
from confstress.errors import GraphError, ValidationError
from confstress.evaluate import (
    evaluate,
    minimal_invalidation_sets,
    resilience_from_journal,
    scan_deployment,
)
from confstress.vulns import (
    AND,
    GOAL,
    LEAF,
    OR,
    A_CAPABILITY,
    A_PRIVILEGED,
    A_ROOT_USER,
    A_SYSCALL,
    AndOrGraph,
    AndOrNode,
    AssumptionLink,
    Atom,
    REQUIRES_PRESENT,
    build_andor_graph,
    link_assumptions,
)

from conftest import HOST_JSON, make_container
from oracles import (
    oracle_eval,
    oracle_minimal_hitting_sets,
    random_andor,
    random_links,
)
from test_kg import add_default_containers, fresh


def leaf_link(leaf_id: str, atom: Atom, satisfied: bool) -> AssumptionLink:
    return AssumptionLink(leaf_id=leaf_id, atom=atom, bound_kind="node",
                          bound=("Capability", atom.name or "X"),
                          polarity=REQUIRES_PRESENT, satisfied=satisfied)


def build_graph(spec: dict) -> AndOrGraph:
    """spec: {node_id: (kind, children or atom)} plus 'goal'."""
    nodes = {}
    for nid, payload in spec.items():
        kind = payload[0]
        if kind == LEAF:
            nodes[nid] = AndOrNode(nid, LEAF, atom=payload[1])
        else:
            nodes[nid] = AndOrNode(nid, kind, children=tuple(payload[1]))
    return AndOrGraph(vuln_id="test", root="goal", nodes=nodes)


class TestEvaluate:
    def test_escape_poc_witness_is_the_conjunction_branch(
            self, listing1_graph, catalog_by_id):
        g, _ = listing1_graph
        andor = build_andor_graph(catalog_by_id["cgroup-escape"], g)
        links = link_assumptions(andor, g, "listing1")
        verdict = evaluate(andor, links, "listing1")
        assert verdict.satisfied
        witness_atoms = {andor.nodes[n].atom.kind
                         for n in verdict.witness if andor.nodes[n].kind == LEAF}
        assert witness_atoms == {A_ROOT_USER, A_CAPABILITY, A_SYSCALL,
                                 "apparmor_unconfined"}

    def test_dropping_all_capabilities_falsifies(self, host, catalog_by_id):
        g = kg.init_baseline(host)
        cfg, _ = make_container(
            "docker run --cap-drop ALL --security-opt apparmor=unconfined ubuntu",
            "bare")
        kg.add_container(g, cfg)
        andor = build_andor_graph(catalog_by_id["cgroup-escape"], g)
        verdict = evaluate(andor, link_assumptions(andor, g, "bare"), "bare")
        assert not verdict.satisfied
        assert verdict.witness == ()

    def test_empty_gates_rejected_at_construction(self):
        with pytest.raises(ValidationError):
            AndOrNode("x", AND)
        with pytest.raises(ValidationError):
            AndOrNode("x", OR)

    def test_links_must_cover_leaves(self):
        andor = build_graph({
            "goal": (GOAL, ["l1"]),
            "l1": (LEAF, Atom(A_CAPABILITY, name="CHOWN")),
        })
        with pytest.raises(ValidationError):
            evaluate(andor, [])

    def test_witness_minimality(self):
        # OR picks exactly one satisfied child even when both hold
        andor = build_graph({
            "goal": (GOAL, ["or1"]),
            "or1": (OR, ["l1", "l2"]),
            "l1": (LEAF, Atom(A_CAPABILITY, name="A")),
            "l2": (LEAF, Atom(A_CAPABILITY, name="B")),
        })
        links = [leaf_link("l1", Atom(A_CAPABILITY, name="A"), True),
                 leaf_link("l2", Atom(A_CAPABILITY, name="B"), True)]
        verdict = evaluate(andor, links)
        leaves_in_witness = [n for n in verdict.witness if n.startswith("l")]
        assert leaves_in_witness == ["l1"]


class TestMinimalInvalidationSets:
    def test_conjunction_of_three_gives_singletons(self):
        andor = build_graph({
            "goal": (GOAL, ["and1"]),
            "and1": (AND, ["l1", "l2", "l3"]),
            "l1": (LEAF, Atom(A_CAPABILITY, name="A")),
            "l2": (LEAF, Atom(A_CAPABILITY, name="B")),
            "l3": (LEAF, Atom(A_CAPABILITY, name="C")),
        })
        links = [leaf_link(f"l{i}", Atom(A_CAPABILITY, name=n), True)
                 for i, n in ((1, "A"), (2, "B"), (3, "C"))]
        cuts = minimal_invalidation_sets(andor, links)
        assert sorted(sorted(c.leaf_ids()) for c in cuts) == [["l1"], ["l2"], ["l3"]]

    def test_two_branch_or_pairs(self):
        # OR(privileged, AND(root, cap, mount)) with both branches satisfied
        andor = build_graph({
            "goal": (GOAL, ["or1"]),
            "or1": (OR, ["priv", "and1"]),
            "and1": (AND, ["root", "cap", "mount"]),
            "priv": (LEAF, Atom(A_PRIVILEGED)),
            "root": (LEAF, Atom(A_ROOT_USER)),
            "cap": (LEAF, Atom(A_CAPABILITY, name="SYS_ADMIN")),
            "mount": (LEAF, Atom(A_SYSCALL, name="mount")),
        })
        links = [leaf_link("priv", Atom(A_PRIVILEGED), True),
                 leaf_link("root", Atom(A_ROOT_USER), True),
                 leaf_link("cap", Atom(A_CAPABILITY, name="SYS_ADMIN"), True),
                 leaf_link("mount", Atom(A_SYSCALL, name="mount"), True)]
        cuts = minimal_invalidation_sets(andor, links)
        got = {tuple(sorted(c.leaf_ids())) for c in cuts}
        assert got == {("cap", "priv"), ("mount", "priv"), ("priv", "root")}

    def test_single_syscall_cut_suffices_for_kernel_cve(
            self, default_graph, catalog_by_id):
        g, _ = default_graph
        andor = build_andor_graph(catalog_by_id["CVE-2022-0492"], g)
        links = link_assumptions(andor, g, "plain")
        cuts = minimal_invalidation_sets(andor, links)
        singleton_atoms = [next(iter(c.links)).atom for c in cuts if len(c.links) == 1]
        names = {a.name for a in singleton_atoms if a.kind == A_SYSCALL}
        assert {"mount", "unshare"} <= names
        # root AND the capability must both go to kill the user-OR
        pairs = [c for c in cuts if len(c.links) == 2]
        assert any({l.atom.kind for l in c.links} == {A_ROOT_USER, A_CAPABILITY}
                   for c in pairs)

    def test_unsatisfied_verdict_errors(self):
        andor = build_graph({
            "goal": (GOAL, ["l1"]),
            "l1": (LEAF, Atom(A_CAPABILITY, name="A")),
        })
        links = [leaf_link("l1", Atom(A_CAPABILITY, name="A"), False)]
        with pytest.raises(GraphError):
            minimal_invalidation_sets(andor, links)

    def test_cut_ordering_respects_costs(self):
        andor = build_graph({
            "goal": (GOAL, ["and1"]),
            "and1": (AND, ["cap", "mount"]),
            "cap": (LEAF, Atom(A_CAPABILITY, name="SYS_ADMIN")),
            "mount": (LEAF, Atom(A_SYSCALL, name="mount")),
        })
        links = [leaf_link("cap", Atom(A_CAPABILITY, name="SYS_ADMIN"), True),
                 leaf_link("mount", Atom(A_SYSCALL, name="mount"), True)]
        costs = {"not_capability": 0.1, "not_syscall": 0.9}
        cuts = minimal_invalidation_sets(andor, links, costs)
        assert next(iter(cuts[0].links)).atom.kind == A_CAPABILITY
        costs = {"not_capability": 0.9, "not_syscall": 0.1}
        cuts = minimal_invalidation_sets(andor, links, costs)
        assert next(iter(cuts[0].links)).atom.kind == A_SYSCALL


class TestOracleEquivalence:
    def test_random_graphs_match_brute_force(self):
        rng = random.Random(20260809)
        checked_cuts = 0
        for _ in range(250):
            andor, expr = random_andor(rng)
            links = random_links(rng, andor)
            values = {l.leaf_id: l.satisfied for l in links}
            verdict = evaluate(andor, links)
            assert verdict.satisfied == oracle_eval(expr, links)
            if verdict.satisfied:
                got = {frozenset(c.leaf_ids())
                       for c in minimal_invalidation_sets(andor, links)}
                assert got == oracle_minimal_hitting_sets(expr, links)
                checked_cuts += 1
        assert checked_cuts > 50

    def test_monotonicity(self):
        rng = random.Random(7)
        for _ in range(100):
            andor, expr = random_andor(rng)
            links = random_links(rng, andor)
            if evaluate(andor, links).satisfied:
                continue
            # removing satisfied assumptions never turns false into true
            satisfied = [l.leaf_id for l in links if l.satisfied]
            for leaf in satisfied:
                off = [l if l.leaf_id != leaf else
                       AssumptionLink(l.leaf_id, l.atom, l.bound_kind, l.bound,
                                      l.polarity, False)
                       for l in links]
                assert not evaluate(andor, off).satisfied

    def test_cut_soundness(self):
        rng = random.Random(99)
        for _ in range(100):
            andor, expr = random_andor(rng)
            links = random_links(rng, andor)
            if not evaluate(andor, links).satisfied:
                continue
            for cut in minimal_invalidation_sets(andor, links):
                ids = cut.leaf_ids()
                after = [l if l.leaf_id not in ids else
                         AssumptionLink(l.leaf_id, l.atom, l.bound_kind, l.bound,
                                        l.polarity, False)
                         for l in links]
                assert not evaluate(andor, after).satisfied


class TestScanDeployment:
    def test_default_container_on_old_kernel(self, catalog):
        g = fresh(HOST_JSON.replace("5.16", "4.9"))
        cfg, _ = make_container("docker run ubuntu", "plain")
        kg.add_container(g, cfg)
        report = scan_deployment(g, catalog)
        by_cve = {v.cve_id: v for v in report.verdicts}
        assert by_cve["CVE-2022-0492"].satisfied          # root, mount/unshare, 4.9
        assert not by_cve["cgroup-escape"].satisfied      # SYS_ADMIN missing
        assert not by_cve["CVE-2020-13401"].satisfied     # docker 20.10 too new
        assert report.totals["kernel_bug"]["priviledge_escalation"]["satisfied"] == 1

    def test_zero_containers(self, host, catalog):
        g = kg.init_baseline(host)
        report = scan_deployment(g, catalog)
        assert report.verdicts == []
        assert report.resilience_score == 0

    def test_hundred_containers_uniform(self, host, catalog):
        g = kg.init_baseline(host)
        add_default_containers(g, 100)
        report = scan_deployment(g, catalog)
        assert len(report.verdicts) == 100 * len(catalog)
        for cve in {v.cve_id for v in report.verdicts}:
            outcomes = {v.satisfied for v in report.verdicts if v.cve_id == cve}
            assert len(outcomes) == 1

    def test_report_document_shape(self, listing1_graph, catalog):
        g, _ = listing1_graph
        doc = scan_deployment(g, catalog).to_document()
        assert set(doc) == {"verdicts", "totals", "resilience_score"}
        assert all({"container", "cve_id", "satisfied", "witness",
                    "satisfied_assumptions"} <= set(v) for v in doc["verdicts"])


class TestResilience:
    def test_only_assumption_removals_count(self, listing1_graph):
        g, _ = listing1_graph
        c = (kg.CONTAINER, "listing1")
        cap = (kg.CAPABILITY, "SYS_ADMIN")
        g.remove_edge(c, cap, kg.GRANTED, assumption=True)
        g.remove_edge(c, (kg.CAPABILITY, "CHOWN"), kg.GRANTED)  # bookkeeping
        assert resilience_from_journal(g.journal) == 1
