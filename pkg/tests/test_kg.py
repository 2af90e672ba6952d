import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from confstress import kg
from confstress.errors import CatalogError, GraphError, SnapshotError
from confstress.ingest import parse_dockerfile, parse_host_descriptor

from conftest import HOST_JSON, make_container


def fresh(host_json=HOST_JSON):
    return kg.init_baseline(parse_host_descriptor(host_json))


def add_default_containers(g, count, start=0):
    for i in range(start, start + count):
        cfg, _ = make_container("docker run app", f"c{i:04d}",
                                dockerfile=f"FROM img{i:04d}")
        kg.add_container(g, cfg)


class TestBaseline:
    def test_exact_counts(self):
        stats = fresh().stats()
        assert (stats.node_count, stats.edge_count) == (691, 6)

    def test_per_label_breakdown(self):
        per = fresh().stats().per_label
        assert per[kg.KERNEL_VERSION] == 50
        assert per[kg.DOCKER_VERSION] == 132
        assert per[kg.CONTAINERD_VERSION] == 83
        assert per[kg.RUNC_VERSION] == 18
        assert per[kg.CAPABILITY] == 41
        assert per[kg.SYSCALL] == 364
        assert per[kg.HOST_VM] == per[kg.KERNEL_COMPONENT] == per[kg.ENGINE_COMPONENT] == 1

    def test_different_kernel_same_counts_different_edge(self):
        g1 = fresh()
        g2 = fresh(HOST_JSON.replace("5.16", "4.9"))
        assert g1.stats().node_count == g2.stats().node_count
        assert g1.current_version_node("kernel") != g2.current_version_node("kernel")
        assert g1.has_edge(kg.KERNEL_NODE, (kg.KERNEL_VERSION, "5.16"), kg.VERSION)
        assert g2.has_edge(kg.KERNEL_NODE, (kg.KERNEL_VERSION, "4.9"), kg.VERSION)

    def test_journal_empty_after_init(self):
        assert fresh().journal == []

    def test_unknown_host_version_named_in_error(self):
        with pytest.raises(CatalogError, match="2.6"):
            fresh(HOST_JSON.replace("5.16", "2.6"))


class TestImages:
    def test_one_image(self):
        g = fresh()
        kg.add_image(g, parse_dockerfile("FROM ubuntu"))
        stats = g.stats()
        assert (stats.node_count, stats.edge_count) == (693, 8)

    def test_duplicate_image_errors(self):
        g = fresh()
        kg.add_image(g, parse_dockerfile("FROM ubuntu"))
        with pytest.raises(GraphError):
            kg.add_image(g, parse_dockerfile("FROM ubuntu"))

    def test_two_images_linear(self):
        g = fresh()
        kg.add_image(g, parse_dockerfile("FROM ubuntu"))
        kg.add_image(g, parse_dockerfile("FROM nginx"))
        stats = g.stats()
        assert (stats.node_count, stats.edge_count) == (695, 10)


class TestContainers:
    def test_one_default_container(self):
        g = fresh()
        add_default_containers(g, 1)
        stats = g.stats()
        assert (stats.node_count, stats.edge_count) == (702, 349)

    @pytest.mark.parametrize("k, nodes, edges", [
        (100, 999, 1339),
        (1000, 3699, 10339),
    ])
    def test_many_default_containers(self, k, nodes, edges):
        g = fresh()
        add_default_containers(g, k)
        stats = g.stats()
        assert (stats.node_count, stats.edge_count) == (nodes, edges)

    def test_affine_growth(self):
        # counts follow 699 + 3k nodes and 339 + 10k edges for k >= 1
        g = fresh()
        observed = []
        for k in range(1, 6):
            add_default_containers(g, 1, start=k - 1)
            s = g.stats()
            observed.append((s.node_count, s.edge_count))
        assert observed == [(699 + 3 * k, 339 + 10 * k) for k in range(1, 6)]

    @pytest.mark.parametrize("cmd, edges", [
        ("docker run --cap-drop ALL --cap-add NET_BIND_SERVICE app", 335),
        ("docker run --cap-add NET_ADMIN --security-opt apparmor=unconfined app", 348),
    ])
    def test_custom_capability_rows_exact(self, cmd, edges):
        g = fresh()
        cfg, _ = make_container(cmd, "c1")
        kg.add_container(g, cfg)
        stats = g.stats()
        assert stats.node_count == 702
        assert stats.edge_count == edges

    def test_privileged_row_within_documented_band(self):
        g = fresh()
        cfg, _ = make_container("docker run --privileged app", "c1")
        kg.add_container(g, cfg)
        stats = g.stats()
        assert stats.node_count == 702
        # reference model: 6 baseline + 7 per-container + 41 + 364 = 418
        assert stats.edge_count == 418
        assert abs(stats.edge_count - 420) <= 8

    def test_duplicate_container_errors(self):
        g = fresh()
        add_default_containers(g, 1)
        cfg, _ = make_container("docker run app", "c0000", dockerfile="FROM other")
        with pytest.raises(GraphError):
            kg.add_container(g, cfg)

    def test_shared_image_adds_one_node(self):
        g = fresh()
        cfg1, _ = make_container("docker run app", "a")
        cfg2, _ = make_container("docker run app", "b")
        kg.add_container(g, cfg1)
        before = g.stats()
        kg.add_container(g, cfg2)
        after = g.stats()
        assert after.node_count - before.node_count == 1
        assert after.edge_count - before.edge_count == 8


class TestMutationsAndJournal:
    def test_remove_then_undo_is_identity(self):
        g = fresh()
        cfg, _ = make_container(
            "docker run --cap-add SYS_ADMIN app", "c1")
        kg.add_container(g, cfg)
        nodes, edges = set(g.nodes), set(g.edges)
        mark = len(g.journal)
        c = (kg.CONTAINER, "c1")
        cap = (kg.CAPABILITY, "SYS_ADMIN")
        g.remove_edge(c, cap, kg.GRANTED)
        assert len(g.edges) == len(edges) - 1
        kg.rollback(g, to_length=mark)
        assert g.nodes == nodes and g.edges == edges

    def test_remove_missing_edge_errors(self):
        g = fresh()
        with pytest.raises(GraphError):
            g.remove_edge((kg.CONTAINER, "nope"), (kg.CAPABILITY, "CHOWN"), kg.GRANTED)

    def test_add_edge_missing_endpoint_errors(self):
        g = fresh()
        with pytest.raises(GraphError):
            g.add_edge((kg.CONTAINER, "nope"), (kg.CAPABILITY, "CHOWN"), kg.GRANTED)

    def test_duplicate_edge_errors(self):
        g = fresh()
        with pytest.raises(GraphError):
            g.add_edge(kg.KERNEL_NODE, (kg.KERNEL_VERSION, "5.16"), kg.VERSION)

    def test_journal_soundness_from_any_state(self):
        g = fresh()
        add_default_containers(g, 3)
        baseline_nodes = 691
        kg.rollback(g, to_length=0)
        assert g.stats().node_count == baseline_nodes
        assert g.stats().edge_count == 6


class TestExistsRelation:
    def test_privileged_virtual_pair(self):
        g = fresh()
        cfg, _ = make_container("docker run --privileged nginx", "Nginx")
        kg.add_container(g, cfg)
        assert g.exists_relation(("Container", "Nginx"), None,
                                 ("Permissions", "Privileged"))
        assert g.exists_relation(("Container", "Nginx"), kg.HAS,
                                 ("Permissions", "Privileged"))

    def test_default_container_is_not_privileged(self):
        g = fresh()
        cfg, _ = make_container("docker run nginx", "Nginx")
        kg.add_container(g, cfg)
        assert not g.exists_relation(("Container", "Nginx"), None,
                                     ("Permissions", "Privileged"))

    def test_relation_filter_selectivity(self):
        g = fresh()
        cfg, _ = make_container("docker run --privileged nginx", "Nginx")
        kg.add_container(g, cfg)
        c = ("Container", "Nginx")
        assert g.exists_relation(c, kg.GRANTED, ("Capability", "SYS_ADMIN"))
        assert not g.exists_relation(c, kg.ALLOWS, ("Capability", "SYS_ADMIN"))
        assert g.exists_relation(c, kg.ALLOWS, ("Syscall", "mount"))
        assert not g.exists_relation(c, kg.GRANTED, ("Syscall", "mount"))

    def test_unknown_names_yield_false(self):
        g = fresh()
        assert not g.exists_relation(("Container", "ghost"), None,
                                     ("Capability", "CHOWN"))
        assert not g.exists_relation(("NoSuchLabel", "x"), None,
                                     ("Capability", "CHOWN"))


class TestSnapshots:
    def test_round_trip_graph_equal(self):
        g = fresh()
        add_default_containers(g, 1)
        restored = kg.restore(kg.snapshot_json(g))
        assert g.graph_equal(restored)
        assert restored.container_configs.keys() == g.container_configs.keys()

    def test_byte_stable_across_runs(self):
        def build():
            g = fresh()
            add_default_containers(g, 2)
            return kg.snapshot_json(g)
        assert build() == build()

    def test_truncated_document_errors(self):
        g = fresh()
        text = kg.snapshot_json(g)
        with pytest.raises(SnapshotError):
            kg.restore(text[: len(text) // 2])

    def test_wrong_format_errors(self):
        with pytest.raises(SnapshotError):
            kg.restore(json.dumps({"format": "something-else"}))

    def test_missing_section_errors(self):
        doc = kg.snapshot(fresh())
        del doc["edges"]
        with pytest.raises(SnapshotError) as err:
            kg.restore(json.dumps(doc))
        assert err.value.location == "edges"


commands = st.sampled_from([
    "docker run app",
    "docker run --cap-add SYS_ADMIN app",
    "docker run --cap-drop ALL --cap-add NET_BIND_SERVICE app",
    "docker run --privileged app",
    "docker run --security-opt apparmor=unconfined app",
    "docker run --security-opt seccomp=unconfined --user 1000 app",
    "docker run --network host --read-only app",
])


@settings(deadline=None, max_examples=40)
@given(st.lists(commands, min_size=1, max_size=4))
def test_incremental_build_equals_rebuild(cmds):
    """add_container's fast path agrees with a from-scratch rebuild."""
    g = fresh()
    for i, cmd in enumerate(cmds):
        cfg, _ = make_container(cmd, f"c{i}", dockerfile=f"FROM img{i}")
        kg.add_container(g, cfg)
    rebuilt = kg.rebuild_from_configs(
        g.host, g.images.values(), g.container_configs.values())
    assert g.graph_equal(rebuilt)
