import numpy as np
import pytest

from sensewalk.attgraph import (
    ClassTooSmall,
    GraphConfig,
    build_training_graph,
    commit_or_discard,
    default_epsilon,
    insert_test,
    write_class_graphs,
)
from sensewalk.features import Dataset, Instance


def make_dataset(points, labels, ids=None):
    X = np.asarray(points, dtype=float)
    ids = list(range(len(X))) if ids is None else ids
    names = [f"f{i}" for i in range(X.shape[1])]
    return Dataset(ids, X, list(labels), names)


class TestBuildRule:
    def test_dense_regime_epsilon_clique(self):
        # 5 coincident points: every epsilon ball holds the other 4 > kappa=3
        ds = make_dataset([[0.0, 0.0]] * 5, [1] * 5)
        graphs = build_training_graph(ds, GraphConfig(epsilon=0.1, kappa=3))
        g = graphs[0]
        assert g.vertex_count == 5
        for v in g.ids:
            assert len(g.adjacency[v]) == 4  # clique

    def test_sparse_regime_knn_links(self):
        # an isolated point far from its class gets exactly kappa links
        pts = [[0, 0], [0.1, 0], [0, 0.1], [0.1, 0.1], [50, 50]]
        ds = make_dataset(pts, [1] * 5)
        graphs = build_training_graph(ds, GraphConfig(epsilon=0.5, kappa=3))
        g = graphs[0]
        assert len(g.adjacency[4]) == 3
        assert set(g.adjacency[4]) <= {0, 1, 2, 3}

    def test_no_interclass_edges(self):
        pts = [[0, 0], [0.1, 0], [10, 10], [10.1, 10]]
        ds = make_dataset(pts, [1, 1, 2, 2])
        graphs = build_training_graph(ds, GraphConfig(epsilon=0.5, kappa=1))
        class_vertices = {g.class_id: set(g.ids) for g in graphs}
        for g in graphs:
            for a, b, _ in g.edges():
                assert a in class_vertices[g.class_id]
                assert b in class_vertices[g.class_id]

    def test_rule_selector_invariant(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(30, 3))
        ds = make_dataset(X, [1] * 30)
        cfg = GraphConfig(epsilon=1.0, kappa=3)
        graphs = build_training_graph(ds, cfg)
        g = graphs[0]
        rules_seen = set()
        for i, v in enumerate(g.ids):
            d = np.sqrt(((X - X[i]) ** 2).sum(axis=1))
            ball = {g.ids[j] for j in np.nonzero(d < cfg.epsilon)[0] if j != i}
            expected_rule = "epsilon" if len(ball) > cfg.kappa else "knn"
            assert g.neighbor_rule[v] == expected_rule
            rules_seen.add(expected_rule)
            if expected_rule == "epsilon":
                assert ball <= set(g.adjacency[v])
            else:
                order = [j for j in np.argsort(d, kind="stable") if j != i]
                knn = {g.ids[j] for j in order[: cfg.kappa]}
                assert knn <= set(g.adjacency[v])
        assert rules_seen == {"epsilon", "knn"}  # layout exercises both regimes

    def test_each_class_single_component(self):
        rng = np.random.default_rng(1)
        # two far-apart blobs in the same class force a repair bridge
        X = np.vstack([rng.normal(0, 0.2, size=(6, 2)), rng.normal(20, 0.2, size=(6, 2))])
        ds = make_dataset(X, [1] * 12)
        graphs = build_training_graph(ds, GraphConfig(epsilon=0.5, kappa=2))
        assert graphs[0].is_connected()

    def test_class_too_small(self):
        ds = make_dataset([[0, 0], [1, 1], [2, 2]], [1, 1, 2])
        with pytest.raises(ClassTooSmall):
            build_training_graph(ds, GraphConfig(epsilon=1.0))

    def test_default_epsilon_is_median_same_class_distance(self):
        pts = [[0, 0], [3, 4], [0, 0], [6, 8]]
        ds = make_dataset(pts, [1, 1, 2, 2])
        # distances: class1 pair = 5, class2 pair = 10 -> median 7.5
        assert default_epsilon(ds) == pytest.approx(7.5)

    def test_invalid_config(self):
        with pytest.raises(ValueError):
            GraphConfig(epsilon=-1.0)
        with pytest.raises(ValueError):
            GraphConfig(kappa=0)


class TestInsertTest:
    def _two_class_graphs(self):
        pts = [[0, 0], [0.2, 0], [0, 0.2], [5, 5], [5.2, 5], [5, 5.2]]
        ds = make_dataset(pts, [1, 1, 1, 2, 2, 2])
        return build_training_graph(ds, GraphConfig(epsilon=0.5, kappa=2)), ds

    def test_coincident_point_links_that_vertex(self):
        graphs, _ = self._two_class_graphs()
        views = insert_test(np.array([0.0, 0.0]), graphs)
        view1 = next(v for v in views if v.class_id == 1)
        assert 0 in {vid for vid, _ in view1.links}

    def test_far_point_empty_view(self):
        graphs, _ = self._two_class_graphs()
        views = insert_test(np.array([100.0, 100.0]), graphs)
        assert all(not v.linked for v in views)

    def test_fallback_kappa_links_within_factor(self):
        graphs, _ = self._two_class_graphs()
        # distance ~0.8 from class 1: outside epsilon=0.5, inside 3*epsilon
        views = insert_test(np.array([0.8, 0.0]), graphs)
        view1 = next(v for v in views if v.class_id == 1)
        assert len(view1.links) == 2  # kappa
        view2 = next(v for v in views if v.class_id == 2)
        assert not view2.linked

    def test_insertion_does_not_mutate_graphs(self):
        graphs, _ = self._two_class_graphs()
        before = [g.content_hash() for g in graphs]
        insert_test(np.array([0.1, 0.1]), graphs)
        insert_test(np.array([100.0, 100.0]), graphs)
        assert [g.content_hash() for g in graphs] == before

    def test_mirrored_components_symmetric_views(self):
        rng = np.random.default_rng(7)
        left = rng.normal(size=(8, 2)) - np.array([4.0, 0.0])
        right = -left  # mirror through the origin
        X = np.vstack([left, right])
        ds = make_dataset(X, [1] * 8 + [2] * 8)
        graphs = build_training_graph(ds, GraphConfig(epsilon=1.0, kappa=3))
        views = insert_test(np.zeros(2), graphs)
        d1 = sorted(round(d, 12) for _, d in views[0].links)
        d2 = sorted(round(d, 12) for _, d in views[1].links)
        assert d1 == d2
        # mirrored ids correspond: id i in class 1 <-> id i+8 in class 2
        ids1 = sorted(vid for vid, _ in views[0].links)
        ids2 = sorted(vid - 8 for vid, _ in views[1].links)
        assert ids1 == ids2


class TestCommitOrDiscard:
    def _graphs(self):
        pts = [[0, 0], [0.2, 0], [0, 0.2], [5, 5], [5.2, 5], [5, 5.2]]
        ds = make_dataset(pts, [1, 1, 1, 2, 2, 2])
        return build_training_graph(ds, GraphConfig(epsilon=0.5, kappa=2))

    def test_discard_mode_identical(self):
        graphs = self._graphs()
        before = [g.content_hash() for g in graphs]
        out = commit_or_discard(Instance(99, np.array([0.1, 0.1]), None), 1, graphs, "discard")
        assert out is graphs
        assert [g.content_hash() for g in out] == before

    def test_incorporate_adds_vertex(self):
        graphs = self._graphs()
        inst = Instance(99, np.array([0.1, 0.1]), None)
        out = commit_or_discard(inst, 1, graphs, "incorporate")
        g1 = next(g for g in out if g.class_id == 1)
        g2 = next(g for g in out if g.class_id == 2)
        assert g1.vertex_count == 4
        assert g2.vertex_count == 3
        assert 99 in g1.ids

    def test_incorporate_keeps_single_component(self):
        graphs = self._graphs()
        inst = Instance(99, np.array([40.0, 40.0]), None)  # far away outlier
        out = commit_or_discard(inst, 2, graphs, "incorporate")
        g2 = next(g for g in out if g.class_id == 2)
        assert g2.is_connected()

    def test_original_graphs_untouched_by_incorporate(self):
        graphs = self._graphs()
        before = [g.content_hash() for g in graphs]
        commit_or_discard(Instance(99, np.array([0.1, 0.1]), None), 1, graphs, "incorporate")
        assert [g.content_hash() for g in graphs] == before

    def test_unknown_mode(self):
        graphs = self._graphs()
        with pytest.raises(ValueError):
            commit_or_discard(Instance(99, np.zeros(2), None), 1, graphs, "replace")

    def test_incorporate_invalidates_walk_caches(self):
        from sensewalk.tourist import component_stats

        graphs = self._graphs()
        component_stats(graphs[0], 3)
        assert graphs[0]._walk_cache  # warmed
        inst = Instance(99, np.array([0.1, 0.1]), None)
        out = commit_or_discard(inst, 1, graphs, "incorporate")
        fresh = next(g for g in out if g.class_id == 1)
        assert fresh._walk_cache == {}
        # recomputed statistics see the incorporated vertex
        stats = component_stats(fresh, 1)
        assert fresh.vertex_count == 4
        assert stats.means[0] == (0.0, 1.0)


def test_graph_dump_format(tmp_path):
    pts = [[0, 0], [0.2, 0], [5, 5], [5.2, 5]]
    ds = make_dataset(pts, [1, 1, 2, 2])
    graphs = build_training_graph(ds, GraphConfig(epsilon=1.0, kappa=1))
    path = tmp_path / "graphs.tsv"
    write_class_graphs(graphs, path)
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 2  # one edge per class
    for line in lines:
        class_id, a, b, d = line.split("\t")
        assert float(d) > 0
