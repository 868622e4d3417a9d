import numpy as np
import pytest

from pathcut.graph import EMPTY_MASK, EdgeMask, Path, PathQuery, ValidationError, WeightedGraph
from pathcut.paths import dijkstra, k_shortest_paths, shortest_path

from conftest import bellman_ford, enumerate_simple_paths, path_sum_ltr, random_graph


def path_graph():
    return WeightedGraph(3, [(0, 1, 1, 1), (1, 2, 1, 1)])


def square_cycle():
    return WeightedGraph(4, [(0, 1, 1, 1), (1, 2, 1, 1), (2, 3, 1, 1), (0, 3, 1, 1)])


class TestDijkstra:
    def test_path_graph(self):
        tree = dijkstra(path_graph(), EMPTY_MASK, 0)
        np.testing.assert_array_equal(tree.dist, [0.0, 1.0, 2.0])

    def test_disconnected_is_infinite(self):
        g = WeightedGraph(3, [(0, 1, 1, 1)])
        tree = dijkstra(g, EMPTY_MASK, 0)
        assert np.isinf(tree.dist[2])
        assert tree.path_to(2, g) is None

    def test_mask_respected(self):
        tree = dijkstra(path_graph(), EdgeMask.of({0}), 0)
        assert np.isinf(tree.dist[1]) and np.isinf(tree.dist[2])

    def test_bad_source(self):
        with pytest.raises(ValidationError):
            dijkstra(path_graph(), EMPTY_MASK, 9)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_bellman_ford(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 50, 0.08)
        mask = EdgeMask.of(
            rng.choice(g.edge_count, size=g.edge_count // 10, replace=False).tolist()
            if g.edge_count >= 10
            else []
        )
        for source in (0, 17, 49):
            np.testing.assert_array_equal(
                dijkstra(g, mask, source).dist, bellman_ford(g, mask, source)
            )

    def test_parent_tiebreak_smallest_predecessor(self):
        # two equal-length routes into node 3; parent must come via node 1
        g = WeightedGraph(4, [(0, 1, 1, 1), (0, 2, 1, 1), (1, 3, 1, 1), (2, 3, 1, 1)])
        tree = dijkstra(g, EMPTY_MASK, 0)
        assert tree.parent_node[3] == 1

    def test_triangle_inequality_over_live_edges(self, rng):
        g = random_graph(rng, 25, 0.25)
        tree = dijkstra(g, EMPTY_MASK, 0)
        for e in range(g.edge_count):
            a, b, w = int(g.u[e]), int(g.v[e]), float(g.weight[e])
            assert tree.dist[b] <= tree.dist[a] + w + 1e-12
            assert tree.dist[a] <= tree.dist[b] + w + 1e-12


class TestKShortest:
    def test_unique_path(self):
        paths = k_shortest_paths(path_graph(), EMPTY_MASK, 0, 2, 3)
        assert [p.nodes for p in paths] == [(0, 1, 2)]

    def test_square_cycle_lexicographic_tie(self):
        paths = k_shortest_paths(square_cycle(), EMPTY_MASK, 0, 2, 2)
        assert [p.nodes for p in paths] == [(0, 1, 2), (0, 3, 2)]
        assert paths[0].length == paths[1].length == 2.0

    def test_unreachable_returns_empty(self):
        g = WeightedGraph(3, [(0, 1, 1, 1)])
        assert k_shortest_paths(g, EMPTY_MASK, 0, 2, 5) == []

    def test_k_must_be_positive(self):
        with pytest.raises(ValidationError):
            k_shortest_paths(path_graph(), EMPTY_MASK, 0, 2, 0)

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_exhaustive_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        g = random_graph(rng, 8, 0.45, unit_weights=bool(seed % 2))
        s, t = 0, 7
        expected = enumerate_simple_paths(g, EMPTY_MASK, s, t)[:20]
        got = k_shortest_paths(g, EMPTY_MASK, s, t, 20)
        assert [p.nodes for p in got] == expected

    @pytest.mark.parametrize("seed", range(5))
    def test_prefix_property(self, seed):
        rng = np.random.default_rng(100 + seed)
        g = random_graph(rng, 8, 0.5)
        full = k_shortest_paths(g, EMPTY_MASK, 0, 7, 12)
        for k in range(1, len(full) + 1):
            assert [p.nodes for p in k_shortest_paths(g, EMPTY_MASK, 0, 7, k)] == [
                p.nodes for p in full[:k]
            ]

    def test_nondecreasing_simple_valid(self, rng):
        g = random_graph(rng, 10, 0.4)
        paths = k_shortest_paths(g, EMPTY_MASK, 0, 9, 30)
        for prev, cur in zip(paths, paths[1:]):
            assert prev.length <= cur.length + 1e-12
        for p in paths:
            assert len(set(p.nodes)) == len(p.nodes)
            assert abs(path_sum_ltr(g, p.nodes) - p.length) < 1e-12

    def test_respects_mask(self):
        g = square_cycle()
        paths = k_shortest_paths(g, EdgeMask.of({0}), 0, 2, 3)
        assert [p.nodes for p in paths] == [(0, 3, 2)]


class TestShortestPath:
    def test_simple(self):
        g = path_graph()
        q = PathQuery(0, 2, Path.from_nodes(g, [0, 1, 2]))
        assert shortest_path(g, EMPTY_MASK, q).nodes == (0, 1, 2)

    def test_bridge_deleted_absent(self):
        g = path_graph()
        q = PathQuery(0, 2, Path.from_nodes(g, [0, 1, 2]))
        assert shortest_path(g, EdgeMask.of({1}), q) is None

    @pytest.mark.parametrize("seed", range(20))
    def test_matches_yen_k1_random_instances(self, seed):
        # continuous weights: unique shortest path, both orderings agree
        rng = np.random.default_rng(200 + seed)
        g = random_graph(rng, 20, 0.25)
        pairs = 0
        for t in range(1, 20):
            yen = k_shortest_paths(g, EMPTY_MASK, 0, t, 1)
            tree = dijkstra(g, EMPTY_MASK, 0)
            sp = tree.path_to(t, g)
            if not yen:
                assert sp is None
                continue
            assert sp.nodes == yen[0].nodes
            pairs += 1
        assert pairs > 0

    def test_min_over_enumeration_small(self, rng):
        for seed in range(8):
            r = np.random.default_rng(300 + seed)
            g = random_graph(r, 8, 0.4)
            all_paths = enumerate_simple_paths(g, EMPTY_MASK, 0, 7)
            tree = dijkstra(g, EMPTY_MASK, 0)
            sp = tree.path_to(7, g)
            if not all_paths:
                assert sp is None
            else:
                assert abs(sp.length - path_sum_ltr(g, all_paths[0])) < 1e-12
