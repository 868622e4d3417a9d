import numpy as np
import pytest

from pathcut.graph import EMPTY_MASK, ValidationError
from pathcut.synthgen import (
    GeneratorParams,
    SamplingError,
    generate,
    sample_instance,
)

from conftest import enumerate_simple_paths, random_graph


class TestParams:
    def test_unknown_family(self):
        with pytest.raises(ValidationError):
            GeneratorParams("tree")

    def test_er_probability_range_enforced(self):
        with pytest.raises(ValidationError):
            GeneratorParams("er", n=100, p=0.5)
        GeneratorParams("er", n=100, p=0.017)

    def test_ba_attachment_range_enforced(self):
        with pytest.raises(ValidationError):
            GeneratorParams("ba", n=100, m=4)
        with pytest.raises(ValidationError):
            GeneratorParams("ba", n=100, m=10)
        GeneratorParams("ba", n=100, m=9)

    def test_ws_ring_range_enforced(self):
        with pytest.raises(ValidationError):
            GeneratorParams("ws", n=100, k=10)
        with pytest.raises(ValidationError):
            GeneratorParams("ws", n=100, k=16)

    def test_ws_rewire_probability_fixed(self):
        with pytest.raises(ValidationError):
            GeneratorParams("ws", n=100, k=12, p_r=0.5)

    def test_node_count(self):
        assert GeneratorParams("lattice", rows=4, cols=7).node_count == 28
        assert GeneratorParams("er", n=123, p=0.014).node_count == 123


class TestGenerate:
    def test_lattice_30x30_sizes(self):
        g = generate(GeneratorParams("lattice", rows=30, cols=30))
        assert g.node_count == 900
        assert g.edge_count == 2 * 30 * 29  # 1740

    def test_lattice_degree_profile(self):
        g = generate(GeneratorParams("lattice", rows=5, cols=5))
        deg = np.zeros(25, dtype=int)
        for a, b, _, _ in g.edge_tuples():
            deg[a] += 1
            deg[b] += 1
        assert sorted(deg.tolist()).count(2) == 4   # corners
        assert (deg == 3).sum() == 12               # sides
        assert (deg == 4).sum() == 9                # interior

    def test_ws_even_ring_edge_count(self):
        # k=12 gives a 6-neighbor-per-side ring: exactly n*k/2 edges,
        # rewiring only moves endpoints
        g = generate(GeneratorParams("ws", n=1000, k=12, seed=1))
        assert g.node_count == 1000
        assert g.edge_count == 6000

    def test_ba_edge_count(self):
        g = generate(GeneratorParams("ba", n=500, m=7, seed=3))
        assert g.edge_count == (500 - 7) * 7

    def test_er_edge_count_within_binomial_band(self):
        n, p = 1000, 0.014
        mean = p * n * (n - 1) / 2
        sd = (mean * (1 - p)) ** 0.5
        for seed in range(5):
            g = generate(GeneratorParams("er", n=n, p=p, seed=seed))
            assert abs(g.edge_count - mean) < 4 * sd

    def test_unit_weights_and_costs(self):
        for params in (
            GeneratorParams("lattice", rows=6, cols=6),
            GeneratorParams("er", n=200, p=0.015, seed=2),
            GeneratorParams("ba", n=100, m=5, seed=2),
            GeneratorParams("ws", n=100, k=14, seed=2),
        ):
            g = generate(params)
            assert np.all(g.weight == 1.0) and np.all(g.cost == 1.0)

    def test_same_seed_reproduces(self):
        a = generate(GeneratorParams("er", n=300, p=0.016, seed=11))
        b = generate(GeneratorParams("er", n=300, p=0.016, seed=11))
        assert a.edge_tuples() == b.edge_tuples()

    def test_different_seeds_differ(self):
        a = generate(GeneratorParams("ba", n=200, m=5, seed=1))
        b = generate(GeneratorParams("ba", n=200, m=5, seed=2))
        assert a.edge_tuples() != b.edge_tuples()


class TestSampleInstance:
    def test_deterministic(self):
        g = generate(GeneratorParams("ba", n=100, m=5, seed=4))
        q1 = sample_instance(g, 5, seed=9)
        q2 = sample_instance(g, 5, seed=9)
        assert (q1.source, q1.target, q1.target_path.nodes) == (
            q2.source,
            q2.target,
            q2.target_path.nodes,
        )

    def test_kth_path_matches_enumeration(self, rng):
        for seed in range(6):
            r = np.random.default_rng(8000 + seed)
            g = random_graph(r, 8, 0.5, unit_weights=True)
            try:
                q = sample_instance(g, 3, seed=seed)
            except SamplingError:
                continue
            expected = enumerate_simple_paths(g, EMPTY_MASK, q.source, q.target)
            assert q.target_path.nodes == expected[2]

    def test_endpoints_in_largest_component(self):
        g = generate(GeneratorParams("er", n=400, p=0.01, seed=7))
        q = sample_instance(g, 2, seed=7)
        from pathcut.paths import dijkstra

        assert np.isfinite(dijkstra(g, EMPTY_MASK, q.source).dist[q.target])

    def test_k_star_must_be_positive(self):
        g = generate(GeneratorParams("ba", n=50, m=5, seed=1))
        with pytest.raises(ValidationError):
            sample_instance(g, 0, seed=1)

    def test_too_small_graph_raises(self):
        from pathcut.graph import WeightedGraph

        with pytest.raises(SamplingError):
            sample_instance(WeightedGraph(3, []), 1, seed=0)
