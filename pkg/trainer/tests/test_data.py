"""File-format readers and label construction."""

import itertools

import networkx as nx
import numpy as np
import pytest

from pathcut.graph import load_edge_list, save_edge_list, save_instance
from pathcut.synthgen import GeneratorParams, generate, sample_instance

from pathcut_trainer.data import (
    DataError,
    Instance,
    load_graph_tsv,
    load_instance,
    make_labels,
    run_solver,
)


def write_tsv(path, text):
    path.write_text(text)
    return path


def test_load_graph_tsv_basics(tmp_path):
    p = write_tsv(
        tmp_path / "g.tsv",
        "# u\tv\tweight\tcost\n"
        "0\t1\t2.0\t1.0\n"
        "2\t1\t1.5\t3.0\n"
        "2\t2\t9.0\t9.0\n"     # self-loop, dropped
        "1\t0\t1.0\t4.0\n",    # duplicate of (0,1), keeps the lighter weight
    )
    n, edges = load_graph_tsv(p)
    assert n == 3
    assert edges == [(0, 1, 1.0, 4.0), (1, 2, 1.5, 3.0)]


def test_load_graph_tsv_defaults_and_errors(tmp_path):
    n, edges = load_graph_tsv(write_tsv(tmp_path / "a.tsv", "0 1\n"))
    assert edges == [(0, 1, 1.0, 1.0)]
    assert load_graph_tsv(write_tsv(tmp_path / "b.tsv", "# only comments\n")) == (0, [])
    with pytest.raises(DataError):
        load_graph_tsv(write_tsv(tmp_path / "c.tsv", "0\n"))
    with pytest.raises(DataError):
        load_graph_tsv(write_tsv(tmp_path / "d.tsv", "0 x\n"))


def test_edge_order_matches_solver_loader(tmp_path):
    g = generate(GeneratorParams("ba", n=80, m=5, seed=2))
    path = tmp_path / "g.tsv"
    save_edge_list(g, path)
    g2 = load_edge_list(path)
    n, edges = load_graph_tsv(path)
    assert n == g2.node_count
    assert [(a, b) for a, b, _, _ in edges] == list(zip(g2.u.tolist(), g2.v.tolist()))
    assert np.allclose([w for _, _, w, _ in edges], g2.weight)
    assert np.allclose([c for _, _, _, c in edges], g2.cost)


def test_load_instance_roundtrip(tmp_path):
    g = generate(GeneratorParams("ws", n=60, k=12, seed=1))
    q = sample_instance(g, 3, seed=5)
    save_edge_list(g, tmp_path / "g.tsv")
    save_instance(g, q, "g.tsv", tmp_path / "inst.json")
    inst = load_instance(tmp_path / "inst.json", family="ws")
    assert inst.source == q.source and inst.target == q.target
    assert inst.p_star == list(q.target_path.nodes)
    assert inst.node_count == g.node_count
    assert len(inst.edges) == g.edge_count
    assert inst.family == "ws"
    assert inst.p_star_length() == pytest.approx(q.target_path.length)


def tiny_instance():
    # 0-1-2-3 path plus a 0-4-3 detour and a 5-pendant
    edges = [
        (0, 1, 1.0, 1.0),
        (1, 2, 1.0, 1.0),
        (2, 3, 1.0, 1.0),
        (0, 4, 1.5, 1.0),
        (3, 4, 1.5, 1.0),
        (0, 5, 1.0, 1.0),
    ]
    return Instance(
        graph_path=None, source=0, target=3, p_star=[0, 1, 2, 3],
        node_count=6, edges=edges,
    )


def test_p_star_length_missing_edge():
    inst = tiny_instance()
    inst.p_star = [0, 2, 3]
    with pytest.raises(DataError):
        inst.p_star_length()


def test_labels_unknown_mode_and_missing_cut():
    inst = tiny_instance()
    with pytest.raises(DataError):
        make_labels(inst, "nope")
    with pytest.raises(DataError):
        make_labels(inst, "cut_incidence", None)


def test_cut_incidence_labels():
    inst = tiny_instance()
    y = make_labels(inst, "cut_incidence", {3})   # edge (0, 4)
    assert y.tolist() == [1, 1, 1, 1, 1, 0]
    # empty cut leaves only the target path positive
    y = make_labels(inst, "cut_incidence", set())
    assert y.tolist() == [1, 1, 1, 1, 0, 0]


def test_competitive_path_labels_tiny():
    inst = tiny_instance()
    # detour through 4 has length 3.0 == |p*|, so 4 is competitive; 5 is not
    y = make_labels(inst, "competitive_path")
    assert y.tolist() == [1, 1, 1, 1, 1, 0]


def brute_competitive(inst):
    """Oracle: v is competitive iff some simple s-t path through v is short enough."""
    G = nx.Graph()
    G.add_nodes_from(range(inst.node_count))
    for a, b, w, _ in inst.edges:
        G.add_edge(a, b, weight=w)
    bound = inst.p_star_length() + 1e-12
    best = {v: np.inf for v in range(inst.node_count)}
    for path in nx.all_simple_paths(G, inst.source, inst.target):
        length = sum(G[a][b]["weight"] for a, b in itertools.pairwise(path))
        for v in path:
            best[v] = min(best[v], length)
    y = np.zeros(inst.node_count)
    for v in range(inst.node_count):
        if best[v] <= bound:
            y[v] = 1.0
    y[inst.p_star] = 1.0
    return y


def test_competitive_path_labels_vs_enumeration():
    rng = np.random.default_rng(0)
    for trial in range(10):
        G = nx.gnp_random_graph(9, 0.35, seed=int(rng.integers(1 << 30)))
        comps = list(nx.connected_components(G))
        nodes = sorted(max(comps, key=len))
        if len(nodes) < 3:
            continue
        relabel = {v: i for i, v in enumerate(nodes)}
        edges = [
            (min(relabel[a], relabel[b]), max(relabel[a], relabel[b]),
             float(rng.uniform(0.5, 2.0)), 1.0)
            for a, b in G.edges if a in relabel and b in relabel
        ]
        edges.sort()
        s, t = 0, len(nodes) - 1
        Gr = nx.Graph()
        Gr.add_weighted_edges_from((a, b, w) for a, b, w, _ in edges)
        p_star = nx.dijkstra_path(Gr, s, t)
        inst = Instance(
            graph_path=None, source=s, target=t, p_star=p_star,
            node_count=len(nodes), edges=edges,
        )
        got = make_labels(inst, "competitive_path")
        np.testing.assert_array_equal(got, brute_competitive(inst))


def test_run_solver_reports_failure():
    with pytest.raises(DataError, match="failed"):
        run_solver(["attack", "--instance", "/nonexistent.json"])
