from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pydot
import pytest

from corpus import CORPUS
from cstar_graphs.bratteli import (
    COMPRESSED,
    ZERO,
    BratteliDiagram,
    cuntz_core_bratteli,
    to_dot,
    toeplitz_core_bratteli,
)
from cstar_graphs.fock_sim import FockSpace
from cstar_graphs.graph_core import bouquet, path_graph, vertex_matrix

GOLDEN = Path(__file__).parent / "golden"


def structure(d: BratteliDiagram):
    """Label-level view of a diagram: (levels, dims, edges) with tails split out."""
    core = [[n.label for n in level if not n.is_tail] for level in d.levels]
    dims = [[n.dim for n in level if not n.is_tail] for level in d.levels]
    tails = sorted([n, nd.label] for n, level in enumerate(d.levels) for nd in level if nd.is_tail)
    core_edges, tail_edges = [], []
    for e in d.edges:
        src, dst = d.levels[e.level][e.source], d.levels[e.level + 1][e.target]
        row = [e.level, src.label, dst.label]
        (tail_edges if dst.is_tail else core_edges).append(row)
    return core, dims, tails, sorted(core_edges), sorted(tail_edges)


@pytest.mark.parametrize("variant,name", [("compressed", "a4_compressed"), ("zero", "a4_zero")])
def test_a4_matches_golden(variant, name):
    gold = json.loads((GOLDEN / f"{name}.json").read_text())
    d = toeplitz_core_bratteli(path_graph(4), gold["depth"], variant)
    core, dims, tails, core_edges, tail_edges = structure(d)
    assert core == gold["core_levels"]
    assert dims == gold["core_dims"]
    assert core_edges == sorted(gold["core_edges"])
    assert tails == sorted(gold["tail_nodes"])
    assert tail_edges == sorted(gold["tail_edges"])
    assert len(tails) == gold["tail_node_count"]


def test_a4_cuntz_dims():
    d = cuntz_core_bratteli(path_graph(4), 3)
    assert [[n.dim for n in level] for level in d.levels] == [[1], [1], [1, 1], [2, 1]]


def test_bouquet_chain():
    d = cuntz_core_bratteli(bouquet(3), 4)
    assert [[n.dim for n in level] for level in d.levels] == [[1], [3], [9], [27], [81]]


def test_depth_zero():
    d = cuntz_core_bratteli(CORPUS["random2"], 0)
    assert d.node_count == 1 and d.levels[0][0].dim == 1


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_zero_depth_one_has_single_tail(name):
    d = toeplitz_core_bratteli(CORPUS[name], 1, "zero")
    assert sum(n.is_tail for n in d.levels[1]) == 1


@pytest.mark.parametrize("name", sorted(CORPUS))
@pytest.mark.parametrize("builder", ["cuntz", "compressed", "zero"])
def test_consistency(name, builder):
    g = CORPUS[name]
    d = cuntz_core_bratteli(g, 5) if builder == "cuntz" else toeplitz_core_bratteli(g, 5, builder)
    d.check_consistency()


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_zero_is_subdiagram_of_compressed(name):
    g = CORPUS[name]
    big = structure(toeplitz_core_bratteli(g, 4, "compressed"))
    small = structure(toeplitz_core_bratteli(g, 4, "zero"))
    assert small[0] == big[0] and small[1] == big[1]
    assert set(map(tuple, small[2])) <= set(map(tuple, big[2]))
    assert set(map(tuple, small[4])) <= set(map(tuple, big[4]))
    assert small[3] == big[3]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_dims_count_rooted_paths(name):
    g = CORPUS[name]
    depth = 3
    d = cuntz_core_bratteli(g, depth)
    space = FockSpace(g, depth)
    base = g.base_vertex
    # the double is symmetric, so paths ending at the base vertex count those leaving it
    for n, level in enumerate(d.levels):
        rooted = [p for p in space.paths if p.depth == n and p.end == base]
        assert sum(nd.dim for nd in level) == len(rooted)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_labels_respect_parity(name):
    g = CORPUS[name]
    b = vertex_matrix(g)
    d = cuntz_core_bratteli(g, 4)
    reach = np.zeros(len(g.vertices), dtype=np.int64)
    reach[g.index[g.base_vertex]] = 1
    for level in d.levels:
        assert {nd.label for nd in level} == {v for v in g.vertices if reach[g.index[v]]}
        reach = b.T @ reach


def _dot_counts(text: str) -> tuple[int, int]:
    (graph,) = pydot.graph_from_dot_data(text)
    names = set()

    def walk(gr):
        for node in gr.get_nodes():
            name = node.get_name()
            if name not in ("node", "edge", "graph"):
                names.add(name)
        for sub in gr.get_subgraphs():
            walk(sub)

    walk(graph)
    return len(names), len(graph.get_edges())


@pytest.mark.parametrize("variant", ["cuntz", "compressed", "zero"])
@pytest.mark.parametrize("name", ["A4", "bouquet2", "C5", "random1"])
def test_dot_round_trip(variant, name):
    g = CORPUS[name]
    d = cuntz_core_bratteli(g, 3) if variant == "cuntz" else toeplitz_core_bratteli(g, 3, variant)
    assert _dot_counts(to_dot(d)) == (d.node_count, len(d.edges))


def test_empty_dot():
    text = to_dot(BratteliDiagram((), (), ZERO))
    assert _dot_counts(text) == (0, 0)


def test_a4_zero_dot_has_two_chains():
    text = to_dot(toeplitz_core_bratteli(path_graph(4), 3, "zero"))
    assert text.count('[label="tail(') == 4
    assert {line.split('"')[1] for line in text.splitlines() if "tail(" in line and "->" not in line and "rank" not in line} == {
        "L1:tail(v0@0)",
        "L2:tail(v0@0)",
        "L3:tail(v0@0)",
        "L3:tail(v0@2)",
    }


def test_kinds():
    assert toeplitz_core_bratteli(path_graph(3), 2).kind == COMPRESSED
    with pytest.raises(ValueError):
        toeplitz_core_bratteli(path_graph(3), 2, "other")
