from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import CORPUS, random_multigraph
from cstar_graphs.graph_core import (
    DisconnectedGraphError,
    Edge,
    GraphValidationError,
    WeightedUndirectedGraph,
    bouquet,
    directify,
    edge_matrix,
    from_edge_list,
    multiplicity_matrix,
    path_graph,
    perron_data,
    structure_set,
    undirect,
    validate,
    vertex_matrix,
)


def test_loop_gives_single_self_op_dedge():
    d = directify(bouquet(1))
    (de,) = d.dedges
    assert (de.source, de.target, de.op) == ("o", "o", de.id)


def test_edge_gives_op_pair():
    d = directify(from_edge_list(["a", "b"], [("a", "b")]))
    fwd, bwd = d.dedges
    assert (fwd.source, fwd.target) == ("a", "b")
    assert (bwd.source, bwd.target) == ("b", "a")
    assert fwd.op == bwd.id and bwd.op == fwd.id


def test_bouquet_matrices():
    g = bouquet(3)
    assert vertex_matrix(g).tolist() == [[3]]
    assert edge_matrix(g).tolist() == [[1] * 3] * 3


def test_path_vertex_matrix():
    assert vertex_matrix(path_graph(3)).tolist() == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]


def test_a2_edge_matrix_is_permutation():
    g = path_graph(2)
    assert edge_matrix(g).tolist() == [[0, 1], [1, 0]]
    cls = validate(g)
    assert cls.excluded_case == "A2" and cls.edge_matrix_is_permutation


def test_validate_cases():
    assert validate(bouquet(1)).excluded_case == "single_loop"
    cls = validate(path_graph(4))
    assert cls.excluded_case == "none"
    assert cls.strongly_connected_double
    assert not cls.edge_matrix_is_permutation


def test_rejects_bad_graphs():
    with pytest.raises(GraphValidationError):
        WeightedUndirectedGraph(("a",), (Edge("e", ("a", "b")),))
    with pytest.raises(GraphValidationError):
        WeightedUndirectedGraph(("a", "a"), ())
    with pytest.raises(GraphValidationError):
        WeightedUndirectedGraph(("a",), (), {"a": 0.0})


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_undirect_inverts_directify(name):
    g = CORPUS[name]
    back = undirect(directify(g))
    assert back.vertices == g.vertices
    assert [(e.id, e.ends) for e in back.edges] == [(e.id, e.ends) for e in g.edges]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_matrix_row_sums(name):
    d = directify(CORPUS[name])
    a, b = edge_matrix(d), vertex_matrix(d)
    outdeg = {v: len(d.out_edges(v)) for v in d.vertices}
    for i, de in enumerate(d.dedges):
        assert a[i].sum() == outdeg[de.target]
    for i, v in enumerate(d.vertices):
        assert b[i].sum() == outdeg[v]


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_vertex_matrix_equals_multiplicity(name):
    g = CORPUS[name]
    assert np.array_equal(vertex_matrix(g), multiplicity_matrix(g))


@pytest.mark.parametrize("n", range(1, 7))
def test_bouquet_perron(n):
    p = perron_data(bouquet(n))
    assert p.eigenvalue == pytest.approx(n, rel=1e-13)
    assert p.weighting == {"o": 1.0}


def test_a3_perron():
    p = perron_data(path_graph(3))
    assert p.eigenvalue == pytest.approx(math.sqrt(2), abs=1e-13)
    assert [p.weighting[v] for v in ("v0", "v1", "v2")] == pytest.approx([1, math.sqrt(2), 1], abs=1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_path_perron_is_coxeter_value(n):
    assert perron_data(path_graph(n)).eigenvalue == pytest.approx(2 * math.cos(math.pi / (n + 1)), abs=1e-13)


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_perron_residual_and_spectral_radius(name):
    g = CORPUS[name]
    p = perron_data(g)
    n = multiplicity_matrix(g)
    mu = np.array([p.weighting[v] for v in g.vertices])
    assert np.all(np.abs(p.eigenvalue * mu - n @ mu) <= 1e-10 * p.eigenvalue * mu)
    radius = max(abs(np.linalg.eigvalsh(n.astype(float))))
    assert p.eigenvalue == pytest.approx(radius, rel=1e-10)
    assert p.weighting[g.base_vertex] == 1.0
    if validate(g).excluded_case == "none":
        assert p.eigenvalue > 1


def test_perron_needs_connected():
    with pytest.raises(DisconnectedGraphError):
        perron_data(from_edge_list(["a", "b"], []))


def test_structure_set_examples():
    g = from_edge_list(["alpha", "beta"], [("alpha", "beta")])
    ss = structure_set(g, {"alpha": 4, "beta": 1})
    assert ss.a_mu == {"alpha": 1, "beta": 4}
    assert ss.A_set == {"alpha"}
    for n in range(1, 6):
        ss = structure_set(bouquet(n), {"o": 1})
        assert ss.a_mu == {"o": n} and not ss.A_set


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_perron_weighting_has_empty_structure_set(name):
    g = CORPUS[name]
    assert structure_set(g, perron_data(g).weighting).A_set == frozenset()


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_random_perron_vector_positive(seed):
    g = random_multigraph(seed)
    p = perron_data(g)
    assert all(w > 0 for w in p.weighting.values())
