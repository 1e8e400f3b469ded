from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import CORPUS
from cstar_graphs.fock_sim import (
    BasisTooLarge,
    FockSpace,
    TruncationError,
    count_paths,
    edge_trace_moments,
    exactness_certificate,
    relation_checks,
    required_depth,
    trace_moments,
    trace_mu,
    vacuum_expectation,
)
from cstar_graphs.free_laws import EdgeLawParams, catalan, moment_recursion
from cstar_graphs.graph_core import bouquet, directify, from_edge_list, path_graph, perron_data


@pytest.mark.parametrize("n,depth", [(1, 3), (2, 4), (3, 3)])
def test_bouquet_basis_size(n, depth):
    assert len(FockSpace(bouquet(n), depth)) == sum(n**k for k in range(depth + 1))


def test_a2_basis():
    assert len(FockSpace(path_graph(2), 2)) == 6


def test_depth_zero_is_vacua():
    g = CORPUS["random0"]
    space = FockSpace(g, 0)
    assert len(space) == len(g.vertices)
    assert all(p.depth == 0 for p in space.paths)


def test_count_matches_enumeration():
    for g in CORPUS.values():
        assert count_paths(directify(g), 3) == len(FockSpace(g, 3))


def test_basis_cap(monkeypatch):
    with pytest.raises(BasisTooLarge) as info:
        FockSpace(bouquet(3), 6, cap=100)
    assert info.value.size == 1093
    monkeypatch.setenv("CSTAR_BASIS_CAP", "10")
    with pytest.raises(BasisTooLarge):
        FockSpace(bouquet(2), 3)


def test_creation_on_vacuum():
    space = FockSpace(path_graph(3), 2)
    s = space.creation("e0'").matrix
    vac = np.zeros(len(space))
    vac[space.vacuum["v1"]] = 1
    out = s @ vac
    (hit,) = np.flatnonzero(out)
    assert space.paths[hit].dedges == ("e0'",)


@pytest.mark.parametrize("name", ["A4", "bouquet3", "C4", "random3"])
def test_relation_suite(name):
    checks = relation_checks(FockSpace(CORPUS[name], 3))
    assert all(c.passed for c in checks), [c for c in checks if not c.passed]


def test_relation_suite_weighted():
    g = path_graph(4)
    g = g.with_weights(perron_data(g).weighting)
    checks = relation_checks(FockSpace(g, 4))
    assert all(c.passed for c in checks)
    assert any(c.name.startswith("self-adjoint") for c in checks)


def test_loop_second_moment():
    space = FockSpace(bouquet(1, 1.0), 4)
    t = space.semicircular_op("l1")
    assert len(space) == 5
    assert vacuum_expectation(t @ t)["o"] == 1.0


def test_edge_coefficients():
    g = from_edge_list(["a", "b"], [("a", "b")], {"a": 4.0, "b": 1.0})
    space = FockSpace(g, 2)
    assert space.edge_scale("e0'") == pytest.approx(math.sqrt(2))
    t = space.semicircular_op("e0").toarray()
    s = space.creation("e0'").toarray()
    mask = s != 0
    assert np.allclose(t[mask], math.sqrt(2))
    equal = FockSpace(g.with_weights({"a": 1.0, "b": 1.0}), 2)
    t1 = equal.semicircular_op("e0").toarray()
    assert set(np.unique(t1)) <= {0.0, 1.0}


def test_trace_of_projection():
    g = CORPUS["star3"]
    g = g.with_weights(perron_data(g).weighting)
    space = FockSpace(g, 2)
    for v in g.vertices:
        assert trace_mu(space.vertex_proj(v)) == g.weights[v]


@pytest.mark.parametrize("k", range(0, 6))
def test_loop_moments_are_catalan(k):
    space = FockSpace(bouquet(1, 2.0), k)
    moments = trace_moments(space, "l1", 2 * k + 1)
    assert moments[2 * k] == 2.0 * catalan(k)
    assert moments[2 * k + 1] == 0.0


def test_certificates():
    word = [("S*", "e"), ("S", "e")] * 3
    assert required_depth(word) == 1 and exactness_certificate(word, 1)
    for k in range(1, 6):
        t = [("T", "e")] * (2 * k)
        assert exactness_certificate(t, k)
        assert not exactness_certificate(t, k - 1)
        assert required_depth(t) == k


def test_refuses_uncertified_word():
    space = FockSpace(bouquet(1, 1.0), 1)
    with pytest.raises(TruncationError) as info:
        space.vacuum_moment([("T", "l1")] * 4)
    assert info.value.required == 2


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["S", "S*", "P", "T"]), max_size=8), st.integers(0, 2))
def test_certified_words_match_deeper_truncation(kinds, extra):
    """A certified vacuum value does not change when the depth grows."""
    ident = {"S": "l1", "S*": "l2", "P": "o", "T": "l1"}
    word = [(k, ident[k]) for k in kinds]
    need = required_depth(word)
    g = bouquet(2, 1.0)
    shallow = FockSpace(g, need).vacuum_moment(word)
    deep = FockSpace(g, need + extra + 1).vacuum_moment(word)
    assert shallow == deep


@pytest.mark.parametrize("a2", [1, 1.5, 2, 4])
def test_traciality_and_recursion(a2):
    g = from_edge_list(["a", "b"], [("a", "b")], {"a": float(a2) ** 2, "b": 1.0})
    n = 6
    space = FockSpace(g, n)
    fwd, bwd = edge_trace_moments(space, "e0'", n)
    rec = moment_recursion(EdgeLawParams(a2), n)
    assert fwd == pytest.approx([float(x) for x in rec.forward], rel=1e-9)
    assert bwd == pytest.approx([float(x) for x in rec.backward], rel=1e-9)
    # Tr((T* T)^n) = Tr((T T*)^n) for n >= 1; at n = 0 the two sides are the vertex masses
    assert [1.0 * f for f in fwd[1:]] == pytest.approx([g.weights["a"] * b for b in bwd[1:]], rel=1e-10)
