"""Weighted undirected graphs, their directed doubles, and Perron data.

A finite undirected multigraph with a positive vertex weighting is the input
object for everything else in the package.  Its *directed double* keeps every
loop as a single self-paired directed edge and splits every other edge into a
pair of opposite directed edges exchanged by the ``op`` involution.

Loops are counted once in the vertex multiplicity matrix and in the weighted
degree ``a_mu``, matching the single directed edge a loop receives in the
double.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

PERRON_TOL = 1e-13
PERRON_RESIDUAL_TOL = 1e-11
PERRON_MAX_ITER = 100_000


class GraphValidationError(ValueError):
    """Raised for malformed graph input; the message names the offending id."""


class DisconnectedGraphError(ValueError):
    pass


@dataclass(frozen=True)
class Edge:
    id: str
    ends: tuple[str, str]

    @property
    def is_loop(self) -> bool:
        return self.ends[0] == self.ends[1]


@dataclass(frozen=True, eq=False)
class WeightedUndirectedGraph:
    """Finite undirected multigraph with an optional positive vertex weighting.

    ``weights`` may be ``None`` for an unweighted graph; weight-dependent
    operations then need a weighting from :func:`perron_data` or the caller.
    ``base_vertex`` defaults to the first declared vertex.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    weights: Mapping[str, float] | None = None
    base_vertex: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(
            self, "edges", tuple(e if isinstance(e, Edge) else Edge(*e) for e in self.edges)
        )
        seen = set()
        for v in self.vertices:
            if v in seen:
                raise GraphValidationError(f"duplicate vertex id {v!r}")
            seen.add(v)
        edge_ids = set()
        for e in self.edges:
            if e.id in edge_ids:
                raise GraphValidationError(f"duplicate edge id {e.id!r}")
            edge_ids.add(e.id)
            if len(e.ends) != 2:
                raise GraphValidationError(f"edge {e.id!r} must have exactly two endpoints")
            for end in e.ends:
                if end not in seen:
                    raise GraphValidationError(
                        f"edge {e.id!r} has undeclared endpoint {end!r}"
                    )
        if self.base_vertex is None:
            if self.vertices:
                object.__setattr__(self, "base_vertex", self.vertices[0])
        elif self.base_vertex not in seen:
            raise GraphValidationError(f"base vertex {self.base_vertex!r} is not declared")
        if self.weights is not None:
            w = dict(self.weights)
            for v in self.vertices:
                if v not in w:
                    raise GraphValidationError(f"vertex {v!r} has no weight")
                if not w[v] > 0:
                    raise GraphValidationError(f"vertex {v!r} has non-positive weight {w[v]!r}")
            extra = set(w) - seen
            if extra:
                raise GraphValidationError(f"weight given for undeclared vertex {sorted(extra)[0]!r}")
            object.__setattr__(self, "weights", w)

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def edge(self) -> dict[str, Edge]:
        return {e.id: e for e in self.edges}

    def with_weights(self, weights: Mapping[str, float]) -> "WeightedUndirectedGraph":
        return WeightedUndirectedGraph(self.vertices, self.edges, dict(weights), self.base_vertex)

    def require_weights(self) -> dict[str, float]:
        if self.weights is None:
            raise GraphValidationError("operation needs a vertex weighting but the graph has none")
        return self.weights


@dataclass(frozen=True)
class DirectedEdge:
    id: str
    source: str
    target: str
    op: str
    origin: str


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    vertices: tuple[str, ...]
    dedges: tuple[DirectedEdge, ...]
    base_vertex: str | None = None
    _by_id: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_id.update({d.id: d for d in self.dedges})

    def __getitem__(self, dedge_id: str) -> DirectedEdge:
        try:
            return self._by_id[dedge_id]
        except KeyError:
            raise KeyError(f"unknown directed edge {dedge_id!r}") from None

    def __contains__(self, dedge_id: str) -> bool:
        return dedge_id in self._by_id

    def out_edges(self, vertex: str) -> list[DirectedEdge]:
        return [d for d in self.dedges if d.source == vertex]

    def pair(self, edge_id: str) -> tuple[DirectedEdge, DirectedEdge]:
        """The two directed edges coming from an undirected edge (equal for a loop)."""
        found = [d for d in self.dedges if d.origin == edge_id]
        if not found:
            raise KeyError(f"unknown edge {edge_id!r}")
        if len(found) == 1:
            return found[0], found[0]
        return found[0], found[1]


def dedge_ids(edge: Edge) -> tuple[str, str]:
    """Ids of the directed edges made from ``edge``: ``e'`` runs ends[0] -> ends[1]."""
    if edge.is_loop:
        return edge.id, edge.id
    return f"{edge.id}'", f"{edge.id}''"


def directify(g: WeightedUndirectedGraph) -> DirectedGraph:
    dedges = []
    for e in g.edges:
        if e.is_loop:
            dedges.append(DirectedEdge(e.id, e.ends[0], e.ends[0], e.id, e.id))
        else:
            fwd, bwd = dedge_ids(e)
            alpha, beta = e.ends
            dedges.append(DirectedEdge(fwd, alpha, beta, bwd, e.id))
            dedges.append(DirectedEdge(bwd, beta, alpha, fwd, e.id))
    return DirectedGraph(g.vertices, tuple(dedges), g.base_vertex)


def undirect(d: DirectedGraph) -> WeightedUndirectedGraph:
    """Merge op-pairs back into undirected edges (inverse of :func:`directify`)."""
    edges = []
    done = set()
    for de in d.dedges:
        if de.origin in done:
            continue
        done.add(de.origin)
        edges.append(Edge(de.origin, (de.source, de.target)))
    return WeightedUndirectedGraph(d.vertices, tuple(edges), None, d.base_vertex)


def _as_directed(g) -> DirectedGraph:
    return g if isinstance(g, DirectedGraph) else directify(g)


def vertex_matrix(g) -> np.ndarray:
    """B(alpha, beta) = number of directed edges alpha -> beta in the double."""
    d = _as_directed(g)
    idx = {v: i for i, v in enumerate(d.vertices)}
    b = np.zeros((len(d.vertices), len(d.vertices)), dtype=np.int64)
    for de in d.dedges:
        b[idx[de.source], idx[de.target]] += 1
    return b


def edge_matrix(g) -> np.ndarray:
    """A(e, f) = 1 when t(e) = s(f), indexed by directed edges in declared order."""
    d = _as_directed(g)
    t = np.array([de.target for de in d.dedges], dtype=object)
    s = np.array([de.source for de in d.dedges], dtype=object)
    if not len(d.dedges):
        return np.zeros((0, 0), dtype=np.int64)
    return (t[:, None] == s[None, :]).astype(np.int64)


def multiplicity_matrix(g: WeightedUndirectedGraph) -> np.ndarray:
    """N(p, q) = number of undirected edges between p and q, loops counted once."""
    idx = g.index
    n = np.zeros((len(g.vertices),) * 2, dtype=np.int64)
    for e in g.edges:
        i, j = idx[e.ends[0]], idx[e.ends[1]]
        n[i, j] += 1
        if i != j:
            n[j, i] += 1
    return n


def is_connected(g: WeightedUndirectedGraph) -> bool:
    if not g.vertices:
        return False
    ncomp, _ = connected_components(multiplicity_matrix(g), directed=False)
    return ncomp == 1


@dataclass(frozen=True)
class GraphClassification:
    connected: bool
    locally_finite: bool
    strongly_connected_double: bool
    edge_matrix_is_permutation: bool
    # one of "none", "single_loop", "A2", "edgeless"
    excluded_case: str


def validate(g: WeightedUndirectedGraph) -> GraphClassification:
    d = directify(g)
    b = vertex_matrix(d)
    if len(g.vertices):
        ncomp, _ = connected_components(b, directed=True, connection="strong")
        strong = ncomp == 1
    else:
        strong = False
    a = edge_matrix(d)
    perm = bool(np.all(a.sum(axis=0) == 1) and np.all(a.sum(axis=1) == 1))
    loops = [e for e in g.edges if e.is_loop]
    if len(g.vertices) == 1 and len(g.edges) == 1 and loops:
        excluded = "single_loop"
    elif len(g.vertices) == 2 and len(g.edges) == 1 and not loops:
        excluded = "A2"
    elif not g.edges:
        excluded = "edgeless"
    else:
        excluded = "none"
    return GraphClassification(
        connected=is_connected(g),
        locally_finite=True,
        strongly_connected_double=strong,
        edge_matrix_is_permutation=perm,
        excluded_case=excluded,
    )


@dataclass(frozen=True)
class PerronData:
    eigenvalue: float
    weighting: dict[str, float]
    iterations: int = 0


def perron_data(g: WeightedUndirectedGraph) -> PerronData:
    """Perron eigenvalue and eigenvector of the multiplicity matrix, normalized at the base vertex.

    Power iteration on ``N + I``: the shift makes the Perron root strictly
    dominant even for bipartite graphs, where ``-lambda`` is also an
    eigenvalue of ``N``.  Starts from the all-ones vector.
    """
    if not is_connected(g):
        raise DisconnectedGraphError("Perron weighting needs a connected graph")
    n = multiplicity_matrix(g).astype(float)
    shifted = n + np.eye(len(n))
    v = np.ones(len(n))
    v /= np.linalg.norm(v)
    rho_prev = np.inf
    best, stalled = np.inf, 0
    for it in range(1, PERRON_MAX_ITER + 1):
        w = shifted @ v
        v_new = w / np.linalg.norm(w)
        rho = float(v_new @ n @ v_new)
        resid = float(np.max(np.abs(n @ v_new - rho * v_new)))
        v = v_new
        if abs(rho - rho_prev) <= PERRON_TOL:
            # residual at rounding level, or no longer improving
            if resid <= 1e-14 * (rho + 1.0):
                break
            stalled = stalled + 1 if resid >= best else 0
            if stalled >= 20 and resid <= PERRON_RESIDUAL_TOL * (rho + 1.0):
                break
        best = min(best, resid)
        rho_prev = rho
    else:
        raise ArithmeticError(f"power iteration did not converge in {PERRON_MAX_ITER} steps")
    star = g.index[g.base_vertex]
    v = v / v[star]
    return PerronData(rho, {x: float(v[i]) for i, x in enumerate(g.vertices)}, it)


def weighted_degree(g: WeightedUndirectedGraph, weights: Mapping[str, float]) -> dict[str, float]:
    """a_mu(alpha) = sum over neighbours of n(alpha, beta) * mu(beta), loops counted once."""
    n = multiplicity_matrix(g)
    mu = np.array([weights[v] for v in g.vertices], dtype=object)
    deg = n.astype(object) @ mu if len(mu) else []
    return {v: deg[i] for i, v in enumerate(g.vertices)}


@dataclass(frozen=True)
class StructureSet:
    a_mu: dict[str, float]
    A_set: frozenset[str]


def structure_set(g: WeightedUndirectedGraph, weights: Mapping[str, float] | None = None) -> StructureSet:
    """Weighted degrees and the set of vertices heavier than their weighted degree."""
    weights = g.require_weights() if weights is None else weights
    a_mu = weighted_degree(g, weights)
    return StructureSet(a_mu, frozenset(v for v in g.vertices if weights[v] > a_mu[v]))


# ---------------------------------------------------------------- constructors


def bouquet(n: int, weight: float | None = None) -> WeightedUndirectedGraph:
    edges = tuple(Edge(f"l{i + 1}", ("o", "o")) for i in range(n))
    return WeightedUndirectedGraph(("o",), edges, None if weight is None else {"o": weight})


def path_graph(n: int) -> WeightedUndirectedGraph:
    """The Coxeter-Dynkin diagram A_n: vertices v0..v(n-1), base vertex v0."""
    verts = tuple(f"v{i}" for i in range(n))
    edges = tuple(Edge(f"e{i}", (verts[i], verts[i + 1])) for i in range(n - 1))
    return WeightedUndirectedGraph(verts, edges)


def cycle_graph(n: int) -> WeightedUndirectedGraph:
    verts = tuple(f"v{i}" for i in range(n))
    edges = tuple(Edge(f"e{i}", (verts[i], verts[(i + 1) % n])) for i in range(n))
    return WeightedUndirectedGraph(verts, edges)


def from_edge_list(
    vertices: Sequence[str], pairs: Sequence[tuple[str, str]], weights: Mapping[str, float] | None = None
) -> WeightedUndirectedGraph:
    edges = tuple(Edge(f"e{i}", (a, b)) for i, (a, b) in enumerate(pairs))
    return WeightedUndirectedGraph(tuple(vertices), edges, weights)
