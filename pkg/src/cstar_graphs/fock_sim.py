"""Truncated path Fock space of a directed double and its operators.

Basis vectors are the composable paths ``e1 e2 ... en`` (``t(ei) = s(ei+1)``)
of depth at most ``N``, plus one vacuum vector ``p_alpha`` per vertex.  The
inner product is diagonal with ``<p|p> = mu(t(p))``, where ``t`` of a vacuum
is its vertex.

Creation ``S_e`` prepends ``e`` to paths starting at ``t(e)``; anything
pushed past depth ``N`` is dropped.  Every statement made on the truncated
space is therefore either restricted to the interior (depth < N) or to words
certified by :func:`exactness_certificate`.
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
import scipy.sparse as sp

from .graph_core import DirectedGraph, WeightedUndirectedGraph, directify

DEFAULT_BASIS_CAP = 5_000_000


class BasisTooLarge(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"Fock basis would have {size} paths, above the cap of {cap}")
        self.size = size
        self.cap = cap


class TruncationError(ValueError):
    """The requested word is not certified at this depth."""

    def __init__(self, required: int, depth: int):
        super().__init__(f"word needs depth {required}, space is truncated at {depth}")
        self.required = required
        self.depth = depth


class Path(NamedTuple):
    start: str
    dedges: tuple[str, ...]
    end: str

    @property
    def depth(self) -> int:
        return len(self.dedges)


def basis_cap() -> int:
    return int(os.environ.get("CSTAR_BASIS_CAP", DEFAULT_BASIS_CAP))


def count_paths(d: DirectedGraph, depth: int) -> int:
    """Number of basis paths of depth <= ``depth`` (exact, no enumeration)."""
    idx = {v: i for i, v in enumerate(d.vertices)}
    n = len(d.vertices)
    ending = [1] * n  # paths of the current length, by start vertex
    total = n
    for _ in range(depth):
        nxt = [0] * n
        for de in d.dedges:
            nxt[idx[de.source]] += ending[idx[de.target]]
        ending = nxt
        total += sum(ending)
    return total


class FockSpace:
    """Basis of the truncated Fock space with operator constructors."""

    def __init__(
        self,
        graph: DirectedGraph | WeightedUndirectedGraph,
        depth: int,
        weights: Mapping[str, float] | None = None,
        cap: int | None = None,
    ):
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if isinstance(graph, WeightedUndirectedGraph):
            self.undirected = graph
            if weights is None:
                weights = graph.weights
            graph = directify(graph)
        else:
            self.undirected = None
        self.graph = graph
        self.depth = depth
        self.weights = None if weights is None else dict(weights)
        cap = basis_cap() if cap is None else cap
        size = count_paths(graph, depth)
        if size > cap:
            raise BasisTooLarge(size, cap)

        by_start: dict[str, list] = {}
        for de in graph.dedges:
            by_start.setdefault(de.target, []).append(de)
        level = [Path(v, (), v) for v in graph.vertices]
        paths = list(level)
        for _ in range(depth):
            nxt = [Path(de.source, (de.id,) + p.dedges, p.end) for p in level for de in by_start.get(p.start, ())]
            nxt.sort(key=lambda p: p.dedges)
            paths.extend(nxt)
            level = nxt
        self.paths: list[Path] = paths
        self.index = {p: i for i, p in enumerate(paths)}
        self.depths = np.array([p.depth for p in paths])
        self.vacuum = {v: i for i, v in enumerate(graph.vertices)}

    def __len__(self) -> int:
        return len(self.paths)

    # -- inner product -------------------------------------------------------

    @property
    def gram(self) -> np.ndarray:
        """Diagonal of the weighted inner product, ``mu(t(p))`` per basis path."""
        if self.weights is None:
            return np.ones(len(self))
        return np.array([self.weights[p.end] for p in self.paths], dtype=float)

    def interior(self) -> sp.csr_matrix:
        """Projection onto paths of depth < N."""
        return sp.diags((self.depths < self.depth).astype(float), format="csr")

    # -- generators ----------------------------------------------------------

    def creation(self, dedge_id: str) -> "SparseOperator":
        de = self.graph[dedge_id]
        rows, cols = [], []
        for j, p in enumerate(self.paths):
            if p.depth < self.depth and p.start == de.target:
                rows.append(self.index[Path(de.source, (de.id,) + p.dedges, p.end)])
                cols.append(j)
        return self._op(rows, cols, np.ones(len(rows)), grade=1)

    def annihilation(self, dedge_id: str) -> "SparseOperator":
        return self.creation(dedge_id).adjoint()

    def vertex_proj(self, vertex: str) -> "SparseOperator":
        if vertex not in self.vacuum:
            raise KeyError(f"unknown vertex {vertex!r}")
        idx = [i for i, p in enumerate(self.paths) if p.start == vertex]
        return self._op(idx, idx, np.ones(len(idx)), grade=0)

    def vacuum_proj(self, vertex: str) -> "SparseOperator":
        """Rank-one projection onto the vacuum vector at ``vertex``."""
        i = self.vacuum[vertex]
        return self._op([i], [i], [1.0], grade=0)

    def number_op(self) -> "SparseOperator":
        n = len(self)
        return self._op(range(n), range(n), self.depths.astype(float), grade=0)

    def identity(self) -> "SparseOperator":
        n = len(self)
        return self._op(range(n), range(n), np.ones(n), grade=0)

    def semicircular_op(self, edge_id: str) -> "SparseOperator":
        """The self-adjoint edge operator T_e of the free graph algebra.

        Loop: ``S_e + S_e*``.  Otherwise, with ``e'`` running from ``alpha``
        to ``beta`` and ``a = (mu(alpha)/mu(beta))**0.25``:
        ``a S_e' + a^-1 S_e''* + a^-1 S_e'' + a S_e'*``.
        """
        fwd, bwd = self.graph.pair(edge_id)
        if fwd.id == bwd.id:
            s = self.creation(fwd.id)
            return s + s.adjoint()
        a = self.edge_scale(fwd.id)
        t_fwd = a * self.creation(fwd.id) + (1 / a) * self.creation(bwd.id).adjoint()
        return t_fwd + t_fwd.adjoint()

    def edge_scale(self, dedge_id: str) -> float:
        if self.weights is None:
            raise ValueError("edge operators need a vertex weighting")
        de = self.graph[dedge_id]
        return (self.weights[de.source] / self.weights[de.target]) ** 0.25

    def half_edge_op(self, dedge_id: str) -> "SparseOperator":
        """``T_{e'} = a S_{e'} + a^-1 S_{e''}*``; its adjoint is ``T_{e''}``."""
        de = self.graph[dedge_id]
        a = self.edge_scale(de.id)
        return a * self.creation(de.id) + (1 / a) * self.creation(de.op).adjoint()

    def _op(self, rows, cols, vals, grade=None) -> "SparseOperator":
        n = len(self)
        m = sp.coo_matrix((np.asarray(vals, dtype=float), (np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))), shape=(n, n))
        return SparseOperator(m.tocsr(), self, grade)

    # -- evaluation ----------------------------------------------------------

    def letter(self, letter: tuple[str, str]) -> "SparseOperator":
        kind, ident = letter
        if kind == "S":
            return self.creation(ident)
        if kind == "S*":
            return self.annihilation(ident)
        if kind == "P":
            return self.vertex_proj(ident)
        if kind == "T":
            return self.semicircular_op(ident)
        raise ValueError(f"unknown generator kind {kind!r}")

    def word_operator(self, letters: Sequence[tuple[str, str]]) -> "SparseOperator":
        op = self.identity()
        for letter in letters:
            op = op @ self.letter(letter)
        return op

    def vacuum_moment(self, letters: Sequence[tuple[str, str]]) -> dict[str, float]:
        """Vacuum expectation of a certified word; refuses uncertified ones."""
        need = required_depth(letters)
        if need > self.depth:
            raise TruncationError(need, self.depth)
        return vacuum_expectation(self.word_operator(letters))


@dataclass(frozen=True, eq=False)
class SparseOperator:
    matrix: sp.csr_matrix
    space: FockSpace
    grade: int | None = None

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        grade = None if self.grade is None or other.grade is None else self.grade + other.grade
        return SparseOperator((self.matrix @ other.matrix).tocsr(), self.space, grade)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        grade = self.grade if self.grade == other.grade else None
        return SparseOperator((self.matrix + other.matrix).tocsr(), self.space, grade)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return self + (-1.0) * other

    def __rmul__(self, scalar: float) -> "SparseOperator":
        return SparseOperator((scalar * self.matrix).tocsr(), self.space, self.grade)

    def __pow__(self, n: int) -> "SparseOperator":
        out = self.space.identity()
        for _ in range(n):
            out = out @ self
        return out

    def adjoint(self) -> "SparseOperator":
        """Adjoint for the weighted inner product: ``W^-1 M^T W``."""
        w = self.space.gram
        m = sp.diags(1 / w) @ self.matrix.T @ sp.diags(w)
        grade = None if self.grade is None else -self.grade
        return SparseOperator(m.tocsr(), self.space, grade)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_abs(self) -> float:
        m = self.matrix
        return float(abs(m).max()) if m.nnz else 0.0


def vacuum_expectation(x: SparseOperator) -> dict[str, float]:
    """Coefficient of ``p_alpha`` in ``x p_alpha``, per vertex."""
    m = x.matrix
    return {v: float(m[i, i]) for v, i in x.space.vacuum.items()}


def trace_mu(x: SparseOperator) -> float:
    w = x.space.weights
    if w is None:
        raise ValueError("trace needs a vertex weighting")
    return sum(w[v] * c for v, c in vacuum_expectation(x).items())


# ---------------------------------------------------------------- certificates

# depth change of each letter read as creation (up) or annihilation (down); T can do either
_UP = {"S": 1, "S*": -1, "P": 0, "T": 1}
_DOWN = {"S": -1, "S*": 1, "P": 0, "T": 1}


def required_depth(letters: Sequence[tuple[str, str]]) -> int:
    """Smallest depth at which the vacuum expectation of the word is exact.

    Letters act right to left on a vacuum.  ``up[j]`` bounds the depth
    reached after the suffix ``letters[j:]``; ``down[j]`` bounds the depth
    from which the prefix ``letters[:j]`` can still return to the vacuum.
    A contributing path never goes deeper than ``min(up[j], down[j])``, so
    truncation is exact when that never exceeds the depth cap.
    """
    n = len(letters)
    up = [0] * (n + 1)
    level = 0
    for j in range(n - 1, -1, -1):
        level = max(0, level + _UP[letters[j][0]])
        up[j] = level
    down = [0] * (n + 1)
    level = 0
    for j in range(n):
        level = max(0, level + _DOWN[letters[j][0]])
        down[j + 1] = level
    return max(min(u, d) for u, d in zip(up, down))


def exactness_certificate(letters: Sequence[tuple[str, str]], depth: int) -> bool:
    return required_depth(letters) <= depth


# ---------------------------------------------------------------- relations


@dataclass(frozen=True)
class RelationCheck:
    name: str
    passed: bool
    max_residual: float

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "max_residual": self.max_residual}


def _check(name: str, residual: float, tol: float) -> RelationCheck:
    return RelationCheck(name, residual <= tol, residual)


def relation_checks(space: FockSpace, tol: float = 0.0) -> list[RelationCheck]:
    """Toeplitz-Cuntz-Krieger relations and operator sanity checks.

    ``tol`` is 0 for unweighted spaces (0/1 matrices, exact); weighted spaces
    use 1e-12 for the edge operators, whose coefficients are fourth roots.
    """
    g = space.graph
    s = {de.id: space.creation(de.id) for de in g.dedges}
    s_star = {k: v.adjoint() for k, v in s.items()}
    interior = space.interior()
    checks = []

    worst = 0.0
    for e in g.dedges:
        p_t = space.vertex_proj(e.target).matrix
        for f in g.dedges:
            lhs = s_star[f.id].matrix @ s[e.id].matrix
            rhs = p_t if e.id == f.id else sp.csr_matrix(lhs.shape)
            diff = (lhs - rhs) @ interior
            worst = max(worst, float(abs(diff).max()) if diff.nnz else 0.0)
    checks.append(_check("isometry: S_f* S_e = delta(e,f) p_t(e) on depth < N", worst, tol))

    worst = 0.0
    for v in g.vertices:
        acc = sp.csr_matrix((len(space), len(space)))
        for e in g.out_edges(v):
            acc = acc + s[e.id].matrix @ s_star[e.id].matrix
        diff = acc - (space.vertex_proj(v).matrix - space.vacuum_proj(v).matrix)
        worst = max(worst, float(abs(diff).max()) if diff.nnz else 0.0)
    checks.append(_check("defect: sum S_e S_e* = p_v - |p_v><p_v|", worst, tol))

    worst = 0.0
    w = space.gram
    for e in g.dedges:
        # <S x, y> = <x, S* y> on the full basis: W S - (W S*)^T
        m = sp.diags(w) @ s[e.id].matrix - (sp.diags(w) @ s_star[e.id].matrix).T
        worst = max(worst, float(abs(m).max()) if m.nnz else 0.0)
    checks.append(_check("adjoint: <S x, y> = <x, S* y>", worst, tol))

    worst = 0.0
    n_op = space.number_op().matrix
    for e in g.dedges:
        comm = n_op @ s[e.id].matrix - s[e.id].matrix @ n_op - s[e.id].matrix
        worst = max(worst, float(abs(comm).max()) if comm.nnz else 0.0)
    checks.append(_check("gauge: [N, S_e] = S_e", worst, tol))

    worst = 0.0
    proj_sum = sp.csr_matrix((len(space), len(space)))
    for v in g.vertices:
        p_v = space.vertex_proj(v).matrix
        proj_sum = proj_sum + p_v
        for e in g.dedges:
            lhs = p_v @ s[e.id].matrix
            diff = lhs - s[e.id].matrix if e.source == v else lhs
            worst = max(worst, float(abs(diff).max()) if diff.nnz else 0.0)
    diff = proj_sum - sp.identity(len(space), format="csr")
    worst = max(worst, float(abs(diff).max()) if diff.nnz else 0.0)
    checks.append(_check("projections: p_v S_e = delta(v, s(e)) S_e, sum p_v = 1", worst, tol))

    if space.weights is not None and space.undirected is not None:
        worst = 0.0
        for edge in space.undirected.edges:
            t = space.semicircular_op(edge.id)
            worst = max(worst, (t - t.adjoint()).max_abs())
        checks.append(_check("self-adjoint: T_e = T_e*", worst, max(tol, 1e-12)))
    return checks


# ---------------------------------------------------------------- moments


def edge_trace_moments(space: FockSpace, dedge_id: str, n_max: int) -> tuple[list[float], list[float]]:
    """Normalized moments of ``T_{e'}* T_{e'}`` at t(e') and ``T_{e''}* T_{e''}`` at s(e').

    Returns the coefficients of ``p_beta`` in ``(T_{e'}* T_{e'})^n`` and of
    ``p_alpha`` in ``(T_{e''}* T_{e''})^n`` for ``n = 0..n_max``.  Each word
    has ``n`` creations at most in flight, so ``n_max <= depth`` is required.
    """
    if n_max > space.depth:
        raise TruncationError(n_max, space.depth)
    de = space.graph[dedge_id]
    t_fwd = space.half_edge_op(de.id)
    t_bwd = t_fwd.adjoint()
    fwd_sq = t_fwd.adjoint() @ t_fwd
    bwd_sq = t_bwd.adjoint() @ t_bwd
    fwd, bwd = [], []
    pf = pb = space.identity()
    for n in range(n_max + 1):
        fwd.append(vacuum_expectation(pf)[de.target])
        bwd.append(vacuum_expectation(pb)[de.source])
        pf, pb = pf @ fwd_sq, pb @ bwd_sq
    return fwd, bwd


def trace_moments(space: FockSpace, edge_id: str, n_max: int) -> list[float]:
    """``Tr_mu(T_e^n)`` for ``n = 0..n_max``; needs ``depth >= n_max // 2``."""
    if n_max // 2 > space.depth:
        raise TruncationError(n_max // 2, space.depth)
    t = space.semicircular_op(edge_id)
    out = []
    p = space.identity()
    for _ in range(n_max + 1):
        out.append(trace_mu(p))
        p = p @ t
    return out


def iter_generators(space: FockSpace) -> Iterable[tuple[str, str]]:
    for de in space.graph.dedges:
        yield ("S", de.id)
        yield ("S*", de.id)
    for v in space.graph.vertices:
        yield ("P", v)
