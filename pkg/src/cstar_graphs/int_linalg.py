"""Smith normal form over the integers and K-theory of graph algebras.

Matrices are numpy arrays of ``dtype=object`` holding Python ints, so every
step is exact regardless of entry size.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graph_core import WeightedUndirectedGraph, directify, edge_matrix, validate, vertex_matrix


class ExcludedGraphWarning(UserWarning):
    """The graph lies outside the hypotheses of the Cuntz-Krieger K-theory formula."""


def as_int_matrix(m) -> np.ndarray:
    arr = np.array(m, dtype=object)
    if arr.ndim != 2:
        arr = arr.reshape((arr.shape[0] if arr.ndim else 0, -1))
    return np.vectorize(int, otypes=[object])(arr) if arr.size else arr.astype(object)


def identity(n: int) -> np.ndarray:
    eye = np.zeros((n, n), dtype=object)
    for i in range(n):
        eye[i, i] = 1
    return eye


def determinant(m) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    a = [list(row) for row in as_int_matrix(m)]
    n = len(a)
    if n == 0:
        return 1
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithForm:
    d: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @property
    def diagonal(self) -> list[int]:
        return [self.d[i, i] for i in range(min(self.d.shape))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def _pivot(a: np.ndarray, t: int):
    best = None
    rows, cols = a.shape
    for i in range(t, rows):
        for j in range(t, cols):
            x = a[i, j]
            if x != 0 and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
    return best


def smith_normal_form(m) -> SmithForm:
    """Return ``(d, u, v)`` with ``u @ m @ v == d`` and ``u``, ``v`` unimodular.

    Pivot rule: the smallest nonzero absolute value in the remaining block,
    ties broken row-major.  The diagonal of ``d`` is nonnegative and forms a
    divisibility chain, with zeros last.
    """
    m = as_int_matrix(m)
    a = m.copy()
    rows, cols = a.shape
    u, v = identity(rows), identity(cols)
    for t in range(min(rows, cols)):
        while True:
            piv = _pivot(a, t)
            if piv is None:
                break
            _, i, j = piv
            if i != t:
                a[[t, i]] = a[[i, t]]
                u[[t, i]] = u[[i, t]]
            if j != t:
                a[:, [t, j]] = a[:, [j, t]]
                v[:, [t, j]] = v[:, [j, t]]
            p = a[t, t]
            clean = True
            for i in range(t + 1, rows):
                q = a[i, t] // p
                if q:
                    a[i] -= q * a[t]
                    u[i] -= q * u[t]
                clean &= a[i, t] == 0
            for j in range(t + 1, cols):
                q = a[t, j] // p
                if q:
                    a[:, j] -= q * a[:, t]
                    v[:, j] -= q * v[:, t]
                clean &= a[t, j] == 0
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i, j] % p),
                None,
            )
            if bad is None:
                break
            a[t] += a[bad]
            u[t] += u[bad]
        if piv is None:
            break
        if a[t, t] < 0:
            a[t] = -a[t]
            u[t] = -u[t]

    if not np.array_equal(u.dot(m).dot(v), a):
        raise ArithmeticError("Smith normal form verification failed: u m v != d")
    if abs(determinant(u)) != 1 or abs(determinant(v)) != 1:
        raise ArithmeticError("Smith normal form transforms are not unimodular")
    return SmithForm(a, u, v)


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank plus the cyclic groups Z/d for the invariant factors d."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if any(d < 2 for d in self.torsion):
            raise ValueError("invariant factors must be at least 2")
        for x, y in zip(self.torsion, self.torsion[1:]):
            if y % x:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisibility chain")

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def cokernel(m, snf: SmithForm | None = None) -> AbelianGroup:
    """Z^rows / image(m)."""
    snf = smith_normal_form(m) if snf is None else snf
    rows = snf.d.shape[0]
    return AbelianGroup(rows - snf.rank, tuple(x for x in snf.diagonal if x >= 2))


def kernel_rank(m, snf: SmithForm | None = None) -> int:
    snf = smith_normal_form(m) if snf is None else snf
    return snf.d.shape[1] - snf.rank


def coset_coordinates(snf: SmithForm, x) -> dict:
    """Coordinates of the class of ``x`` in the cokernel, in the SNF basis.

    ``torsion`` holds one residue per invariant factor (same order as the
    group's torsion list), ``free`` one integer per free summand.
    """
    y = snf.u.dot(np.array(x, dtype=object))
    diag = snf.diagonal
    torsion = [int(y[i] % d) for i, d in enumerate(diag) if d >= 2]
    free = [int(y[i]) for i in range(snf.rank, snf.d.shape[0])]
    return {"torsion": torsion, "free": free}


@dataclass(frozen=True)
class KTheory:
    k0: AbelianGroup
    k1: AbelianGroup
    unit_class: dict

    def to_json(self) -> dict:
        return {"k0": self.k0.to_json(), "k1": self.k1.to_json(), "unit_class": self.unit_class}


def _one_minus_transpose(b: np.ndarray) -> np.ndarray:
    return identity(len(b)) - as_int_matrix(b).T if len(b) else np.zeros((0, 0), dtype=object)


def k_theory_cuntz_krieger(g: WeightedUndirectedGraph) -> KTheory:
    """K_0 = coker(1 - B^T), K_1 = ker(1 - B^T) for the directed double.

    The edge-matrix presentation coker(1 - A^T) is computed as well and must
    agree; a mismatch is an internal error.
    """
    cls = validate(g)
    if cls.excluded_case != "none":
        warnings.warn(
            f"graph is the excluded case {cls.excluded_case!r}; K-groups are the formal cokernel/kernel",
            ExcludedGraphWarning,
            stacklevel=2,
        )
    d = directify(g)
    mb = _one_minus_transpose(vertex_matrix(d))
    snf_b = smith_normal_form(mb)
    k0 = cokernel(mb, snf_b)
    k1 = AbelianGroup(kernel_rank(mb, snf_b))

    ma = _one_minus_transpose(edge_matrix(d))
    snf_a = smith_normal_form(ma)
    if cokernel(ma, snf_a) != k0 or kernel_rank(ma, snf_a) != k1.free_rank:
        raise ArithmeticError("edge and vertex matrix K-theory disagree")

    unit = coset_coordinates(snf_b, [1] * len(g.vertices))
    return KTheory(k0, k1, unit)


def k_theory_free_graph(g: WeightedUndirectedGraph) -> KTheory:
    """K_0 free on the vertex projections, K_1 = 0; independent of the weighting."""
    n = len(g.vertices)
    return KTheory(AbelianGroup(n), AbelianGroup(0), {"torsion": [], "free": [1] * n})
