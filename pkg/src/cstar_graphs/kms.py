"""Word calculus in the Toeplitz-Cuntz-Krieger generators and KMS weights.

A reduced word is a finite real combination of terms ``S_p S_q*`` where
``p``, ``q`` are paths with common terminal vertex ``v``; ``p = q = ()`` is
the vertex projection ``p_v``.  Products are reduced with the two rules

* ``S_f* S_e = delta(e, f) p_t(e)``
* ``p_v S_e = delta(v, s(e)) S_e``

and nothing else, so defect projections ``p_v - sum S_e S_e*`` survive.

The weight ``Psi(S_p S_q*) = delta(p, q) lam**-|p| mu(v)`` is KMS for the
gauge action at ``beta = ln(lam)`` exactly when ``mu`` is a Perron
eigenvector for ``lam``.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .graph_core import DirectedGraph, directify

Letter = tuple[str, str]


class WordSyntaxError(ValueError):
    pass


class NotPerronWarning(UserWarning):
    """The weighting is not a Perron eigenvector; KMS checks are expected to fail."""


class Term(NamedTuple):
    p: tuple[str, ...]
    q: tuple[str, ...]
    vertex: str

    @property
    def grade(self) -> int:
        return len(self.p) - len(self.q)


class Word:
    """Immutable reduced element of the Toeplitz-Cuntz-Krieger algebra."""

    __slots__ = ("graph", "terms")

    def __init__(self, graph: DirectedGraph, terms: Mapping[Term, object] | None = None):
        self.graph = graph
        self.terms = {t: c for t, c in (terms or {}).items() if c != 0}

    # -- constructors ----------------------------------------------------------

    @classmethod
    def generator(cls, graph: DirectedGraph, kind: str, ident: str) -> "Word":
        if kind == "P":
            if ident not in graph.vertices:
                raise KeyError(f"unknown vertex {ident!r}")
            return cls(graph, {Term((), (), ident): 1})
        de = graph[ident]
        if kind == "S":
            return cls(graph, {Term((de.id,), (), de.target): 1})
        if kind == "S*":
            return cls(graph, {Term((), (de.id,), de.target): 1})
        raise WordSyntaxError(f"unknown generator kind {kind!r}")

    # -- algebra ---------------------------------------------------------------

    def _start(self, path: tuple[str, ...], vertex: str) -> str:
        return self.graph[path[0]].source if path else vertex

    def _mul_terms(self, x: Term, y: Term) -> Term | None:
        # S_{p1} S_{q1}* S_{p2} S_{q2}*: only S_{q1}* S_{p2} needs reducing
        q1, p2 = x.q, y.p
        if self._start(q1, x.vertex) != self._start(p2, y.vertex):
            return None
        k = min(len(q1), len(p2))
        if q1[:k] != p2[:k]:
            return None
        if len(q1) <= len(p2):
            return Term(x.p + p2[k:], y.q, y.vertex)
        return Term(x.p, y.q + q1[k:], x.vertex)

    def __mul__(self, other):
        if isinstance(other, Word):
            out: dict[Term, object] = {}
            for tx, cx in self.terms.items():
                for ty, cy in other.terms.items():
                    t = self._mul_terms(tx, ty)
                    if t is not None:
                        out[t] = out.get(t, 0) + cx * cy
            return Word(self.graph, out)
        return Word(self.graph, {t: c * other for t, c in self.terms.items()})

    def __rmul__(self, scalar):
        return Word(self.graph, {t: scalar * c for t, c in self.terms.items()})

    def __add__(self, other: "Word") -> "Word":
        out = dict(self.terms)
        for t, c in other.terms.items():
            out[t] = out.get(t, 0) + c
        return Word(self.graph, out)

    def __sub__(self, other: "Word") -> "Word":
        return self + (-1) * other

    def __neg__(self) -> "Word":
        return (-1) * self

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"Word({format_word(self)})"

    def adjoint(self) -> "Word":
        return Word(self.graph, {Term(t.q, t.p, t.vertex): c for t, c in self.terms.items()})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def grade(self) -> int | str:
        """Common gauge grade of the terms, or ``"inhomogeneous"``."""
        grades = {t.grade for t in self.terms}
        if not grades:
            return 0
        return grades.pop() if len(grades) == 1 else "inhomogeneous"

    def expectation(self) -> "Word":
        """Conditional expectation onto the core: keep the grade-0 terms."""
        return Word(self.graph, {t: c for t, c in self.terms.items() if t.grade == 0})

    def vacuum_value(self) -> dict[str, object]:
        """Coefficient of ``p_v`` in ``w p_v`` on the Fock space, per vertex."""
        out = {v: 0 for v in self.graph.vertices}
        for t, c in self.terms.items():
            if not t.p and not t.q:
                out[t.vertex] += c
        return out


def _graph(g) -> DirectedGraph:
    return g if isinstance(g, DirectedGraph) else directify(g)


def reduce(graph, letters: Sequence[Letter]) -> Word:
    """Product of generators ``("S", e)``, ``("S*", e)``, ``("P", v)`` in normal form."""
    d = _graph(graph)
    out = None
    for kind, ident in letters:
        gen = Word.generator(d, kind, ident)
        out = gen if out is None else out * gen
    if out is None:
        # empty product: the unit sum_v p_v of a finite graph
        return Word(d, {Term((), (), v): 1 for v in d.vertices})
    return out


def defect_projection(graph, vertex: str) -> Word:
    d = _graph(graph)
    q = Word.generator(d, "P", vertex)
    for e in d.out_edges(vertex):
        q = q - reduce(d, [("S", e.id), ("S*", e.id)])
    return q


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<gen>S\*|S|P)\(\s*(?P<id>[^()\s]+)\s*\)"
    r"|(?P<num>[0-9]+(?:\.[0-9]*)?(?:[eE][-+]?[0-9]+)?(?:/[0-9]+)?)"
    r"|(?P<op>[-+]))"
)


def _number(text: str):
    if "/" in text:
        return Fraction(text)
    if any(ch in text for ch in ".eE"):
        return float(text)
    return int(text)


def parse_word(text: str) -> list[tuple[object, list[Letter]]]:
    """Parse ``"2 S(e) S*(e) - 1/2 P(v) + ..."`` into (scalar, letters) terms.

    Juxtaposition is the product; each summand may start with a sign and a
    scalar (integer, decimal, or ``a/b``).
    """
    pos, terms = 0, []
    coeff, letters, sign_seen = 1, [], False
    text = text.strip()
    if not text:
        raise WordSyntaxError("empty word")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise WordSyntaxError(f"cannot parse word at column {pos}: {text[pos:]!r}")
        pos = m.end()
        if m.group("op"):
            if letters:
                terms.append((coeff, letters))
                coeff, letters = 1, []
            elif sign_seen and m.group("op") == "+":
                raise WordSyntaxError(f"dangling '+' at column {pos}")
            if m.group("op") == "-":
                coeff = -coeff
            sign_seen = True
        elif m.group("num"):
            if letters:
                raise WordSyntaxError(f"scalar after generators at column {m.start()}")
            coeff = coeff * _number(m.group("num"))
        else:
            letters.append((m.group("gen"), m.group("id")))
    if not letters:
        raise WordSyntaxError("word ends without a generator")
    terms.append((coeff, letters))
    return terms


def word_from_text(graph, text: str) -> Word:
    d = _graph(graph)
    out = Word(d)
    for coeff, letters in parse_word(text):
        out = out + coeff * reduce(d, letters)
    return out


def format_word(w: Word) -> str:
    if not w.terms:
        return "0"
    parts = []
    for t, c in sorted(w.terms.items(), key=lambda kv: (kv[0].vertex, kv[0].p, kv[0].q)):
        gens = [f"S({e})" for e in t.p] + [f"S*({e})" for e in reversed(t.q)]
        body = " ".join(gens) if gens else f"P({t.vertex})"
        parts.append(f"{c} {body}")
    return " + ".join(parts)


# ---------------------------------------------------------------- KMS


def is_perron(graph, lam, weights: Mapping[str, float], rtol: float = 1e-10) -> bool:
    d = _graph(graph)
    for v in d.vertices:
        out = sum(weights[e.target] for e in d.out_edges(v))
        if abs(out - lam * weights[v]) > rtol * abs(lam * weights[v]):
            return False
    return True


def kms_weight(w: Word, lam, weights: Mapping[str, float], check: bool = False):
    """``Psi(S_p S_q*) = delta(p, q) lam**-|p| mu(v)``, extended linearly."""
    if check and not is_perron(w.graph, lam, weights):
        warnings.warn("weighting is not a Perron eigenvector for lam", NotPerronWarning, stacklevel=2)
    total = 0
    for t, c in w.expectation().terms.items():
        if t.p == t.q:
            total += c * weights[t.vertex] / lam ** len(t.p)
    return total


def modular_factor(lam, grade: int, beta: float | None):
    """``sigma_{i beta}`` on grade-``k`` elements scales by ``exp(-beta k)``.

    ``beta=None`` means ``beta = ln(lam)``, evaluated as ``lam**-k`` so that
    rational ``lam`` keeps the arithmetic exact.
    """
    if beta is None:
        return 1 / Fraction(lam) ** grade if isinstance(lam, (int, Fraction)) else lam ** -grade
    return math.exp(-beta * grade)


def kms_check(x: Word, y: Word, lam, weights: Mapping[str, float], beta: float | None = None):
    """``|Psi(x sigma_{i beta}(y)) - Psi(y x)|`` for gauge-homogeneous ``y``."""
    grade = y.grade
    if grade == "inhomogeneous":
        raise ValueError("kms_check needs a gauge-homogeneous y")
    factor = modular_factor(lam, grade, beta)
    return abs(kms_weight(x * y, lam, weights) * factor - kms_weight(y * x, lam, weights))


def generators(graph) -> list[Word]:
    d = _graph(graph)
    out = []
    for e in d.dedges:
        out.append(Word.generator(d, "S", e.id))
        out.append(Word.generator(d, "S*", e.id))
    for v in d.vertices:
        out.append(Word.generator(d, "P", v))
    return out


@dataclass(frozen=True)
class KMSReport:
    lam: float
    beta: float
    max_residual: float
    defects: dict

    def to_json(self) -> dict:
        return {
            "lambda": float(self.lam),
            "beta": self.beta,
            "max_generator_residual": float(self.max_residual),
            "defect_weights": {k: float(v) for k, v in self.defects.items()},
        }


def kms_report(graph, lam, weights: Mapping[str, float], beta: float | None = None) -> KMSReport:
    """KMS residual over all generator pairs and the weight of every defect projection."""
    d = _graph(graph)
    gens = generators(d)
    worst = max((kms_check(x, y, lam, weights, beta) for x in gens for y in gens), default=0)
    defects = {v: kms_weight(defect_projection(d, v), lam, weights) for v in d.vertices}
    return KMSReport(lam, math.log(lam) if beta is None else beta, worst, defects)


def iter_words(graph, max_len: int) -> Iterable[list[Letter]]:
    """All raw generator words up to ``max_len`` letters, shortest first."""
    d = _graph(graph)
    letters: list[Letter] = [("S", e.id) for e in d.dedges] + [("S*", e.id) for e in d.dedges]
    letters += [("P", v) for v in d.vertices]
    frontier: list[list[Letter]] = [[]]
    for _ in range(max_len):
        frontier = [w + [l] for w in frontier for l in letters]
        yield from frontier
