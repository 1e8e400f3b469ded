"""Bratteli diagrams of the gauge-invariant cores.

The Cuntz core grows along the graph from the base vertex: level ``n`` has
one node per vertex reached by a length-``n`` path from the base vertex,
with dimension equal to the number of such paths.  The Toeplitz cores add
``A_infinity`` tails: a tail leaves a core node at level ``n`` through a
single edge, has the parent's dimension, and then repeats itself once per
level.  The compressed core puts a tail under every core node, the
``T_0`` core only under nodes labelled by the base vertex.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graph_core import WeightedUndirectedGraph, vertex_matrix

CUNTZ = "cuntz_core"
COMPRESSED = "compressed_toeplitz_core"
ZERO = "toeplitz_zero_core"


@dataclass(frozen=True)
class Node:
    label: str
    dim: int
    tail_of: tuple[int, str] | None = None  # (attach level, parent label) for tail nodes

    @property
    def is_tail(self) -> bool:
        return self.tail_of is not None


@dataclass(frozen=True)
class BratteliEdge:
    level: int  # edge goes from ``level`` to ``level + 1``
    source: int
    target: int
    multiplicity: int


@dataclass(frozen=True)
class BratteliDiagram:
    levels: tuple[tuple[Node, ...], ...]
    edges: tuple[BratteliEdge, ...]
    kind: str

    @property
    def node_count(self) -> int:
        return sum(len(level) for level in self.levels)

    def incoming(self, level: int, index: int) -> list[BratteliEdge]:
        return [e for e in self.edges if e.level == level - 1 and e.target == index]

    def check_consistency(self) -> None:
        """Every node below level 0 has dim = sum of multiplicity x parent dim."""
        for n in range(1, len(self.levels)):
            for i, node in enumerate(self.levels[n]):
                total = sum(e.multiplicity * self.levels[n - 1][e.source].dim for e in self.incoming(n, i))
                if total != node.dim:
                    raise AssertionError(f"level {n} node {node.label!r}: dim {node.dim} != incoming {total}")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "levels": [
                [{"label": nd.label, "dim": nd.dim, "tail": nd.is_tail} for nd in level]
                for level in self.levels
            ],
            "edges": [
                {"level": e.level, "source": e.source, "target": e.target, "multiplicity": e.multiplicity}
                for e in self.edges
            ],
        }


def cuntz_core_bratteli(g: WeightedUndirectedGraph, depth: int, base: str | None = None) -> BratteliDiagram:
    base = g.base_vertex if base is None else base
    b = vertex_matrix(g)
    verts = g.vertices
    counts = [0] * len(verts)
    counts[g.index[base]] = 1
    levels = [(Node(base, 1),)]
    rows = [[g.index[base]]]
    edges = []
    for n in range(depth):
        nxt = [sum(int(b[i, j]) * counts[i] for i in range(len(verts))) for j in range(len(verts))]
        row = [j for j in range(len(verts)) if nxt[j]]
        pos = {j: k for k, j in enumerate(row)}
        for si, i in enumerate(rows[-1]):
            for j in row:
                if b[i, j]:
                    edges.append(BratteliEdge(n, si, pos[j], int(b[i, j])))
        levels.append(tuple(Node(verts[j], nxt[j]) for j in row))
        rows.append(row)
        counts = nxt
    return BratteliDiagram(tuple(levels), tuple(edges), CUNTZ)


def tail_label(level: int, parent: str) -> str:
    return f"tail({parent}@{level})"


def toeplitz_core_bratteli(
    g: WeightedUndirectedGraph, depth: int, variant: str = "compressed", base: str | None = None
) -> BratteliDiagram:
    """Cuntz core plus A_infinity tails; ``variant`` is ``compressed`` or ``zero``."""
    if variant not in ("compressed", "zero"):
        raise ValueError("variant must be 'compressed' or 'zero'")
    base = g.base_vertex if base is None else base
    core = cuntz_core_bratteli(g, depth, base)
    levels = [list(level) for level in core.levels]
    edges = list(core.edges)
    # live tails: (index in current level, dim)
    live: list[int] = []
    for n in range(depth):
        new_live = []
        for idx in live:
            node = levels[n][idx]
            levels[n + 1].append(node)
            new_idx = len(levels[n + 1]) - 1
            edges.append(BratteliEdge(n, idx, new_idx, 1))
            new_live.append(new_idx)
        for i, node in enumerate(core.levels[n]):
            if variant == "zero" and node.label != base:
                continue
            levels[n + 1].append(Node(tail_label(n, node.label), node.dim, (n, node.label)))
            edges.append(BratteliEdge(n, i, len(levels[n + 1]) - 1, 1))
            new_live.append(len(levels[n + 1]) - 1)
        live = new_live
    kind = COMPRESSED if variant == "compressed" else ZERO
    edges.sort(key=lambda e: (e.level, e.source, e.target))
    return BratteliDiagram(tuple(tuple(level) for level in levels), tuple(edges), kind)


def _dot_id(level: int, node: Node) -> str:
    return f'"L{level}:{node.label}"'


def to_dot(d: BratteliDiagram) -> str:
    """Deterministic Graphviz text; core and tail nodes sit in separate clusters."""
    lines = ["digraph bratteli {"]
    if d.levels:
        lines.append("  rankdir=TB;")
        lines.append("  node [shape=circle];")
        for name, want_tail, style in (("core", False, "solid"), ("tails", True, "dashed")):
            members = [(n, nd) for n, level in enumerate(d.levels) for nd in level if nd.is_tail == want_tail]
            if not members:
                continue
            lines.append(f"  subgraph cluster_{name} {{")
            lines.append(f'    label="{name}"; style={style};')
            for n, nd in members:
                lines.append(f'    {_dot_id(n, nd)} [label="{nd.label}\\n{nd.dim}"];')
            lines.append("  }")
        for n, level in enumerate(d.levels):
            lines.append("  { rank=same; " + " ".join(_dot_id(n, nd) + ";" for nd in level) + " }")
        for e in d.edges:
            src = _dot_id(e.level, d.levels[e.level][e.source])
            dst = _dot_id(e.level + 1, d.levels[e.level + 1][e.target])
            attr = f' [label="{e.multiplicity}"]' if e.multiplicity > 1 else ""
            lines.append(f"  {src} -> {dst}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
