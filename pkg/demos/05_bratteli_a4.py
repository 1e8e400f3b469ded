"""Bratteli diagrams of the gauge-invariant cores for A4.

Writes DOT files next to this script; render with ``dot -Tpng``.
"""
from __future__ import annotations

from pathlib import Path

from cstar_graphs import path_graph
from cstar_graphs.bratteli import cuntz_core_bratteli, to_dot, toeplitz_core_bratteli

g = path_graph(4)
here = Path(__file__).parent
for name, d in (
    ("cuntz", cuntz_core_bratteli(g, 4)),
    ("compressed", toeplitz_core_bratteli(g, 4, "compressed")),
    ("zero", toeplitz_core_bratteli(g, 4, "zero")),
):
    d.check_consistency()
    print(f"{name}: {d.node_count} nodes, {len(d.edges)} edges")
    for n, level in enumerate(d.levels):
        print("   level", n, " ".join(f"{nd.label}:{nd.dim}" for nd in level))
    (here / f"a4_{name}.dot").write_text(to_dot(d))
