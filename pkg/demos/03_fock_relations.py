"""Creation operators on the truncated Fock space of the A4 graph.

Every relation check is an exact matrix identity on paths strictly below
the truncation depth.  The edge operators T_e use the Perron weighting.
"""
from __future__ import annotations

from cstar_graphs import path_graph, perron_data
from cstar_graphs.fock_sim import FockSpace, edge_trace_moments, relation_checks, required_depth, trace_moments

g = path_graph(4)
g = g.with_weights(perron_data(g).weighting)
space = FockSpace(g, 4)
print(f"depth 4 basis: {len(space)} paths")
for check in relation_checks(space):
    print(f"  {'ok ' if check.passed else 'BAD'} {check.name}  (residual {check.max_residual:.1e})")

# how deep must we go for exact moments of T^(2k)?
for k in range(1, 5):
    print(f"T^{2 * k} needs depth {required_depth([('T', 'e')] * (2 * k))}")

print("Tr(T_e0^n):", [round(x, 10) for x in trace_moments(space, "e0", 8)])
fwd, bwd = edge_trace_moments(space, "e0'", 4)
print("normalized moments of T*T at each end:", [round(x, 10) for x in fwd], [round(x, 10) for x in bwd])
