"""Spectral laws of an edge generator with unequal endpoint masses.

For masses mu(alpha) = 4 and mu(beta) = 1 the edge scale is a = sqrt(2).
The moments come from a coupled recursion; the densities are checked
against it by quadrature and the Cauchy transform by Stieltjes inversion.
"""
from __future__ import annotations

from cstar_graphs.free_laws import (
    BACKWARD,
    FORWARD,
    EdgeLawParams,
    cauchy_transform,
    density_moment,
    edge_law,
    moment_recursion,
    stieltjes_density,
)

p = EdgeLawParams.from_masses(4, 1)
print(f"a^2 = {p.a2}, support = {p.support}")

m = moment_recursion(p, 6)
print("forward moments :", [str(x) for x in m.forward])
print("backward moments:", [str(x) for x in m.backward])

fwd, bwd = edge_law(p, FORWARD), edge_law(p, BACKWARD)
print("backward atoms:", bwd.atoms, "a.c. mass:", round(density_moment(bwd, 0) - 3, 12))
for n in range(1, 7):
    q = density_moment(fwd, n) / float(p.mu_beta)
    print(f"n={n}: recursion {float(m.forward[n]):.10f}  quadrature {q:.10f}")

for x in (0.6, 1.5, 3.0, 4.4):
    z = complex(x, 1e-6)
    print(f"x={x}: density {fwd.density([x])[0]:.6f}  -Im G/pi {stieltjes_density(fwd, x):.6f}  G={cauchy_transform(fwd, z):.4f}")
