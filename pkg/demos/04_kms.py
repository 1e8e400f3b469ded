"""KMS weights for the gauge action.

The weight Psi(S_p S_q*) = delta(p, q) lam^-|p| mu(v) satisfies the KMS
condition at beta = ln(lam) when mu is the Perron vector, and only there.
"""
from __future__ import annotations

import math

from cstar_graphs import bouquet, path_graph, perron_data
from cstar_graphs.kms import defect_projection, kms_report, kms_weight, word_from_text

g = bouquet(2)
w = word_from_text(g, "S(l1) S*(l1)")
print("bouquet(2): Psi(S1 S1*) =", kms_weight(w, 2, {"o": 1}))
print("bouquet(2): Psi(S1 S2*) =", kms_weight(word_from_text(g, "S(l1) S*(l2)"), 2, {"o": 1}))

g = path_graph(5)
p = perron_data(g)
lam = p.eigenvalue
for beta in (math.log(lam) - 0.1, math.log(lam), math.log(lam) + 0.1):
    rep = kms_report(g, lam, p.weighting, beta)
    print(f"A5, beta={beta:.4f}: worst KMS residual {rep.max_residual:.2e}")
for v in g.vertices:
    print(f"  Psi(defect at {v}) = {kms_weight(defect_projection(g, v), lam, p.weighting):.1e}")
