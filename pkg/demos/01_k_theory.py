"""K-theory of Cuntz-Krieger algebras of small graphs.

A bouquet of n loops gives the Cuntz algebra O_n; the path graphs A_n give
the algebras attached to the Temperley-Lieb planar algebras.
"""
from __future__ import annotations

import warnings

from cstar_graphs import bouquet, k_theory_cuntz_krieger, k_theory_free_graph, path_graph, smith_normal_form
from cstar_graphs.int_linalg import ExcludedGraphWarning

# Smith normal form is the workhorse: invariant factors of 1 - B^T
print("SNF of [[2, 4], [6, 8]]:", smith_normal_form([[2, 4], [6, 8]]).diagonal)

for n in range(2, 7):
    kt = k_theory_cuntz_krieger(bouquet(n))
    print(f"bouquet({n}): K0 = {kt.k0}, K1 = {kt.k1}, [1] = {kt.unit_class}")

# single loop and A2 are excluded cases; the formal answer still comes out
with warnings.catch_warnings():
    warnings.simplefilter("ignore", ExcludedGraphWarning)
    for g, name in ((bouquet(1), "single loop"), (path_graph(2), "A2")):
        kt = k_theory_cuntz_krieger(g)
        print(f"{name}: K0 = {kt.k0}, K1 = {kt.k1}")

for n in range(3, 9):
    kt = k_theory_cuntz_krieger(path_graph(n))
    print(f"A{n}: K0 = {kt.k0}, K1 = {kt.k1}")

# the free graph algebra only sees the vertices
print("free graph algebra of A4:", k_theory_free_graph(path_graph(4)).k0)
