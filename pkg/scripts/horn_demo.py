#!/usr/bin/env python3
"""Walk through the Horn-matrix instance: finite optimum, unbounded relaxation.

The quadratic form is the Horn matrix (copositive, so the objective is
nonnegative on the orthant) and the constraint row admits a doubly
nonnegative certificate with negative objective rate in its null space, so
the relaxation value collapses to minus infinity while the true optimum is
finite.  The script prints each step of that story.
"""

import numpy as np

from qprelax.analysis import analyze_recession_cone, check_copositivity_desk_scale
from qprelax.conic import OBJECTIVE, recession_certificate_search, solve_relaxation
from qprelax.core import DNN
from qprelax.generators import horn_instance
from qprelax.oracle import enumerate_vertices, global_solve


def main():
    inst, dtilde = horn_instance()
    print(f"instance {inst.name}: n={inst.n}, constraint row {inst.A[0].astype(int).tolist()},"
          f" rhs {inst.b[0]:g}")

    cop = check_copositivity_desk_scale(inst.Q)
    print(f"simplex minimum of x^T Q x: {cop.min_value:.3g}  (copositive quadratic part)")
    print(f"linear term nonnegative: {bool(inst.c.min() >= 0)}"
          "  -> objective nonnegative on the orthant, optimum finite")

    verts = enumerate_vertices(inst)
    print(f"basic feasible points: {[np.round(v, 3).tolist() for v in verts]}")
    rec = analyze_recession_cone(inst)
    print(f"recession cone nontrivial: {rec.l_nontrivial},"
          f" minimum curvature {rec.min_curvature:.3g}")

    oracle = global_solve(inst)
    print(f"exact optimum: {oracle.value:g} at {np.round(oracle.minimizers[0], 6).tolist()}"
          f" ({oracle.status})")

    print("\nembedded integer certificate (trace 45):")
    print(dtilde.astype(int))
    print(f"objective rate <Q, D>: {int((inst.Q * dtilde).sum())},"
          f" constraint product A D: {(inst.A.astype(int) @ dtilde.astype(int)).tolist()}")

    search = recession_certificate_search(inst, DNN, OBJECTIVE)
    print(f"\ncertificate search: {search.status},"
          f" optimal trace-normalized rate {search.certificate.objective_rate:.6f}")

    res = solve_relaxation(inst, DNN)
    print(f"doubly nonnegative relaxation: {res.status} (value {res.value})")
    print("\nfinite optimum, unbounded relaxation: the gap is infinite.")


if __name__ == "__main__":
    main()
