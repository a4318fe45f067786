"""Threshold constants for alternating paths between two radii.

For each radius ratio rho the constant kappa_c(rho, k) balances a
branching-growth term against a geometric containment term over the radial
offsets of a k-step path.  Below rho = 2 the growth term alone decides and
the closed form is 2 sqrt(rho)/(1+rho); above, the optimum moves onto the
crossing of the two terms.  For large rho longer paths (k >= 2) win.
"""

import numpy as np

from contperc.thresholds import (
    k2_crossover_rho,
    kappa_c,
    kappa_c1_closed_form,
    kappa_c_k,
)

print("rho      k=1 (opt)  k=1 (closed)  k=2        k=3        min  k*")
for rho in (1.2, 1.5, 2.0, 3.0, 5.0, 8.0, 10.0):
    per_k = {k: kappa_c_k(rho, k).kappa for k in (1, 2, 3)}
    best = kappa_c(rho, 3)
    print(
        f"{rho:4.1f}   {per_k[1]:.6f}   {kappa_c1_closed_form(rho):.6f}     "
        f"{per_k[2]:.6f}   {per_k[3]:.6f}   {best.kappa:.6f}  {best.k_used}"
    )

res = kappa_c_k(3.0, 1)
print(f"\nat rho=3, k=1 the optimal offset is {res.offsets[0]:.6f}")
print(f"   (analytically (rho^2-4)/(rho^2+4) = {5/13:.6f})")
print(f"   both objective branches meet there: {res.branch_values}")

rho_star = k2_crossover_rho(tol=0.01)
print(f"\nnumerically, k=2 paths first beat k=1 near rho = {rho_star:.2f}")

print("\ncertification: at rho=1.5 the k >= 2 envelope already exceeds the k=1 value")
result = kappa_c(1.5, 4)
print(f"   kappa_c = {result.kappa:.6f}, achieved at k={result.k_used}, certified={result.certified}")
