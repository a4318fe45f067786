"""Alternating-chain counts against their exact expectations.

Chains leave a large ball at the origin through k unit balls and end at
another large ball.  The ordered-tuple count M_k has an exact product-form
expectation; the distinct-endpoint count N_k is smaller because geometry
makes chains collide.  Their gap is the finite-dimensional interference
the branching approximation ignores.
"""

from contperc.pathcount import count_paths, tuple_expectation_exact

print("d  rho  kappa  k   mean N_k (se)        mean M_k (se)        exact E[M_k]")
for d, rho, kappa, k in (
    (2, 2.0, 0.8, 0),
    (2, 2.0, 0.6, 1),
    (2, 2.0, 0.5, 2),
    (3, 3.0, 0.5, 1),
):
    run = count_paths(d, rho, kappa, k, trials=30_000, seed=4)
    exact = tuple_expectation_exact(d, rho, kappa, k)
    print(
        f"{d}  {rho:3.1f}  {kappa:4.2f}  {k}   "
        f"{run.mean_n:8.5f} ({run.se_n:.5f})   "
        f"{run.mean_m:8.5f} ({run.se_m:.5f})   {exact:8.5f}"
    )

print("\nN_k <= M_k holds sample by sample; E[M_k] is exact by the product formula,")
print("so the Monte Carlo column should sit within a few standard errors of it.")
