"""
How stable is the equation Tx = y?
==================================

A relation is Hyers-Ulam stable when every approximate solution of
``y in Tx`` is close to an exact one.  The best constant is the norm of
the Moore-Penrose inverse, ``M_T = 1 / gamma(T)``, where ``gamma`` is the
reduced minimum modulus.  This script computes it, compares it with a
sampled estimate, and checks how it behaves under sums and products.
"""
import numpy as np

import relcalc as rc
from relcalc.corpus import admissible_perturbation, random_relation

rng = np.random.default_rng(2)

# %% the constant and its empirical counterpart
T = random_relation(rng, 4, 5, "real", kind="parts")
report = rc.certify_hus(T, n_samples=500, seed=1)
print("gamma(T)          =", report.gamma)
print("M_T               =", report.hus_constant)
print("oracle sup ratio  =", report.oracle.sup_ratio)
print("largest sample    =", report.oracle.max_sampled_ratio, "(never above M_T)")
print("verdicts:", {k: v.holds for k, v in report.verdicts.items()})

# %% a perturbation that is small relative to T keeps the sum stable
S = admissible_perturbation(rng, T)
summ = rc.check_sum_stability(T, S, n_samples=200, seed=2)
print("\nS small relative to T: b* =", round(summ.b_star, 4))
print("M_(S+T) =", summ.hus_sum, "<= M_T / (1 - b*) =", summ.bound)

# %% products take the worse of the two factors
U = random_relation(rng, 3, 3, "complex")
prod = rc.check_product_stability(T, U)
print("\nM_T, M_U, M_(TxU):", prod.hus_T, prod.hus_S, prod.hus_product)

# %% losing stability: gamma shrinks as a matrix approaches a singular one
print("\n eps      gamma      M_T")
for eps in (1e-1, 1e-3, 1e-6, 1e-9):
    r = rc.certify_hus(rc.from_graph(np.diag([1.0, eps])))
    print(f"{eps:5.0e}  {r.gamma:9.3e}  {r.hus_constant:9.3e}  {' '.join(r.flags)}")
