#!/usr/bin/env python
# # Bernstein numbers 1/(2n - 1)
#
# On a lacunary (Newman) subspace the sup norm controls every partial sum
# of the coefficients, and an Abel summation argument then gives
# ||T f|| >= (1 - eps)/(2n - 1) ||f||_1 for both V and Gamma.

from muntz import abel_bound_check, bernstein_estimate, newman_inequality_stats, newman_sequence
from muntz.bernstein import OptimizerBudget

seq = newman_sequence(1.0, 0.1, 4)
print("Newman exponents:", seq.exponents)
print("factors:", [round(f, 6) for f in seq.factors])
stats = newman_inequality_stats(seq, 500)
print(f"500 random vectors: {stats.violations} violations, min ratio {stats.min_ratio:.4f}")

chk = abel_bound_check([1, -2, 2])
print("Abel bound on (1, -2, 2):", chk.lhs, "<=", chk.rhs)

budget = OptimizerBudget(starts=16, evals_per_start=4000)
for op in ("volterra", "cesaro"):
    for n in (1, 2, 3):
        rep = bernstein_estimate(op, n, 0.1, budget=budget)
        print(f"{op:8s} n={n}: inf ratio {rep.value:.5f}   "
              f"[{rep.theory_lower:.4f}, {rep.theory_value:.4f}]   ||a||_1 = {rep.a_l1:.3f}")
