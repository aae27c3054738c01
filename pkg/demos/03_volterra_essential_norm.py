#!/usr/bin/env python
# # The Volterra operator is half compact
#
# On M^1 the Volterra operator has norm 1 but essential norm 1/2.
# Lower bound: the normalized monomials g_n = (gamma_n + 1) x**gamma_n
# are mapped to x**(gamma_n + 1), whose pointwise limit jumps by 1 at
# t = 1; half the jump bounds the essential norm from below.
# Upper bound: V - S with the rank-one S f = (1/2) int_0^1 f never
# exceeds 1/2 on the unit ball.

import numpy as np

from muntz import ExponentRule, WitnessFamily, essential_lower_bound, pointwise_limit
from muntz.essential import default_sampler, refined_grid, sampled_operator_gap, volterra_minus_s

family = WitnessFamily.dyadic(60)
grid = refined_grid(1.0)
limit = pointwise_limit("volterra", family, grid)
for t in (0.5, 0.99, 1 - 2.0**-20, 1.0):
    i = int(np.searchsorted(grid, t))
    print(f"H({grid[i]:.10f}) = {limit.values[i]:.3g}   spread {limit.spread[i]:.1e}")

print("lower bound:", essential_lower_bound("volterra", family))

lam = ExponentRule.geometric(1, 2, 60).materialize()
gap = sampled_operator_gap(volterra_minus_s, default_sampler(lam), 1000)
print(f"max ||(V - S) f|| over 1000 unit samples: {gap.max_gap!r} (sample {gap.argmax_index})")
