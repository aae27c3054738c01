#!/usr/bin/env python
# # Cesaro operator and the weighted family H_q
#
# Gamma f = (1/x) int_0^x f keeps every exponent and scales it by
# 1/(lam + 1). Gamma - V = (1 - x) Gamma is compact, so Gamma and V have
# the same essential norm: the compact K = (Gamma - V) + S gives
# Gamma - K = V - S.

from muntz import ExponentRule, FiniteRankSpec, Weight, WitnessFamily, essential_lower_bound
from muntz.essential import (
    cesaro_minus_compact,
    choose_c,
    choose_rho,
    default_sampler,
    estimate_N_epsilon,
    sampled_hq_gap,
    sampled_operator_gap,
)

rule = ExponentRule.geometric(1, 2, 60)
lam = rule.materialize()
print("Cesaro lower bound:", essential_lower_bound("cesaro", WitnessFamily.from_rule(rule)))
sampler = default_sampler(lam)
print("max ||(Gamma - K) f||:", sampled_operator_gap(cesaro_minus_compact, sampler, 1000).max_gap)

# ## Approximating H_q by finite rank plus nuclear
#
# With c solving 2 - c**(lam+1) <= (1 + eps) c and rho = 1 - eps / N,
# H_q - R - T_rho stays below (1 + eps)/2 on the sampled unit ball.
eps = 0.1
c = choose_c(lam[0], eps)
n_hat = estimate_N_epsilon(sampler, c, 500)
rho = choose_rho(eps, n_hat)
print(f"c = {c:.6f}  N = {n_hat:.4f}  rho = {rho:.6f}")
one = Weight.one()
gap = sampled_hq_gap(one, rho, FiniteRankSpec("R", one, lam[0], lam), sampler, 500)
print(f"q = 1, R:  max gap {gap.max_gap:.6f}  bound {(1 + eps) / 2}")
ident = Weight.identity()
gap = sampled_hq_gap(ident, rho, FiniteRankSpec("R1", ident), sampler, 500)
print(f"q = x, R1: max gap {gap.max_gap:.6f}  bound {(1 + eps) / 2 + eps}")
