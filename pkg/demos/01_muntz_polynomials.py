#!/usr/bin/env python
# # Muntz polynomials on [0, 1]
#
# A Muntz polynomial is a finite sum `sum a_k x**lam_k` with real
# exponents. Everything below is exact arithmetic on the expansion.

import numpy as np

from muntz import ExponentRule, MuntzPoly, antiderivative, evaluate, multiply, value_at_zero

# ## Building expansions

f = MuntzPoly.from_terms([(0.5, 1.0), (3.0, -2.0), (0.0, 0.25)])
print("f =", f.terms)
print("f(0) =", value_at_zero(f), " f(1) =", evaluate(f, 1.0))

# Repeated exponents are merged, and cancelled terms disappear.
g = MuntzPoly.from_terms([(3.0, 2.0), (3.0, -2.0), (7.0, 1.0)])
print("g =", g.terms)

# ## Calculus on the expansion
#
# The antiderivative shifts every exponent by one.
F = antiderivative(f)
print("int_0^x f =", F.terms)
print("x^0.5 * x^0.5 =", multiply(MuntzPoly.monomial(0.5), MuntzPoly.monomial(0.5)).terms)

# ## Exponent rules
#
# Lacunary sequences satisfy sum 1/lam < inf. The geometric rule is the
# default exponent set for the experiments.
rule = ExponentRule.geometric(1.0, 2.0, 12)
print(rule.to_dict())
print("first exponents:", rule.materialize()[:6])
print("sum 1/lam over the whole rule <=", rule.muntz_sum_bound())

x = np.linspace(0, 1, 5)
print("f on a grid:", np.round(evaluate(f, x), 6))
