#!/usr/bin/env python
# # Sup and L1 norms without sampling
#
# Roots are bracketed in the variable s = -log x, which keeps huge
# exponents harmless. The count of coefficient sign changes bounds the
# number of zeros, so a search that finds that many is complete.

import math

from muntz import MuntzPoly, isolate_zeros, l1_norm, sup_norm
from muntz.core import sign_variations

f = MuntzPoly.from_terms([(0.0, -0.1), (1.0, 1.0), (2.0, -1.0)])
roots = isolate_zeros(f, tol=1e-12)
print("roots of x - x^2 - 0.1:", roots.points, "certified:", roots.certified)
print("expected:", sorted([(1 - math.sqrt(0.6)) / 2, (1 + math.sqrt(0.6)) / 2]))

r = sup_norm(MuntzPoly.from_terms([(1.0, 1.0), (3.0, -1.0)]))
print(f"sup |x - x^3| = {r.value:.12f} at x = {r.argmax:.12f} (error <= {r.error_radius:.1e})")
print(f"           2/(3 sqrt 3) = {2 / (3 * math.sqrt(3)):.12f}")

# ## Exponents far beyond floating-point x
#
# x**1e12 - 1/2 has its only zero at 2**(-1e-12), invisible in x but not in s.
h = MuntzPoly.from_terms([(1e12, 1.0), (0.0, -0.5)])
z = isolate_zeros(h)
print("zero in s:", z.log_points[0], " vs ln2/1e12 =", math.log(2) / 1e12)

g = MuntzPoly.from_terms([(1.0, 1.0), (2.0, -2.0)])
print("||x - 2x^2||_1 =", l1_norm(g).value, "(exact 1/4)")
print("sign variations of", g.terms, "=", sign_variations(g))
