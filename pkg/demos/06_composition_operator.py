#!/usr/bin/env python
# # A composition operator with essential norm 1
#
# T f = f o theta on C[0, 1] with theta(t) = t^2. The witnesses
# x_n(t) = (n|t - alpha| - 1)/(n|t - alpha| + 1) have T x_n converging to
# -1 on theta^-1(alpha) and 1 elsewhere: a jump of height 2.

import numpy as np

from muntz import composition_demo

res = composition_demo(lambda t: t * t, 0.25)
print(f"boundary point t0 = {res.estimate.t0}, height {res.estimate.height:.6f}")
print(f"lower bound on the essential norm: {res.lower_bound:.6f}")
for r, d in list(zip(res.estimate.radii, res.estimate.diameters))[::4]:
    print(f"  radius {r:.1e}: diameter {d:.6f}")

# A constant symbol has no jump at all.
flat = composition_demo(lambda t: np.full_like(t, 0.25), 0.25)
print("constant theta:", flat.lower_bound)
