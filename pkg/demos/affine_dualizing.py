"""Dualizing sheaves on Schubert varieties of the affine Grassmannian of SL2.

Y = {1} is the finite node, so W^P is the chain e < s0 < s1*s0 < s0*s1*s0 < ...
Each descriptor lists the boundary divisors X_v with their multiplicities m.
"""

from kmk import WeylGroup, build_realization, dualizing_descriptor, load_gcm

W = WeylGroup(build_realization(load_gcm("affine:A1")))
Y = W.gcm.indices([1])

for w in W.enumerate_interval(4, Y):
    d = dualizing_descriptor(W, w, Y)
    print(d.to_text())
    print()
