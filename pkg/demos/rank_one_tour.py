"""A walk through the smallest case: the flag variety of SL2, i.e. P^1.

Two Schubert points, one root. We print the localization table, the
structure constants and their x-expansions so every sign can be read off.
"""

from kmk import LocalizationEngine, WeylGroup, build_realization, preset, to_x_polynomial

W = WeylGroup(build_realization(preset("A1")))
eng = LocalizationEngine(W)
e, s = W.e, W.s(0)

print("localization values phi^w(x):")
for w in (e, s):
    for x in (e, s):
        print(f"  phi^{W.format(w)}({W.format(x)}) = {eng.phi_value(w, x).format(W.gcm.labels)}")

print("\nstructure constants d^w_{u,v} and their expansion in x = e^{-a} - 1:")
for u, v in ((e, e), (e, s), (s, s)):
    table = eng.product_constants(u, v, 1)
    for w, d in table.ordered():
        print(f"  d^{W.format(w)}_{{{W.format(u)},{W.format(v)}}} = {d.format(W.gcm.labels)}    x-form: {to_x_polynomial(d).format(W.gcm.labels)}")
