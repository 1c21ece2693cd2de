"""Exact small van der Waerden numbers and a randomized search below them."""

from hgrecolor.vdw import validate_ap_props, vdw_exact, vdw_randomized

for n, r in ((3, 2), (4, 2), (3, 3)):
    res = vdw_exact(n, r)
    print(f"W({n},{r}) = {res.exact_value}")

res = vdw_randomized(3, 2, 8, trials=2000, seed=0, threads=2)
print(f"random recoloring on [8]: {res.successes}/{res.trials} proper")

rep = validate_ap_props(4, 100)
print(f"H(4,100) checks: {rep.checks}")
