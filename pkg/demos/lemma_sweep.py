"""Largest admissible degree for the local-polynomial condition as n grows."""

import math

from hgrecolor.locallemma import ParamSet, evaluate, max_admissible_D, paper_degree

print(f"{'n':>6} {'D':>10} {'log10 alpha':>12}")
for n in (50, 100, 200, 500, 1000, 2000):
    res = max_admissible_D(n, 2)
    la = res.log_alpha / math.log(10) if res.D else float("-inf")
    print(f"{n:>6} {str(res.D) if res.D < 10**9 else f'~1e{math.log10(res.D):.0f}':>10} {la:>12.2f}")

rep = evaluate(ParamSet(2000, 2, paper_degree(2000, 2), 5 * math.log(2000) / 2000))
print(f"stated constant at n=2000: condition met = {rep.condition_met}")
