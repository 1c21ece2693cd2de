"""Recolor random simple hypergraphs and estimate the success rate."""

from hgrecolor.engine import default_p, estimate_success, run_recolor, sample_input
from hgrecolor.hypergraph import check_simple, degree_profile, gen_random_simple

n, r = 6, 2
h = gen_random_simple(n, 120, 40, 10, seed=1).hypergraph
print(f"{h.edge_count} edges on {h.vertex_count} vertices, simple={check_simple(h).is_simple}, "
      f"max edge degree {degree_profile(h).max_edge_degree}")

p = default_p(n)
trace = run_recolor(h, sample_input(h, r, p, seed=7))
print(f"one run at p={p:.3f}: {len(trace.events)} recolors, proper={trace.proper}")

est = estimate_success(h, r, p, trials=2000, seed=7, threads=2)
print(f"success over {est.trials} trials: {est.successes} ({est.fraction:.3f}), 95% CI {est.ci_low:.3f}..{est.ci_high:.3f}")
