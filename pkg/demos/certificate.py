"""Find a failed run and extract a complete h-tree from its blame graph."""

from hgrecolor.certificates import build_blame_graph, extract_complete_htree, is_complete
from hgrecolor.engine import run_recolor, sample_input
from hgrecolor.errors import PreconditionError
from hgrecolor.hypergraph import gen_random_simple

h = gen_random_simple(6, 60, 24, 10, seed=3).hypergraph
skipped = 0
for seed in range(5000):
    inp = sample_input(h, 2, 0.3, seed)
    trace = run_recolor(h, inp)
    if trace.proper:
        continue
    try:
        tree = extract_complete_htree(h, trace, inp, trace.outcome.failed_edges[0])
    except PreconditionError as exc:
        # runs with a degenerate dangerous edge carry no certificate
        skipped += 1
        continue
    if len(tree.labels) > 1:
        break

print(f"{skipped} failed runs skipped for a degenerate dangerous edge")
blame = build_blame_graph(h, trace, inp)
print(f"seed {seed}: failed edges {list(trace.outcome.failed_edges)}, "
      f"blame graph {len(blame.arcs)} arcs, acyclic={blame.acyclic}")
print(f"h-tree labels {tree.labels}, parents {tree.parents}, complete={is_complete(tree, h, inp)}")
