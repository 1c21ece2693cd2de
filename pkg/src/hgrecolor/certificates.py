"""Failure certificates for the recoloring run.

Blame graphs, h-trees with their alternating/complete predicates, extraction
of a complete h-tree from a failed run, cycle predicates, and exhaustive
enumerators used as counting oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from itertools import combinations

from .engine import EdgeClassification, RunInput, RunTrace, classify_edge
from .errors import IntegrityError, PreconditionError, ResourceError
from .hypergraph import Hypergraph

__all__ = [
    "BlameGraph",
    "HTree",
    "CycleSeq",
    "ENUMERATION_BUDGET",
    "build_blame_graph",
    "extract_complete_htree",
    "is_htree",
    "is_disjoint",
    "is_alternating",
    "is_downward_complete",
    "is_complete",
    "enumerate_disjoint_htrees",
    "enumerate_simple_cycles",
    "is_simple_cycle",
    "is_bad_cycle",
    "bad_cycle_type",
    "certificate_dict",
]

ENUMERATION_BUDGET = 10**7


@dataclass(frozen=True)
class BlameGraph:
    """Arc ``(f, g)`` means edge ``f`` contains the vertex that blamed edge ``g``.

    ``blamer[g]`` is that vertex and ``blame_step[g]`` the step at which it was
    recolored.
    """

    nodes: tuple[int, ...]
    arcs: frozenset
    blamer: dict = field(compare=False)
    blame_step: dict = field(compare=False)
    acyclic: bool = True

    def successors(self, f: int) -> list[int]:
        return sorted(g for (a, g) in self.arcs if a == f)

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "arcs": sorted([a, b] for a, b in self.arcs),
            "acyclic": self.acyclic,
        }


def _replay(h: Hypergraph, trace: RunTrace, inp: RunInput):
    """Re-execute the trace's events, checking each against the hypergraph."""
    if len(trace.final_coloring) != h.vertex_count or len(inp.c0) != h.vertex_count:
        raise IntegrityError("trace, input and hypergraph disagree on the vertex count")
    color = list(inp.c0)
    seen = set()
    for k, ev in enumerate(trace.events):
        if ev.step != k:
            raise IntegrityError(f"event {k} carries step {ev.step}")
        if not 0 <= ev.blamed < h.edge_count:
            raise IntegrityError(f"event {k} blames unknown edge {ev.blamed}")
        if not 0 <= ev.vertex < h.vertex_count or ev.vertex in seen:
            raise IntegrityError(f"event {k}: vertex {ev.vertex} invalid or recolored twice")
        e = h.edges[ev.blamed]
        if ev.vertex not in e:
            raise IntegrityError(f"event {k}: vertex {ev.vertex} is not in blamed edge {ev.blamed}")
        if color[ev.vertex] != ev.old or len({color[u] for u in e}) != 1:
            raise IntegrityError(f"event {k}: blamed edge {ev.blamed} was not monochromatic")
        color[ev.vertex] = ev.new
        seen.add(ev.vertex)
    if tuple(color) != trace.final_coloring:
        raise IntegrityError("replayed coloring differs from the recorded final coloring")


def build_blame_graph(h: Hypergraph, trace: RunTrace, inp: RunInput) -> BlameGraph:
    _replay(h, trace, inp)
    blamer = {}
    blame_step = {}
    arcs = set()
    for ev in trace.events:
        blamer[ev.blamed] = ev.vertex
        blame_step[ev.blamed] = ev.step
        for f in h.incidence[ev.vertex]:
            if f != ev.blamed:
                arcs.add((f, ev.blamed))
    ts = TopologicalSorter({i: () for i in range(h.edge_count)})
    for a, b in arcs:
        ts.add(b, a)
    try:
        ts.prepare()
        acyclic = True
    except CycleError:
        acyclic = False
    return BlameGraph(tuple(range(h.edge_count)), frozenset(arcs), blamer, blame_step, acyclic)


@dataclass(frozen=True)
class HTree:
    """Rooted tree; node 0 is the root and ``parents[k] < k`` for every other node.

    ``labels[k]`` is the hypergraph edge labelling node ``k`` and
    ``vertex_labels[k]`` the vertex labelling the tree edge from ``k`` to its
    parent (``None`` for the root).
    """

    labels: tuple[int, ...]
    parents: tuple[int, ...]
    vertex_labels: tuple

    def __post_init__(self):
        if not self.labels:
            raise ValueError("an h-tree needs at least one node")
        if not (len(self.labels) == len(self.parents) == len(self.vertex_labels)):
            raise ValueError("labels, parents and vertex_labels must have equal length")
        if self.parents[0] != -1 or any(not 0 <= p < k for k, p in enumerate(self.parents) if k):
            raise ValueError("parents must point to earlier nodes, root first")

    @property
    def size(self) -> int:
        return len(self.labels)

    def children(self, k: int) -> list[int]:
        return [j for j, p in enumerate(self.parents) if p == k]

    def leaves(self) -> list[int]:
        has_child = set(self.parents[1:])
        return [k for k in range(self.size) if k not in has_child]

    def canonical(self, k: int = 0):
        """Label-preserving canonical form of the subtree at ``k`` (children sorted)."""
        kids = sorted((self.vertex_labels[j], self.canonical(j)) for j in self.children(k))
        return (self.labels[k], tuple(kids))

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "parents": list(self.parents),
            "vertex_labels": list(self.vertex_labels),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HTree":
        return cls(tuple(d["labels"]), tuple(d["parents"]), tuple(d["vertex_labels"]))

    @classmethod
    def from_canonical(cls, form) -> "HTree":
        labels, parents, vlabels = [], [], []

        def walk(node, parent, vlabel):
            k = len(labels)
            labels.append(node[0])
            parents.append(parent)
            vlabels.append(vlabel)
            for vl, child in node[1]:
                walk(child, k, vl)

        walk(form, -1, None)
        return cls(tuple(labels), tuple(parents), tuple(vlabels))


def is_htree(t: HTree, h: Hypergraph) -> bool:
    if any(not 0 <= f < h.edge_count for f in t.labels):
        return False
    sets = h.edge_sets
    for k in range(1, t.size):
        v = t.vertex_labels[k]
        if v is None or v not in sets[t.labels[k]] or v not in sets[t.labels[t.parents[k]]]:
            return False
    return True


def is_disjoint(t: HTree, h: Hypergraph) -> bool:
    """h-tree whose labels meet in at most one vertex, and only across tree edges."""
    if not is_htree(t, h):
        return False
    sets = h.edge_sets
    adjacent = {(min(k, p), max(k, p)) for k, p in enumerate(t.parents) if k}
    for x, y in combinations(range(t.size), 2):
        common = len(sets[t.labels[x]] & sets[t.labels[y]])
        if common > 1 or (common == 1 and (x, y) not in adjacent):
            return False
    return True


class _Colors:
    """Per-input lookups shared by the tree predicates."""

    def __init__(self, h: Hypergraph, inp: RunInput):
        self.h = h
        self.inp = inp
        self._cls: dict[int, EdgeClassification] = {}

    def cls(self, f: int) -> EdgeClassification:
        c = self._cls.get(f)
        if c is None:
            c = self._cls[f] = classify_edge(self.h, f, self.inp)
        return c

    def first_with_color(self, f: int, color: int):
        cand = [u for u in self.h.edges[f] if self.inp.c0[u] == color]
        return min(cand, key=self.inp.sigma.__getitem__) if cand else None

    def free_with_color(self, f: int, color: int) -> list[int]:
        inp = self.inp
        return [u for u in self.h.edges[f] if inp.c0[u] == color and inp.sigma[u] <= inp.p]


def _alternating_at(t: HTree, k: int, ctx: _Colors) -> bool:
    f = t.labels[k]
    c = ctx.cls(f)
    if c.is_safe or c.degenerate:
        return False
    kids = t.children(k)
    if not kids:
        return True
    prev = (c.dominating - 1) % ctx.inp.r
    firsts = set()
    for j in kids:
        if not _alternating_at(t, j, ctx):
            return False
        g = t.labels[j]
        if ctx.cls(g).dominating != prev:
            return False
        w = ctx.first_with_color(g, prev)
        if w is None or w not in ctx.h.edge_sets[f]:
            return False
        firsts.add(w)
    return all(u in firsts for u in ctx.free_with_color(f, prev))


def is_alternating(t: HTree, h: Hypergraph, inp: RunInput) -> bool:
    return is_htree(t, h) and _alternating_at(t, 0, _Colors(h, inp))


def _leaves_closed(t: HTree, ctx: _Colors) -> bool:
    r = ctx.inp.r
    for k in t.leaves():
        f = t.labels[k]
        if ctx.free_with_color(f, (ctx.cls(f).dominating - 1) % r):
            return False
    return True


def is_downward_complete(t: HTree, h: Hypergraph, inp: RunInput) -> bool:
    ctx = _Colors(h, inp)
    return is_htree(t, h) and _alternating_at(t, 0, ctx) and _leaves_closed(t, ctx)


def is_complete(t: HTree, h: Hypergraph, inp: RunInput) -> bool:
    ctx = _Colors(h, inp)
    if not (is_htree(t, h) and _alternating_at(t, 0, ctx) and _leaves_closed(t, ctx)):
        return False
    root = t.labels[0]
    return not ctx.free_with_color(root, ctx.cls(root).dominating)


def extract_complete_htree(
    h: Hypergraph,
    trace: RunTrace,
    inp: RunInput,
    failed_edge: int,
    time_respecting: bool = True,
    max_nodes: int = 10**6,
) -> HTree:
    """Unfold the blame graph from a monochromatic edge of a failed run.

    Nodes are directed blame paths starting at ``failed_edge``, labelled by
    their last edge; the tree edge to a child is labelled by the vertex that
    blamed the child. With ``time_respecting`` (the default) a node only
    follows blames made by its vertices *before* its own edge was blamed; the
    root follows all of them. Without it every directed path is unfolded.
    """
    if trace.proper or failed_edge not in trace.outcome.failed_edges:
        raise PreconditionError(f"edge {failed_edge} is not monochromatic in the final coloring")
    for f in range(h.edge_count):
        c = classify_edge(h, f, inp)
        if c.degenerate and c.is_dangerous:
            raise PreconditionError(f"edge {f} is degenerate and dangerous", witness=f)
    bg = build_blame_graph(h, trace, inp)
    if not bg.acyclic:
        raise IntegrityError("blame graph has a cycle")
    step_of = {ev.vertex: ev.step for ev in trace.events}
    blamed_by_vertex = {ev.vertex: ev.blamed for ev in trace.events}
    never = len(trace.events)

    labels, parents, vlabels = [failed_edge], [-1], [None]
    limits = [never]
    k = 0
    while k < len(labels):
        f = labels[k]
        for v in sorted(h.edges[f], key=inp.sigma.__getitem__):
            s = step_of.get(v)
            if s is None:
                continue
            g = blamed_by_vertex[v]
            if g == f or (time_respecting and s >= limits[k]):
                continue
            labels.append(g)
            parents.append(k)
            vlabels.append(v)
            limits.append(s)
            if len(labels) > max_nodes:
                raise ResourceError(f"h-tree exceeds {max_nodes} nodes")
        k += 1
    return HTree(tuple(labels), tuple(parents), tuple(vlabels))


def certificate_dict(h: Hypergraph, trace: RunTrace, inp: RunInput) -> dict:
    """Self-contained certificate: blame graph plus one extracted tree per failed edge."""
    bg = build_blame_graph(h, trace, inp)
    trees = []
    error = None
    if not trace.proper:
        for f in trace.outcome.failed_edges:
            try:
                t = extract_complete_htree(h, trace, inp, f)
            except PreconditionError as exc:
                error = {"reason": str(exc), "witness": exc.witness}
                break
            trees.append({
                "failed_edge": f,
                "tree": t.to_dict(),
                "is_htree": is_htree(t, h),
                "is_alternating": is_alternating(t, h, inp),
                "is_downward_complete": is_downward_complete(t, h, inp),
                "is_complete": is_complete(t, h, inp),
            })
    return {
        "input_digest": inp.digest(),
        "input": inp.to_dict(),
        "outcome": trace.outcome.to_dict(),
        "blame_graph": bg.to_dict(),
        "htrees": trees,
        "extraction_refused": error,
    }


def _budget_tick(counter: list, budget: int):
    counter[0] += 1
    if counter[0] > budget:
        raise ResourceError(f"enumeration visited more than {budget} partial structures")


def _tree_from_edge_set(h: Hypergraph, edges: tuple[int, ...], root: int) -> HTree:
    sets = h.edge_sets
    labels, parents, vlabels = [root], [-1], [None]
    placed = {root}
    k = 0
    while k < len(labels):
        f = labels[k]
        for g in edges:
            if g not in placed and sets[f] & sets[g]:
                (v,) = sets[f] & sets[g]
                placed.add(g)
                labels.append(g)
                parents.append(k)
                vlabels.append(v)
        k += 1
    return HTree(tuple(labels), tuple(parents), tuple(vlabels))


def enumerate_disjoint_htrees(h: Hypergraph, v: int, size: int, budget: int = ENUMERATION_BUDGET) -> list[HTree]:
    """All disjoint h-trees with ``size`` nodes that contain vertex ``v``.

    In a disjoint h-tree distinct nodes carry distinct edges and the tree is
    exactly the intersection graph of its label set, so each tree is a
    connected edge set (pairwise meeting in at most one vertex, intersection
    graph a tree) together with a choice of root.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    sets = h.edge_sets
    nbrs = h.neighbours
    counter = [0]
    found: set[frozenset] = set()
    frontier = {frozenset([f]) for f in h.incidence[v]}
    for _ in range(size - 1):
        nxt = set()
        for s in frontier:
            for f in s:
                for g in nbrs[f]:
                    if g in s:
                        continue
                    _budget_tick(counter, budget)
                    touching = [x for x in s if sets[x] & sets[g]]
                    # the new edge must hang off exactly one member, through one vertex
                    if len(touching) == 1 and len(sets[touching[0]] & sets[g]) == 1:
                        nxt.add(s | {g})
        frontier = nxt
    for s in frontier:
        _budget_tick(counter, budget)
        found.add(s)
    out = []
    for s in sorted(found, key=sorted):
        members = tuple(sorted(s))
        for root in members:
            out.append(_tree_from_edge_set(h, members, root))
    return out


@dataclass(frozen=True)
class CycleSeq:
    edges: tuple[int, ...]

    def __len__(self):
        return len(self.edges)

    def rotations(self):
        k = len(self.edges)
        return [CycleSeq(self.edges[i:] + self.edges[:i]) for i in range(k)]


def is_simple_cycle(c: CycleSeq, h: Hypergraph) -> bool:
    """Distinct edges, each meeting exactly its two cyclic neighbours among the sequence."""
    k = len(c)
    if k < 2 or len(set(c.edges)) != k:
        return False
    sets = h.edge_sets
    for i in range(k):
        for j in range(i + 1, k):
            meet = bool(sets[c.edges[i]] & sets[c.edges[j]])
            if meet != ((j - i) % k in (1, k - 1)):
                return False
    return True


def enumerate_simple_cycles(
    h: Hypergraph, v: int, length: int, anchored: bool = False, budget: int = ENUMERATION_BUDGET
) -> list[CycleSeq]:
    """Simple cycles of ``length`` edges through ``v``, as sequences.

    Every rotation and both directions count separately. With ``anchored``
    only sequences whose first edge contains ``v`` are returned.
    """
    if length < 2:
        raise ValueError("cycles have length >= 2")
    sets = h.edge_sets
    nbrs = h.neighbours
    counter = [0]
    anchored_found = []

    def extend(seq):
        _budget_tick(counter, budget)
        k = len(seq)
        if k == length:
            if length == 2 or sets[seq[-1]] & sets[seq[0]]:
                anchored_found.append(tuple(seq))
            return
        last = seq[-1]
        for g in sorted(nbrs[last]):
            if g in seq:
                continue
            # g may touch only its predecessor, plus the first edge when it closes the cycle
            ok = True
            for idx in range(k - 1):
                if sets[seq[idx]] & sets[g] and not (idx == 0 and k == length - 1):
                    ok = False
                    break
            if ok:
                seq.append(g)
                extend(seq)
                seq.pop()

    for f in h.incidence[v]:
        extend([f])
    if anchored:
        return [CycleSeq(c) for c in anchored_found]
    everything = {rot.edges for c in anchored_found for rot in CycleSeq(c).rotations()}
    return [CycleSeq(c) for c in sorted(everything)]


def _differ_by_one(a: int, b: int, r: int) -> bool:
    return (a - b) % r in (1, r - 1)


def bad_cycle_type(c: CycleSeq, h: Hypergraph, inp: RunInput):
    """Type 0, 1 or 2 of a bad cycle in the progression sense, ``None`` when it is not bad."""
    k = len(c)
    cls = [classify_edge(h, f, inp) for f in c.edges]
    if any(x.is_safe or x.degenerate for x in cls):
        return None
    dom = [x.dominating for x in cls]
    if not all(_differ_by_one(dom[j], dom[j + 1], inp.r) for j in range(k - 1)):
        return None
    sets = h.edge_sets
    if k == 2:
        return 0 if len(sets[c.edges[0]] & sets[c.edges[1]]) >= 2 else None
    if k < 2 or any(len(sets[c.edges[j]] & sets[c.edges[j + 1]]) != 1 for j in range(k - 1)):
        return None
    return 1 if 2 * len(sets[c.edges[0]] & sets[c.edges[-1]]) <= h.n else 2


def is_bad_cycle(c: CycleSeq, h: Hypergraph, inp: RunInput, variant: str = "simple") -> bool:
    """Bad-cycle predicate.

    ``"simple"``: at least three edges, all dangerous, dominating colors of
    consecutive edges differing by one modulo r. ``"ap"``: the progression
    variant (types 0, 1, 2), which also excludes degenerate edges.
    """
    if variant == "ap":
        return bad_cycle_type(c, h, inp) is not None
    if variant != "simple":
        raise ValueError(f"unknown variant {variant!r}")
    if len(c) < 3:
        return False
    cls = [classify_edge(h, f, inp) for f in c.edges]
    if any(x.is_safe for x in cls):
        return False
    return all(_differ_by_one(cls[j].dominating, cls[j + 1].dominating, inp.r) for j in range(len(c) - 1))
