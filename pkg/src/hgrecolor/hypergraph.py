"""n-uniform hypergraphs: representation, degrees, simplicity, trimming, generators.

Vertices are dense 0-based integers. Edges are stored as strictly increasing
tuples and keep their input order, so an edge is addressed by its index.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import DegeneracyError, HypergraphError

__all__ = [
    "Hypergraph",
    "SimplicityReport",
    "DegreeProfile",
    "GenerationResult",
    "PartialGenerationWarning",
    "check_simple",
    "degree_profile",
    "codegree",
    "trim",
    "gen_random_simple",
    "gen_named",
    "load_hypergraph",
    "save_hypergraph",
]


@dataclass(frozen=True)
class Hypergraph:
    """An n-uniform hypergraph on vertices ``0 .. vertex_count-1``.

    ``labels`` optionally maps each vertex id back to the label it had in the
    source file (for instance the integers ``1..M`` of a progression hypergraph).
    """

    n: int
    vertex_count: int
    edges: tuple[tuple[int, ...], ...]
    labels: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 2:
            raise HypergraphError(f"edge size n must be >= 2, got {self.n}")
        if self.vertex_count < 0:
            raise HypergraphError("vertex_count must be non-negative")
        canon = []
        seen = {}
        for idx, e in enumerate(self.edges):
            t = tuple(sorted(int(v) for v in e))
            if len(t) != self.n:
                raise HypergraphError(f"edge {idx} has {len(t)} vertices, expected {self.n}", idx)
            if len(set(t)) != self.n:
                raise HypergraphError(f"edge {idx} repeats a vertex: {t}", idx)
            if t[0] < 0 or t[-1] >= self.vertex_count:
                raise HypergraphError(f"edge {idx} has a vertex id out of range: {t}", idx)
            if t in seen:
                raise HypergraphError(f"edge {idx} duplicates edge {seen[t]}: {t}", idx)
            seen[t] = idx
            canon.append(t)
        object.__setattr__(self, "edges", tuple(canon))
        if self.labels is not None:
            if len(self.labels) != self.vertex_count:
                raise HypergraphError("labels must have one entry per vertex")
            object.__setattr__(self, "labels", tuple(self.labels))

    def __len__(self):
        return len(self.edges)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """``incidence[v]`` lists the indices of the edges containing ``v``."""
        inc: list[list[int]] = [[] for _ in range(self.vertex_count)]
        for i, e in enumerate(self.edges):
            for v in e:
                inc[v].append(i)
        return tuple(tuple(x) for x in inc)

    @cached_property
    def edge_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(e) for e in self.edges)

    @cached_property
    def neighbours(self) -> tuple[frozenset, ...]:
        """``neighbours[i]``: indices of the other edges meeting edge ``i``."""
        out = []
        for i, e in enumerate(self.edges):
            s = set()
            for v in e:
                s.update(self.incidence[v])
            s.discard(i)
            out.append(frozenset(s))
        return tuple(out)

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "vertex_count": self.vertex_count,
            "edges": [list(e) for e in self.edges],
        }
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Hypergraph":
        """Build from the structured file form.

        With a ``labels`` key, edges are 0-based ids into it (the canonical
        form written by :meth:`to_dict`). Without one, edges that are not
        in-range integers are treated as arbitrary labels and normalised.
        """
        try:
            n = int(data["n"])
            raw_edges = [list(e) for e in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise HypergraphError(f"not a hypergraph object: {exc}") from exc
        vc = data.get("vertex_count")
        if "labels" in data:
            labels = tuple(data["labels"])
            return cls(n, len(labels) if vc is None else int(vc), tuple(map(tuple, raw_edges)), labels)
        flat = [v for e in raw_edges for v in e]
        if vc is not None and all(isinstance(v, int) and not isinstance(v, bool) and 0 <= v < vc for v in flat):
            return cls(n, int(vc), tuple(map(tuple, raw_edges)))
        distinct = sorted(set(flat), key=lambda x: (type(x).__name__, x))
        index = {lab: i for i, lab in enumerate(distinct)}
        edges = tuple(tuple(index[v] for v in e) for e in raw_edges)
        return cls(n, len(distinct), edges, tuple(distinct))


def load_hypergraph(path) -> Hypergraph:
    with open(path) as fh:
        return Hypergraph.from_dict(json.load(fh))


def save_hypergraph(h: Hypergraph, path) -> None:
    with open(path, "w") as fh:
        json.dump(h.to_dict(), fh, sort_keys=True)
        fh.write("\n")


@dataclass(frozen=True)
class SimplicityReport:
    is_simple: bool
    violations: tuple[tuple[int, int, int], ...]


@dataclass(frozen=True)
class DegreeProfile:
    max_edge_degree: int
    max_vertex_degree: int
    per_vertex_degrees: tuple[int, ...]
    per_edge_degrees: tuple[int, ...]


def check_simple(h: Hypergraph) -> SimplicityReport:
    """List every pair of distinct edges sharing two or more vertices."""
    pairs: dict[tuple[int, int], int] = {}
    for v in range(h.vertex_count):
        for i, j in combinations(h.incidence[v], 2):
            pairs[(i, j)] = pairs.get((i, j), 0) + 1
    violations = tuple(sorted((i, j, c) for (i, j), c in pairs.items() if c >= 2))
    return SimplicityReport(not violations, violations)


def degree_profile(h: Hypergraph) -> DegreeProfile:
    vdeg = tuple(len(x) for x in h.incidence)
    edeg = tuple(len(x) for x in h.neighbours)
    return DegreeProfile(max(edeg, default=0), max(vdeg, default=0), vdeg, edeg)


def codegree(h: Hypergraph, u: int, v: int) -> int:
    """Number of edges containing both ``u`` and ``v``."""
    if u == v:
        raise ValueError("codegree needs two distinct vertices")
    for x in (u, v):
        if not 0 <= x < h.vertex_count:
            raise ValueError(f"vertex {x} out of range")
    return len(set(h.incidence[u]).intersection(h.incidence[v]))


def trim(h: Hypergraph) -> Hypergraph:
    """Drop one maximum-degree vertex from every edge (smallest id on ties).

    The result is (n-1)-uniform on the same vertex set.
    """
    if h.n < 3:
        raise ValueError("trimming needs n >= 3")
    deg = [len(x) for x in h.incidence]
    out = []
    seen = {}
    for idx, e in enumerate(h.edges):
        drop = max(e, key=lambda v: (deg[v], -v))
        t = tuple(v for v in e if v != drop)
        if t in seen:
            raise DegeneracyError(f"edges {seen[t]} and {idx} trim to the same edge {t}")
        seen[t] = idx
        out.append(t)
    return Hypergraph(h.n - 1, h.vertex_count, tuple(out), h.labels)


class PartialGenerationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GenerationResult:
    hypergraph: Hypergraph
    complete: bool
    attempts: int


def gen_random_simple(
    n: int,
    vertex_count: int,
    edge_target: int,
    degree_cap: int,
    seed: int,
    attempt_factor: int = 1000,
) -> GenerationResult:
    """Greedy rejection sampling of a simple n-uniform hypergraph.

    Uniform random n-subsets are accepted when the hypergraph stays simple and
    its maximum edge degree stays at most ``degree_cap``. Sampling stops at
    ``edge_target`` edges or after ``attempt_factor * edge_target`` draws; in
    the latter case the result is marked incomplete and a
    :class:`PartialGenerationWarning` is issued.
    """
    if n > vertex_count:
        raise ValueError("n must not exceed vertex_count")
    if degree_cap < 0 or edge_target < 0:
        raise ValueError("degree_cap and edge_target must be non-negative")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, ...]] = []
    pair_used: set[tuple[int, int]] = set()
    inc: list[list[int]] = [[] for _ in range(vertex_count)]
    edeg: list[int] = []
    budget = attempt_factor * edge_target
    attempts = 0
    batch: list = []
    while len(edges) < edge_target and attempts < budget:
        if not batch:
            # uniform n-subsets: first n positions of uniform random permutations
            k = min(256, budget - attempts)
            batch = np.sort(np.argsort(rng.random((k, vertex_count)), axis=1)[:, :n], axis=1).tolist()
            batch.reverse()
        attempts += 1
        e = tuple(batch.pop())
        if any(pr in pair_used for pr in combinations(e, 2)):
            continue
        # simple => every edge meets e in at most one vertex, so no double counting
        nbrs = [j for v in e for j in inc[v]]
        if len(nbrs) > degree_cap or any(edeg[j] + 1 > degree_cap for j in nbrs):
            continue
        idx = len(edges)
        edges.append(e)
        edeg.append(len(nbrs))
        for j in nbrs:
            edeg[j] += 1
        for v in e:
            inc[v].append(idx)
        pair_used.update(combinations(e, 2))
    complete = len(edges) >= edge_target
    if not complete:
        warnings.warn(
            f"attempt budget {budget} exhausted with {len(edges)}/{edge_target} edges",
            PartialGenerationWarning,
            stacklevel=2,
        )
    return GenerationResult(Hypergraph(n, vertex_count, tuple(edges)), complete, attempts)


FANO_LINES = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5))

_NAMED = re.compile(r"^\s*([a-z_]+)\s*(?:\(\s*(\d+)\s*\))?\s*$")


def gen_named(name: str, n: int = 3) -> Hypergraph:
    """Fixture hypergraphs.

    ``fano``; ``path(k)``: k edges, consecutive ones sharing one vertex;
    ``disjoint(k)``; ``star(k)``: k edges through vertex 0;
    ``triangle``: three edges meeting pairwise in three distinct vertices;
    ``complete_small``: all n-subsets of n+2 vertices.
    """
    m = _NAMED.match(name)
    if not m:
        raise KeyError(f"unknown hypergraph name {name!r}")
    base, arg = m.group(1), m.group(2)
    k = int(arg) if arg is not None else None
    if base == "fano" and k is None:
        if n != 3:
            raise ValueError("the Fano plane is 3-uniform")
        return Hypergraph(3, 7, FANO_LINES)
    if base == "path" and k is not None:
        step = n - 1
        edges = tuple(tuple(range(i * step, i * step + n)) for i in range(k))
        return Hypergraph(n, k * step + 1 if k else 0, edges)
    if base == "disjoint" and k is not None:
        return Hypergraph(n, k * n, tuple(tuple(range(i * n, (i + 1) * n)) for i in range(k)))
    if base == "star" and k is not None:
        edges = tuple((0,) + tuple(range(1 + i * (n - 1), 1 + (i + 1) * (n - 1))) for i in range(k))
        return Hypergraph(n, 1 + k * (n - 1), edges)
    if base == "triangle" and k is None:
        # corners 0,1,2; remaining slots filled with private vertices
        extra = n - 2
        nxt = 3
        edges = []
        for a, b in ((0, 1), (1, 2), (0, 2)):
            edges.append((a, b) + tuple(range(nxt, nxt + extra)))
            nxt += extra
        return Hypergraph(n, nxt, tuple(edges))
    if base == "complete_small" and k is None:
        return Hypergraph(n, n + 2, tuple(combinations(range(n + 2), n)))
    raise KeyError(f"unknown hypergraph name {name!r}")


def hypergraph_from_edges(n: int, edges: Iterable[Sequence[int]], vertex_count: int | None = None) -> Hypergraph:
    """Convenience constructor; ``vertex_count`` defaults to one past the largest id."""
    edges = [tuple(e) for e in edges]
    if vertex_count is None:
        vertex_count = 1 + max((max(e) for e in edges), default=-1)
    return Hypergraph(n, vertex_count, tuple(edges))
