"""Random recoloring of n-uniform hypergraphs.

A run takes an initial coloring ``c0`` and an injective weight assignment
``sigma``. A vertex is *free* when its weight is at most ``p``. While some
monochromatic edge has a free first (minimum-weight) not-yet-recolored vertex,
that vertex is moved to the next color modulo ``r``; every vertex changes
color at most once. The list variant draws the new color from the vertex's
list instead.
"""

from __future__ import annotations

import hashlib
import math
import json
from dataclasses import dataclass
from functools import partial
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.stats import binomtest

from ._parallel import parallel_map
from .hypergraph import Hypergraph

__all__ = [
    "RunInput",
    "EdgeClassification",
    "Event",
    "Outcome",
    "RunTrace",
    "ListAssignment",
    "SuccessEstimate",
    "SCHEDULES",
    "default_p",
    "sample_input",
    "classify_edge",
    "classify_all",
    "run_recolor",
    "run_list_recolor",
    "verify_proper",
    "estimate_success",
]


def default_p(n: int) -> float:
    """``min(5 ln n / n, 0.49)``; the asymptotic choice leaves (0, 1/2) for small n."""
    return min(5.0 * math.log(n) / n, 0.49)


@dataclass(frozen=True)
class RunInput:
    r: int
    p: float
    c0: tuple[int, ...]
    sigma: tuple[float, ...]

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"need r >= 2 colors, got {self.r}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in the open interval (0, 1), got {self.p}")
        object.__setattr__(self, "c0", tuple(int(c) for c in self.c0))
        object.__setattr__(self, "sigma", tuple(float(s) for s in self.sigma))
        if len(self.c0) != len(self.sigma):
            raise ValueError("c0 and sigma must cover the same vertices")
        if len(set(self.sigma)) != len(self.sigma):
            raise ValueError("sigma must be injective")
        if any(not 0.0 < s <= 1.0 for s in self.sigma):
            raise ValueError("weights must lie in (0, 1]")

    def check_for(self, h: Hypergraph, list_colors: bool = False) -> None:
        if len(self.c0) != h.vertex_count:
            raise ValueError(f"input covers {len(self.c0)} vertices, hypergraph has {h.vertex_count}")
        if not list_colors and any(not 0 <= c < self.r for c in self.c0):
            raise ValueError("initial colors must lie in 0..r-1")

    def is_free(self, v: int) -> bool:
        return self.sigma[v] <= self.p

    def to_dict(self) -> dict:
        return {"r": self.r, "p": self.p, "c0": list(self.c0), "sigma": list(self.sigma)}

    @classmethod
    def from_dict(cls, d: dict) -> "RunInput":
        return cls(int(d["r"]), float(d["p"]), tuple(d["c0"]), tuple(d["sigma"]))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def sample_input(h: Hypergraph, r: int, p: float, seed) -> RunInput:
    """Uniform initial coloring and uniform weights in (0, 1], resampled until injective.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts, including an
    existing generator or a ``(seed, trial)`` pair.
    """
    if r < 2:
        raise ValueError("need r >= 2")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in the open interval (0, 1), got {p}")
    rng = np.random.default_rng(seed)
    nv = h.vertex_count
    c0 = rng.integers(0, r, size=nv)
    sigma = 1.0 - rng.random(nv)
    while len(np.unique(sigma)) < nv:
        _, first = np.unique(sigma, return_index=True)
        dup = np.setdiff1d(np.arange(nv), first)
        sigma[dup] = 1.0 - rng.random(len(dup))
    return RunInput(r, float(p), tuple(c0.tolist()), tuple(sigma.tolist()))


@dataclass(frozen=True)
class EdgeClassification:
    """Verdict for one edge: ``dominating`` is ``None`` for a safe edge."""

    degenerate: bool
    dominating: int | None
    free_count: int
    ambiguous: bool = False

    @property
    def is_safe(self) -> bool:
        return self.dominating is None

    @property
    def is_dangerous(self) -> bool:
        return self.dominating is not None

    @property
    def kind(self) -> str:
        return "safe" if self.dominating is None else "dangerous"


def classify_edge(h: Hypergraph, edge_index: int, inp: RunInput) -> EdgeClassification:
    e = h.edges[edge_index]
    r = inp.r
    free = [v for v in e if inp.sigma[v] <= inp.p]
    fixed_colors = {inp.c0[v] for v in e if inp.sigma[v] > inp.p}
    free_colors = {inp.c0[v] for v in free}
    degenerate = 2 * len(free) >= h.n
    if fixed_colors:
        if len(fixed_colors) > 1:
            return EdgeClassification(degenerate, None, len(free))
        (i,) = fixed_colors
        ok = free_colors <= {i, (i - 1) % r}
        return EdgeClassification(degenerate, i if ok else None, len(free))
    qualifying = [i for i in range(r) if free_colors <= {i, (i - 1) % r}]
    if not qualifying:
        return EdgeClassification(degenerate, None, len(free))
    return EdgeClassification(degenerate, qualifying[0], len(free), len(qualifying) > 1)


def classify_all(h: Hypergraph, inp: RunInput) -> list[EdgeClassification]:
    return [classify_edge(h, i, inp) for i in range(h.edge_count)]


class Event(NamedTuple):
    step: int
    vertex: int
    old: int
    new: int
    blamed: int


@dataclass(frozen=True)
class Outcome:
    failed_edges: tuple[int, ...] = ()

    @property
    def proper(self) -> bool:
        return not self.failed_edges

    def to_dict(self) -> dict:
        if self.proper:
            return {"tag": "proper"}
        return {"tag": "failed", "edges": list(self.failed_edges)}

    @classmethod
    def from_dict(cls, d: dict) -> "Outcome":
        return cls(tuple(d.get("edges", ())))


@dataclass(frozen=True)
class RunTrace:
    events: tuple[Event, ...]
    final_coloring: tuple[int, ...]
    outcome: Outcome

    @property
    def proper(self) -> bool:
        return self.outcome.proper

    def to_dict(self) -> dict:
        return {
            "events": [list(ev) for ev in self.events],
            "final_coloring": list(self.final_coloring),
            "outcome": self.outcome.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunTrace":
        return cls(
            tuple(Event(*map(int, ev)) for ev in d["events"]),
            tuple(int(c) for c in d["final_coloring"]),
            Outcome.from_dict(d["outcome"]),
        )


def verify_proper(h: Hypergraph, coloring: Sequence[int]) -> Outcome:
    """Exact scan for monochromatic edges."""
    if len(coloring) != h.vertex_count or any(c is None for c in coloring):
        raise ValueError("coloring must assign a color to every vertex")
    bad = tuple(i for i, e in enumerate(h.edges) if len({coloring[v] for v in e}) == 1)
    return Outcome(bad)


# A schedule picks one (edge, vertex) pair from the eligible ones. Each pair is
# (edge index, first non-recolored vertex of that edge).
Schedule = Callable[[list, RunInput], tuple]


def _min_sigma(eligible, inp):
    return min(eligible, key=lambda ev: (inp.sigma[ev[1]], ev[0]))


def _input_order(eligible, inp):
    return min(eligible)


SCHEDULES: dict[str, Schedule] = {"min_sigma": _min_sigma, "input_order": _input_order}


def _resolve_schedule(schedule) -> Schedule:
    if callable(schedule):
        return schedule
    try:
        return SCHEDULES[schedule]
    except KeyError:
        raise ValueError(f"unknown schedule {schedule!r}; choose from {sorted(SCHEDULES)}") from None


def _run(h: Hypergraph, inp: RunInput, schedule, pick_color) -> RunTrace:
    choose = _resolve_schedule(schedule)
    sigma = inp.sigma
    p = inp.p
    color = list(inp.c0)
    recolored = [False] * h.vertex_count
    order = [sorted(e, key=sigma.__getitem__) for e in h.edges]
    ptr = [0] * h.edge_count

    def eligible_vertex(i):
        o = order[i]
        k = ptr[i]
        while k < len(o) and recolored[o[k]]:
            k += 1
        ptr[i] = k
        if k == len(o) or sigma[o[k]] > p:
            return None
        c = color[o[0]]
        for u in o:
            if color[u] != c:
                return None
        return o[k]

    eligible = {}
    for i in range(h.edge_count):
        v = eligible_vertex(i)
        if v is not None:
            eligible[i] = v
    events = []
    while eligible:
        i, v = choose(list(eligible.items()), inp)
        old = color[v]
        new = pick_color(v, old)
        color[v] = new
        recolored[v] = True
        events.append(Event(len(events), v, old, new, i))
        for j in h.incidence[v]:
            w = eligible_vertex(j)
            if w is None:
                eligible.pop(j, None)
            else:
                eligible[j] = w
    final = tuple(color)
    return RunTrace(tuple(events), final, verify_proper(h, final))


def run_recolor(h: Hypergraph, inp: RunInput, schedule="min_sigma") -> RunTrace:
    """Run the recoloring loop; ``schedule`` is ``"min_sigma"``, ``"input_order"`` or a callable."""
    inp.check_for(h)
    r = inp.r
    return _run(h, inp, schedule, lambda v, old: (old + 1) % r)


@dataclass(frozen=True)
class ListAssignment:
    lists: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        lists = tuple(tuple(sorted(set(int(c) for c in L))) for L in self.lists)
        object.__setattr__(self, "lists", lists)
        sizes = {len(L) for L in lists}
        if len(sizes) > 1:
            raise ValueError("all lists must have the same size")
        if sizes and min(sizes) < 2:
            raise ValueError("lists need at least two colors")

    @property
    def r(self) -> int:
        return len(self.lists[0]) if self.lists else 0

    @classmethod
    def uniform(cls, vertex_count: int, r: int) -> "ListAssignment":
        return cls(tuple(tuple(range(r)) for _ in range(vertex_count)))


def run_list_recolor(h: Hypergraph, lists: ListAssignment, inp: RunInput, seed, schedule="min_sigma") -> RunTrace:
    """List-coloring variant: a recolored vertex takes a uniform color from its list minus its current color."""
    inp.check_for(h, list_colors=True)
    if len(lists.lists) != h.vertex_count:
        raise ValueError("need one list per vertex")
    if lists.lists and inp.r != lists.r:
        raise ValueError(f"input has r={inp.r} but lists have size {lists.r}")
    for v, (c, L) in enumerate(zip(inp.c0, lists.lists)):
        if c not in L:
            raise ValueError(f"initial color {c} of vertex {v} is not in its list {L}")
    rng = np.random.default_rng(seed)

    def pick(v, old):
        options = [c for c in lists.lists[v] if c != old]
        return options[int(rng.integers(len(options)))]

    return _run(h, inp, schedule, pick)


@dataclass(frozen=True)
class SuccessEstimate:
    successes: int
    trials: int
    fraction: float
    ci_low: float
    ci_high: float


def _trial_success(t, h, r, p, seed, schedule):
    inp = sample_input(h, r, p, (seed, t))
    return run_recolor(h, inp, schedule).proper


def estimate_success(h: Hypergraph, r: int, p: float, trials: int, seed: int, threads: int = 1,
                     schedule="min_sigma") -> SuccessEstimate:
    """Fraction of independent random inputs on which the run ends proper, with a Wilson 95% interval.

    Trial ``t`` draws its input from the stream ``(seed, t)``, so the result
    does not depend on ``threads``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    fn = partial(_trial_success, h=h, r=r, p=p, seed=seed, schedule=schedule)
    ok = sum(parallel_map(fn, range(trials), threads))
    ci = binomtest(ok, trials).proportion_ci(confidence_level=0.95, method="wilson")
    return SuccessEstimate(ok, trials, ok / trials, float(ci.low), float(ci.high))
