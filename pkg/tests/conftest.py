"""Shared fixtures and independent reference implementations used as oracles."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import strategies as st

from hgrecolor.engine import RunInput
from hgrecolor.hypergraph import Hypergraph, gen_random_simple


def naive_recolor(h: Hypergraph, inp: RunInput, schedule: str = "min_sigma"):
    """Straight transcription of the loop: rescan every edge after each step.

    Returns ``(events, final coloring)`` with events as 5-tuples.
    """
    color = list(inp.c0)
    done = [False] * h.vertex_count
    events = []
    while True:
        cands = []
        for i, e in enumerate(h.edges):
            if len({color[u] for u in e}) != 1:
                continue
            rest = [u for u in e if not done[u]]
            if not rest:
                continue
            v = min(rest, key=lambda u: inp.sigma[u])
            if inp.sigma[v] <= inp.p:
                cands.append((i, v))
        if not cands:
            break
        if schedule == "min_sigma":
            i, v = min(cands, key=lambda c: (inp.sigma[c[1]], c[0]))
        else:
            i, v = min(cands)
        old = color[v]
        color[v] = (old + 1) % inp.r
        done[v] = True
        events.append((len(events), v, old, color[v], i))
    return events, color


def classify_reference(e, inp: RunInput):
    """Definition-level edge classification: (degenerate, set of qualifying dominating colors)."""
    n = len(e)
    free = [v for v in e if inp.sigma[v] <= inp.p]
    degenerate = 2 * len(free) >= n
    qual = set()
    for i in range(inp.r):
        ok = True
        for v in e:
            c = inp.c0[v]
            if inp.sigma[v] <= inp.p:
                ok &= c in (i, (i - 1) % inp.r)
            else:
                ok &= c == i
        if ok:
            qual.add(i)
    return degenerate, qual


def random_simple(n: int, seed: int, edges: int = 12, cap: int = 8, vertices: int | None = None) -> Hypergraph:
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gen_random_simple(n, vertices or 3 * n + 4, edges, cap, seed).hypergraph


@st.composite
def small_hypergraphs(draw, max_n: int = 5, max_vertices: int = 9, max_edges: int = 7):
    """Arbitrary (not necessarily simple) n-uniform hypergraphs."""
    n = draw(st.integers(2, max_n))
    V = draw(st.integers(n, max(n, max_vertices)))
    pool = st.lists(st.integers(0, V - 1), min_size=n, max_size=n, unique=True).map(lambda e: tuple(sorted(e)))
    edges = draw(st.lists(pool, max_size=max_edges, unique=True))
    return Hypergraph(n, V, tuple(edges))


@st.composite
def runs(draw, simple: bool = False):
    """A hypergraph together with a valid run input."""
    if simple:
        n = draw(st.integers(3, 6))
        h = random_simple(n, draw(st.integers(0, 10**6)), edges=draw(st.integers(1, 14)))
    else:
        h = draw(small_hypergraphs(max_n=4))
    r = draw(st.integers(2, 3))
    p = draw(st.sampled_from([0.1, 0.3, 0.49, 0.8]))
    c0 = draw(st.lists(st.integers(0, r - 1), min_size=h.vertex_count, max_size=h.vertex_count))
    sigma = draw(st.permutations(range(1, h.vertex_count + 1)))
    inp = RunInput(r, p, tuple(c0), tuple(s / h.vertex_count for s in sigma))
    return h, inp


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def record(label: str, ok: bool, detail: str) -> None:
    """Store one pass/fail line for the end-of-session summary and echo it."""
    line = f"[{label}] {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
