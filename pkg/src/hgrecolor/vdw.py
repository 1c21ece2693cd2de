"""Hypergraphs of arithmetic progressions and Van der Waerden numbers.

``H(n, M)`` has vertex set ``1..M`` (stored 0-based, original integers kept
as labels) and one edge per n-term progression with positive difference.
It is r-colorable exactly when ``W(n, r) > M``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import partial

import numpy as np
import scipy.sparse as sp

from ._parallel import parallel_map
from .engine import default_p, run_recolor, sample_input, verify_proper
from .errors import ResourceError
from .hypergraph import Hypergraph
from .locallemma import PAPER_ALPHA, max_admissible_D

__all__ = [
    "APHypergraphSpec",
    "VdWResult",
    "APPropsReport",
    "generate_ap_hypergraph",
    "ap_edge_count",
    "validate_ap_props",
    "vdw_randomized",
    "vdw_exact",
    "has_proper_coloring",
    "bound_vs_exact_table",
]


@dataclass(frozen=True)
class APHypergraphSpec:
    n: int
    M: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("progression length must be >= 3")
        if self.M < 0:
            raise ValueError("M must be non-negative")


def generate_ap_hypergraph(n: int, M: int) -> Hypergraph:
    """All n-term progressions ``a, a+d, ..., a+(n-1)d`` inside ``1..M``, ordered by (d, a)."""
    APHypergraphSpec(n, M)
    edges = []
    for d in range(1, (M - 1) // (n - 1) + 1 if M > 1 else 1):
        for a in range(M - (n - 1) * d):
            edges.append(tuple(a + k * d for k in range(n)))
    return Hypergraph(n, M, tuple(edges), tuple(range(1, M + 1)))


def ap_edge_count(n: int, M: int) -> int:
    """Closed form ``sum_{d>=1} max(0, M - (n-1) d)``."""
    return sum(max(0, M - (n - 1) * d) for d in range(1, M + 1))


@dataclass(frozen=True)
class APPropsReport:
    n: int
    M: int
    edge_count: int
    max_vertex_degree: int
    max_codegree: int
    max_heavy_neighbours: int
    max_long_overlap_pairs: int
    max_edge_degree: int

    @property
    def checks(self) -> dict:
        n, M = self.n, self.M
        return {
            "vertex_degree_le_M": self.max_vertex_degree <= M,
            "codegree_le_n2": self.max_codegree <= n * n,
            "heavy_neighbours_le_n4_half": 2 * self.max_heavy_neighbours <= n**4,
            "long_overlap_pairs_le_(3n/2)^2": 4 * self.max_long_overlap_pairs <= 9 * n * n,
            "edge_degree_lt_nM": self.max_edge_degree < n * M,
        }

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["checks"] = self.checks
        d["ok"] = self.ok
        return d


def _incidence_matrix(h: Hypergraph) -> sp.csr_matrix:
    rows = np.repeat(np.arange(h.edge_count), h.n)
    cols = np.fromiter((v for e in h.edges for v in e), dtype=np.int64, count=h.edge_count * h.n)
    return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(h.edge_count, h.vertex_count))


def _max_offdiag(m: sp.spmatrix) -> int:
    m = sp.coo_matrix(m)
    mask = m.row != m.col
    return int(m.data[mask].max()) if mask.any() else 0


def validate_ap_props(n: int, M: int, cap: int = 500) -> APPropsReport:
    """Brute-force degree, codegree and overlap statistics of ``H(n, M)``.

    ``max_heavy_neighbours``: most other edges meeting one edge in >= 2
    vertices. ``max_long_overlap_pairs``: over vertex pairs v1 != v2, the
    most ordered pairs of distinct edges f1 ∋ v1, f2 ∋ v2 with
    |f1 ∩ f2| > n/2. With v1 = v2 the count grows with M, so the diagonal is
    excluded.
    """
    if M > cap:
        raise ResourceError(f"M={M} exceeds the validation cap {cap}")
    h = generate_ap_hypergraph(n, M)
    if h.edge_count == 0:
        return APPropsReport(n, M, 0, 0, 0, 0, 0, 0)
    A = _incidence_matrix(h)
    vdeg = np.asarray(A.sum(axis=0)).ravel()
    S = (A @ A.T).tocsr()
    edge_deg = np.diff(S.indptr) - 1
    heavy = S.copy()
    heavy.data = (heavy.data >= 2).astype(np.int64)
    heavy.eliminate_zeros()
    heavy_counts = np.diff(heavy.indptr) - 1
    long = S.copy()
    long.data = (2 * long.data > n).astype(np.int64)
    long.setdiag(0)
    long.eliminate_zeros()
    return APPropsReport(
        n=n,
        M=M,
        edge_count=h.edge_count,
        max_vertex_degree=int(vdeg.max()),
        max_codegree=_max_offdiag(A.T @ A),
        max_heavy_neighbours=int(heavy_counts.max()),
        max_long_overlap_pairs=_max_offdiag(A.T @ long @ A),
        max_edge_degree=int(edge_deg.max()),
    )


@dataclass(frozen=True)
class VdWResult:
    mode: str
    n: int
    r: int
    M: int
    successes: int = 0
    trials: int = 0
    witness: tuple | None = None
    exact_value: int | None = None
    complete: bool = True
    nodes: int = 0
    p: float | None = None

    @property
    def lower_bound(self) -> int:
        """A certified ``W(n, r) > lower_bound`` (the largest M with a verified coloring)."""
        if self.exact_value is not None:
            return self.exact_value - 1
        return self.M if self.witness is not None else 0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "n": self.n,
            "r": self.r,
            "M": self.M,
            "successes": self.successes,
            "trials": self.trials,
            "witness": list(self.witness) if self.witness is not None else None,
            "exact_value": self.exact_value,
            "complete": self.complete,
            "nodes": self.nodes,
            "p": self.p,
        }

    def csv_row(self) -> dict:
        rate = self.successes / self.trials if self.trials else None
        return {"n": self.n, "r": self.r, "M": self.M, "trials": self.trials,
                "successes": self.successes, "success_rate": rate}


def _trial(t, h, r, p, seed):
    inp = sample_input(h, r, p, (seed, t))
    tr = run_recolor(h, inp)
    return tr.final_coloring if tr.proper else None


def vdw_randomized(n: int, r: int, M: int, trials: int, p: float | None = None, seed: int = 0,
                   threads: int = 1) -> VdWResult:
    """Run the recoloring algorithm on ``H(n, M)`` from ``trials`` random inputs.

    The witness is the final coloring of the lowest-indexed successful trial,
    re-verified on a freshly generated ``H(n, M)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if p is None:
        p = default_p(n)
    h = generate_ap_hypergraph(n, M)
    outs = parallel_map(partial(_trial, h=h, r=r, p=p, seed=seed), range(trials), threads)
    wins = [c for c in outs if c is not None]
    witness = wins[0] if wins else None
    if witness is not None and not verify_proper(generate_ap_hypergraph(n, M), witness).proper:
        raise AssertionError("randomized witness failed re-verification")
    return VdWResult("randomized", n, r, M, successes=len(wins), trials=trials, witness=witness, p=p)


def _ap_masks(n: int, length: int) -> list[list[int]]:
    """``masks[m]``: bitmasks of the n-1 earlier positions of each progression ending at m."""
    return [
        [sum(1 << (m - k * d) for k in range(1, n)) for d in range(1, m // (n - 1) + 1)]
        for m in range(length)
    ]


def _search(n: int, r: int, depth_limit: int, max_nodes: int | None, deadline: float | None):
    """Depth-first search over colorings of 1, 2, ... avoiding monochromatic progressions.

    Colors are introduced in order (the first use of color c comes after the
    first use of c-1), which removes the r! color permutations. Returns
    ``(longest valid coloring, nodes visited, exhausted)``.
    """
    masks = _ap_masks(n, depth_limit)
    color_masks = [0] * r
    seq: list[int] = []
    best: list[int] = []
    stack = [0]
    nodes = 0
    used = 0
    while stack:
        m = len(seq)
        c = stack[-1]
        if c >= min(r, used + 1) or m >= depth_limit:
            stack.pop()
            if seq:
                old = seq.pop()
                color_masks[old] &= ~(1 << (m - 1))
                used = max(seq) + 1 if seq else 0
            continue
        stack[-1] = c + 1
        cm = color_masks[c]
        if any(cm & a == a for a in masks[m]):
            continue
        nodes += 1
        if (max_nodes is not None and nodes > max_nodes) or (
            deadline is not None and nodes % 4096 == 0 and time.monotonic() > deadline
        ):
            return best, nodes, False
        seq.append(c)
        color_masks[c] |= 1 << m
        if c == used:
            used += 1
        if len(seq) > len(best):
            best = list(seq)
        stack.append(0)
    return best, nodes, True


def has_proper_coloring(n: int, r: int, M: int, max_nodes: int | None = None):
    """Exhaustively decide whether ``1..M`` has an r-coloring without monochromatic n-term progressions.

    Returns ``(answer, witness or None, nodes)``.
    """
    best, nodes, done = _search(n, r, M, max_nodes, None)
    if len(best) >= M:
        return True, tuple(best[:M]), nodes
    if not done:
        raise ResourceError(f"search budget exhausted after {nodes} nodes")
    return False, None, nodes


def vdw_exact(n: int, r: int, max_nodes: int | None = 10**8, time_limit: float | None = None,
              max_length: int = 4096) -> VdWResult:
    """Exact ``W(n, r)`` by exhausting every valid coloring prefix.

    The longest prefix found, of length L, is the witness on ``1..L`` and the
    exhausted search shows no coloring of ``1..L+1`` exists, so ``W = L + 1``.
    If a budget runs out the result is partial: ``complete`` is False,
    ``exact_value`` is None and the witness only certifies ``W > M``.
    """
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    best, nodes, done = _search(n, r, max_length, max_nodes, deadline)
    if len(best) >= max_length:
        done = False
    M = len(best)
    witness = tuple(best)
    if M and not verify_proper(generate_ap_hypergraph(n, M), witness).proper:
        raise AssertionError("exact-search witness failed verification")
    return VdWResult("exact", n, r, M, witness=witness, exact_value=M + 1 if done else None,
                     complete=done, nodes=nodes)


def bound_vs_exact_table(rows, p: float | None = None, max_nodes: int | None = 10**8) -> list[dict]:
    """Compare ``beta * r^(n-1)`` with exact Van der Waerden numbers.

    ``beta`` is the searched constant for progression hypergraphs; the
    ``(2e)^-4`` constant is reported alongside.
    """
    out = []
    for n, r in rows:
        res = max_admissible_D(n, r, p, "ap")
        beta = res.beta if res.D > 0 else 0.0
        exact = vdw_exact(n, r, max_nodes=max_nodes)
        w = exact.exact_value if exact.complete else None
        lower = beta * r ** (n - 1)
        paper_lower = PAPER_ALPHA * r ** (n - 1)
        certified = exact.lower_bound + 1
        out.append({
            "n": n,
            "r": r,
            "beta_searched": beta,
            "lower_bound_searched": lower,
            "lower_bound_paper_constant": paper_lower,
            "W": w,
            "W_at_least": certified,
            "consistent": lower <= certified and paper_lower <= certified,
        })
    return out
