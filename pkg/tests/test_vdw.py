from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgrecolor.engine import verify_proper
from hgrecolor.errors import ResourceError
from hgrecolor.vdw import (
    APHypergraphSpec,
    ap_edge_count,
    bound_vs_exact_table,
    generate_ap_hypergraph,
    has_proper_coloring,
    validate_ap_props,
    vdw_exact,
    vdw_randomized,
)


def _aps(n, M):
    """Progressions by brute force over n-subsets of 1..M."""
    out = set()
    for s in combinations(range(1, M + 1), n):
        d = s[1] - s[0]
        if all(s[k + 1] - s[k] == d for k in range(n - 1)):
            out.add(s)
    return out


@pytest.mark.parametrize("n,M", [(3, 1), (3, 2), (3, 3), (3, 12), (4, 15), (5, 17)])
def test_ap_edges_match_subset_scan(n, M):
    h = generate_ap_hypergraph(n, M)
    labelled = {tuple(h.labels[v] for v in e) for e in h.edges}
    assert labelled == _aps(n, M)
    assert h.edge_count == ap_edge_count(n, M) == len(labelled)


def test_ap_edge_order_is_by_difference_then_start():
    h = generate_ap_hypergraph(3, 6)
    diffs = [(e[1] - e[0], e[0]) for e in h.edges]
    assert diffs == sorted(diffs)


def test_spec_validation():
    with pytest.raises(ValueError):
        APHypergraphSpec(2, 10)
    with pytest.raises(ValueError):
        APHypergraphSpec(3, -1)


def _props_oracle(n, M):
    h = generate_ap_hypergraph(n, M)
    E = [set(e) for e in h.edges]
    m = len(E)
    vdeg = max((sum(v in e for e in E) for v in range(M)), default=0)
    codeg = max((sum(u in e and v in e for e in E) for u, v in combinations(range(M), 2)), default=0)
    heavy = max((sum(1 for j in range(m) if j != i and len(E[i] & E[j]) >= 2) for i in range(m)), default=0)
    edeg = max((sum(1 for j in range(m) if j != i and E[i] & E[j]) for i in range(m)), default=0)
    long_pairs = [(i, j) for i in range(m) for j in range(m) if i != j and 2 * len(E[i] & E[j]) > n]
    best = 0
    for v1 in range(M):
        for v2 in range(M):
            if v1 != v2:
                best = max(best, sum(1 for i, j in long_pairs if v1 in E[i] and v2 in E[j]))
    return vdeg, codeg, heavy, best, edeg


@pytest.mark.parametrize("n,M", [(3, 10), (3, 19), (4, 17), (5, 16)])
def test_props_match_brute_force(n, M):
    rep = validate_ap_props(n, M)
    assert (rep.max_vertex_degree, rep.max_codegree, rep.max_heavy_neighbours,
            rep.max_long_overlap_pairs, rep.max_edge_degree) == _props_oracle(n, M)


def test_props_cap_and_empty():
    with pytest.raises(ResourceError):
        validate_ap_props(3, 501)
    assert validate_ap_props(3, 2).ok


def test_props_long_overlap_exceeds_stated_bound_for_n3():
    # (37, 40, 43) and (37, 43, 49) share two of three vertices with different differences
    rep = validate_ap_props(3, 85)
    assert rep.max_long_overlap_pairs == 21
    assert not rep.checks["long_overlap_pairs_le_(3n/2)^2"]


def _brute_force_W(n, r):
    M = 1
    while True:
        edges = _aps(n, M)
        if not any(all(len({c[v - 1] for v in e}) > 1 for e in edges) for c in product(range(r), repeat=M)):
            return M
        M += 1


def test_exact_matches_exhaustive_enumeration_w32():
    # 2^M colorings checked directly up to M = 9
    assert _brute_force_W(3, 2) == 9
    res = vdw_exact(3, 2)
    assert res.complete and res.exact_value == 9 and res.M == 8


@pytest.mark.parametrize("n,r,W", [(3, 2, 9), (4, 2, 35), (3, 3, 27)])
def test_exact_values(n, r, W):
    res = vdw_exact(n, r)
    assert res.exact_value == W
    assert verify_proper(generate_ap_hypergraph(n, W - 1), res.witness).proper
    assert has_proper_coloring(n, r, W)[0] is False


def test_has_proper_coloring_witness():
    ok, witness, _ = has_proper_coloring(3, 2, 8)
    assert ok and verify_proper(generate_ap_hypergraph(3, 8), witness).proper


def test_budget_exhaustion_is_partial():
    res = vdw_exact(3, 3, max_nodes=200)
    assert not res.complete and res.exact_value is None
    assert res.lower_bound == res.M
    with pytest.raises(ResourceError):
        has_proper_coloring(3, 3, 27, max_nodes=100)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 12), st.integers(0, 1000))
def test_randomized_witness_verifies(M, seed):
    res = vdw_randomized(3, 2, M, 30, seed=seed)
    if res.witness is not None:
        assert verify_proper(generate_ap_hypergraph(3, M), res.witness).proper
    if M >= 9:
        assert res.successes == 0


def test_randomized_threads_independent():
    a = vdw_randomized(3, 2, 8, 50, seed=4, threads=1)
    b = vdw_randomized(3, 2, 8, 50, seed=4, threads=2)
    assert a == b and a.successes > 0


def test_result_serialisation():
    d = vdw_exact(3, 2).to_dict()
    assert d["exact_value"] == 9 and isinstance(d["witness"], list)
    row = vdw_randomized(3, 2, 8, 10, seed=0).csv_row()
    assert set(row) == {"n", "r", "M", "trials", "successes", "success_rate"}


def test_bound_vs_exact_table():
    rows = bound_vs_exact_table([(3, 2), (4, 2)])
    assert [r["W"] for r in rows] == [9, 35]
    assert all(r["consistent"] for r in rows)
