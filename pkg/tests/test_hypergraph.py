import json
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hgrecolor.errors import DegeneracyError, HypergraphError
from hgrecolor.hypergraph import (
    FANO_LINES,
    Hypergraph,
    PartialGenerationWarning,
    check_simple,
    codegree,
    degree_profile,
    gen_named,
    gen_random_simple,
    load_hypergraph,
    save_hypergraph,
    trim,
)

from conftest import small_hypergraphs


def test_edges_are_canonicalised_and_keep_order():
    h = Hypergraph(3, 5, ((4, 0, 2), (1, 3, 2)))
    assert h.edges == ((0, 2, 4), (1, 2, 3))
    assert h.incidence[2] == (0, 1)


@pytest.mark.parametrize(
    "edges, idx",
    [
        (((0, 1),), 0),
        (((0, 1, 1),), 0),
        (((0, 1, 2), (0, 1, 7)), 1),
        (((0, 1, 2), (2, 1, 0)), 1),
        (((-1, 1, 2),), 0),
    ],
)
def test_malformed_edges_report_their_index(edges, idx):
    with pytest.raises(HypergraphError) as info:
        Hypergraph(3, 5, edges)
    assert info.value.edge_index == idx


def test_labels_must_match_vertex_count():
    with pytest.raises(HypergraphError):
        Hypergraph(3, 3, ((0, 1, 2),), labels=(1, 2))


@given(small_hypergraphs())
def test_dict_round_trip(h):
    again = Hypergraph.from_dict(json.loads(json.dumps(h.to_dict())))
    assert again == h and again.edges == h.edges


def test_arbitrary_labels_are_normalised():
    h = Hypergraph.from_dict({"n": 2, "edges": [["a", "b"], ["b", "c"]]})
    assert h.vertex_count == 3 and h.labels == ("a", "b", "c")
    assert h.edges == ((0, 1), (1, 2))


def test_save_load(tmp_path):
    h = gen_named("fano")
    path = tmp_path / "h.json"
    save_hypergraph(h, path)
    assert load_hypergraph(path) == h


@given(small_hypergraphs())
def test_simplicity_matches_pairwise_scan(h):
    bad = [
        (i, j, len(set(a) & set(b)))
        for (i, a), (j, b) in combinations(enumerate(h.edges), 2)
        if len(set(a) & set(b)) >= 2
    ]
    rep = check_simple(h)
    assert rep.is_simple == (not bad)
    assert list(rep.violations) == sorted(bad)


@given(small_hypergraphs())
def test_degree_profile_matches_pairwise_oracle(h):
    prof = degree_profile(h)
    for i, a in enumerate(h.edges):
        meets = sum(1 for j, b in enumerate(h.edges) if j != i and set(a) & set(b))
        assert prof.per_edge_degrees[i] == meets
    for v in range(h.vertex_count):
        assert prof.per_vertex_degrees[v] == sum(v in e for e in h.edges)
    assert prof.max_edge_degree == max(prof.per_edge_degrees, default=0)


@given(small_hypergraphs(), st.data())
def test_codegree(h, data):
    u = data.draw(st.integers(0, h.vertex_count - 1))
    v = data.draw(st.integers(0, h.vertex_count - 1).filter(lambda x: x != u))
    assert codegree(h, u, v) == sum(u in e and v in e for e in h.edges)


def test_codegree_rejects_equal_vertices():
    with pytest.raises(ValueError):
        codegree(gen_named("fano"), 1, 1)


def test_trim_drops_max_degree_vertex():
    h = Hypergraph(3, 7, ((0, 1, 2), (0, 3, 4), (2, 5, 6)))
    t = trim(h)
    assert t.n == 2
    # vertex 0 (degree 2) leaves the first two edges, vertex 2 the third
    assert t.edges == ((1, 2), (3, 4), (5, 6))


def test_trim_duplicate_raises():
    h = Hypergraph(3, 12, ((0, 1, 2), (1, 2, 3), (0, 4, 5), (0, 6, 7), (3, 8, 9), (3, 10, 11)))
    with pytest.raises(DegeneracyError):
        trim(h)


def test_trim_needs_n3():
    with pytest.raises(ValueError):
        trim(Hypergraph(2, 3, ((0, 1),)))


@pytest.mark.filterwarnings("ignore::hgrecolor.hypergraph.PartialGenerationWarning")
@settings(max_examples=30, deadline=None)
@given(st.integers(3, 6), st.integers(0, 10**6), st.integers(1, 10))
def test_random_simple_respects_constraints(n, seed, cap):
    res = gen_random_simple(n, 4 * n, 10, cap, seed, attempt_factor=50)
    h = res.hypergraph
    assert check_simple(h).is_simple
    assert degree_profile(h).max_edge_degree <= cap
    assert res.complete == (h.edge_count == 10)


def test_random_simple_is_deterministic():
    a = gen_random_simple(4, 30, 15, 6, 7).hypergraph
    b = gen_random_simple(4, 30, 15, 6, 7).hypergraph
    assert a == b and a.edges == b.edges


def test_random_simple_partial_warns():
    with pytest.warns(PartialGenerationWarning):
        res = gen_random_simple(3, 6, 50, 10, 0, attempt_factor=5)
    assert not res.complete


def test_fano_plane():
    h = gen_named("fano")
    assert h.edges == FANO_LINES
    for u, v in combinations(range(7), 2):
        assert codegree(h, u, v) == 1
    assert degree_profile(h).max_edge_degree == 6


@pytest.mark.parametrize("n", [3, 4, 5])
def test_named_shapes(n):
    path = gen_named("path(4)", n)
    assert degree_profile(path).per_edge_degrees == (1, 2, 2, 1)
    star = gen_named("star(3)", n)
    assert star.degree(0) == 3 and check_simple(star).is_simple
    assert degree_profile(gen_named("disjoint(3)", n)).max_edge_degree == 0
    tri = gen_named("triangle", n)
    assert check_simple(tri).is_simple and degree_profile(tri).per_edge_degrees == (2, 2, 2)
    assert gen_named("complete_small", n).edge_count == (n + 2) * (n + 1) // 2


def test_unknown_name():
    with pytest.raises(KeyError):
        gen_named("petersen")
