import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threshprod.cospectral import (
    COSPECTRAL,
    NOT_COSPECTRAL,
    ConnectivityVector,
    closed_four_walks,
    connectivity_multiset,
    cospectral_certify,
    cospectral_family,
    count_walks_enumerate,
    count_walks_trace,
    exact_traces,
    nonisomorphism_witness,
    verify_walk_lemma,
)
from threshprod.errors import BudgetExceeded, SizeMismatch
from threshprod.graphs import complete_bipartite, cycle_graph, from_edges, random_bipartite_regular, random_regular
from threshprod.product import Template, template_classes
from strategies import bipartite_graphs

patterns = st.integers(1, 6).flatmap(lambda l: st.lists(st.integers(0, 1), min_size=l, max_size=l))


def test_small_walk_counts():
    k22 = complete_bipartite(2)
    assert count_walks_trace(k22, (1, 1)) == 4
    assert count_walks_enumerate(k22, (1, 1)) == 4
    assert count_walks_trace(k22, (0, 0)) == 0  # complete base: empty complement
    assert count_walks_trace(k22, (1, 1, 1)) == 0


@given(bipartite_graphs(max_half=4), patterns, st.sampled_from("XY"))
def test_trace_equals_enumeration(g, u, side):
    assert count_walks_trace(g, u, side) == count_walks_enumerate(g, u, side)


@given(bipartite_graphs(max_half=5), patterns)
def test_walk_identity_and_shift(g, u):
    x = count_walks_trace(g, u, "X")
    assert x == count_walks_trace(g, u, "Y")
    # shifting the pattern by one step moves the start to the other side
    assert x == count_walks_trace(g, u[1:] + u[:1], "Y")


def test_raw_star_never_violates():
    # K_{1,3} with parts {centre} / {leaves} is complete bipartite, so Ā = 0 and
    # closed walks from either side are the same cycles read from another start
    a = np.zeros((4, 4), dtype=bool)
    a[0, 1:] = a[1:, 0] = True
    rep = verify_walk_lemma(a, 6, x_mask=np.array([True, False, False, False]))
    assert rep.holds and rep.methods_agree


def test_irregular_padded_star_violates():
    a = np.zeros((6, 6), dtype=bool)
    a[0, 3:] = a[3:, 0] = True
    rep = verify_walk_lemma(a, 4, x_mask=np.array([True] * 3 + [False] * 3))
    assert not rep.holds and rep.methods_agree


def test_enumeration_budget():
    with pytest.raises(BudgetExceeded):
        count_walks_enumerate(complete_bipartite(3), (1,) * 10)


def test_exact_traces_match_integer_powers():
    for g in (random_regular(12, 5, seed=1), random_bipartite_regular(14, 3, seed=2)):
        a = g.adj.astype(object)
        m = np.eye(g.n, dtype=object)
        expect = []
        for _ in range(20):
            m = m @ a
            expect.append(int(np.trace(m)))
        assert exact_traces(g.adj, 20) == expect


def test_certify_separates_c6_from_two_triangles():
    c6 = cycle_graph(6)
    two_c3 = from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    v = cospectral_certify(c6, two_c3)
    assert v.verdict == NOT_COSPECTRAL and v.first_mismatch == 3 and v.consistent
    with pytest.raises(SizeMismatch):
        cospectral_certify(c6, cycle_graph(8))


def test_certify_relabelled_graph():
    g = random_regular(10, 3, seed=4)
    perm = np.random.default_rng(0).permutation(10)
    v = cospectral_certify(g, g.permuted(perm))
    assert v.verdict == COSPECTRAL and v.method == "exact traces l=1..10"


def test_certify_large_graph_uses_fallback():
    g = random_regular(140, 3, seed=1)
    v = cospectral_certify(g, g.permuted(np.arange(140)[::-1]))
    assert v.cospectral and v.ell_checked == 50 and "float spectrum" in v.method


def test_closed_four_walks():
    g = random_regular(8, 3, seed=2)
    a = g.adj.astype(np.int64)
    assert np.array_equal(closed_four_walks(g), np.diag(np.linalg.matrix_power(a, 4)))
    assert not nonisomorphism_witness(g, g).found
    w = nonisomorphism_witness(cycle_graph(6), from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]))
    assert not w.found  # both 2-regular: diag(A^4) does not see triangles


@pytest.mark.parametrize("k,t", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_template_family_cospectral(k, t):
    g = random_bipartite_regular(8, 2, seed=3)
    rep = cospectral_family(g, k, t)
    assert rep.all_cospectral
    assert len(rep.members) == 2 ** (k - 1)
    assert all(c.consistent for c in rep.certificates.values())


@given(bipartite_graphs(max_half=3, min_d=1), st.sampled_from([2, 4]))
def test_connectivity_multisets_agree_across_templates(g, ell):
    counts = [connectivity_multiset(g, 2, 1, tau, ell) for tau in template_classes(2)]
    assert all(c == counts[0] for c in counts)
    if ell == 2:
        assert all(v.c[0] == v.c[1] for v in counts[0])


def test_connectivity_multiset_restricts_to_walk_counts():
    g = random_bipartite_regular(8, 2, seed=1)
    ms = connectivity_multiset(g, 1, 1, Template.parse("X"), 4)
    for u in itertools.product((0, 1), repeat=4):
        assert ms.get(ConnectivityVector(u, 1), 0) == count_walks_trace(g, u)
    assert connectivity_multiset(g, 1, 1, "X", 3) == {}
    assert ConnectivityVector((2, 1), 2).is_walk(1) and not ConnectivityVector((2, 1), 2).is_walk(2)
