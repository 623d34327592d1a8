from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threshprod.eigen import eigenvalues
from threshprod.errors import IndexOutOfRange, PremiseNotMet
from threshprod.graphs import complete_graph, random_bipartite_regular, random_regular
from threshprod.mixing import (
    edge_count,
    eml_check,
    expected_edges,
    jumbledness_scan,
    relative_error_report,
    reports_to_csv,
    sample_pairs,
)
from threshprod.product import bgp, gp
from threshprod.spectral import lambda_bounds
from strategies import bipartite_graphs, regular_graphs


def test_ordered_pair_convention():
    k2 = complete_graph(2)
    assert edge_count(k2, [0, 1], [0, 1]) == 2
    assert edge_count(k2, [0], [1]) == 1
    assert expected_edges(3, 10, 2, 5) == Fraction(3)
    assert expected_edges(3, 10, 2, 5, bipartite=True) == Fraction(6)
    with pytest.raises(IndexOutOfRange):
        edge_count(k2, [2], [0])


@given(regular_graphs(max_n=10), st.data())
def test_eml_with_own_lambda(g, data):
    lam = eigenvalues(g.adj).nontrivial_lambda()
    S = data.draw(st.lists(st.integers(0, g.n - 1), min_size=1, unique=True))
    T = data.draw(st.lists(st.integers(0, g.n - 1), min_size=1, unique=True))
    assert eml_check(g.adj, S, T, lam).passed


@given(bipartite_graphs(max_half=6, min_d=1), st.data())
def test_bipartite_eml_with_own_lambda(g, data):
    lam = eigenvalues(g.adj).nontrivial_lambda(bipartite=True)
    h = g.half
    S = data.draw(st.lists(st.integers(0, h - 1), min_size=1, unique=True))
    T = data.draw(st.lists(st.integers(h, g.n - 1), min_size=1, unique=True))
    assert eml_check(g.adj, S, T, lam, bipartite=True).passed


def test_bipartite_mode_rejects_wrong_sides():
    p = bgp(random_bipartite_regular(8, 2, seed=1), 2, 1)
    with pytest.raises(ValueError):
        eml_check(p, [p.N - 1], [0], 10.0)


def test_scan_against_corollary_bound():
    g = random_regular(10, 3, seed=2)
    p = gp(g, 2, 1)
    bound = float(lambda_bounds(g, 2, 1).upper)
    res = jumbledness_scan(p, bound, samples=300, seed=1)
    assert res.passed and res.failures == 0
    assert 0 < res.max_ratio <= 1
    assert reports_to_csv(res.reports[:2]).splitlines()[0] == "size_s,size_t,e,mu,bound,ratio,pass"


def test_scan_detects_too_small_lambda():
    p = gp(random_regular(10, 3, seed=2), 2, 1)
    assert not jumbledness_scan(p, 1e-3, samples=50, seed=1).passed


def test_sampling_is_deterministic():
    a = sample_pairs(30, 20, seed=[7, 1])
    b = sample_pairs(30, 20, seed=[7, 1])
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    S, T = sample_pairs(30, 20, seed=3, bipartite=True)
    assert not S[:, 15:].any() and not T[:, :15].any()


def test_application_bound():
    g = random_regular(10, 4, seed=0)
    lam = eigenvalues(g.adj).nontrivial_lambda()
    assert lam <= 4
    rep = relative_error_report(gp(g, 2, 1), 0.75, 4, lam, samples=100, seed=5)
    assert rep.xi_premise and rep.passed


def test_application_needs_expander_base():
    with pytest.raises(PremiseNotMet):
        relative_error_report(np.zeros((4, 4)), 0.5, 1, 3.0)
