from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threshprod.eigen import eigenvalues
from threshprod.errors import IndexOutOfRange, InvalidEntry, PreconditionViolated
from threshprod.graphs import cycle_graph, random_bipartite_regular, random_regular
from threshprod.product import bgp, gp, sgp
from threshprod.spectral import (
    BIPARTITE,
    NONBIPARTITE,
    GpEigenBasis,
    alpha,
    bgp_third_eigenvalue_exact,
    eigenvector_check,
    gp_eigenvalue,
    gp_spectrum,
    lambda_bgp,
    lambda_bgp_sweep,
    lambda_bounds,
    lambda_gp,
    lambda_gp_sweep,
    psi,
)
from strategies import regular_graphs

kt = st.integers(1, 3).flatmap(lambda k: st.tuples(st.just(k), st.integers(1, k)))


def connected_bipartite(h, d, seed):
    return random_bipartite_regular(2 * h, d, seed=seed, connected=True)


def test_alpha_values():
    assert alpha(2, 1) == Fraction(3, 2)
    assert alpha(3, 1) == Fraction(7, 3)
    assert alpha(3, 2) == Fraction(4, 3)
    assert alpha(4, 4) == 1


def test_psi_values():
    assert psi(1, (1, 0, -1), 10, 3) == 18
    assert psi(2, (1, 0, -1), 10, 3) == 6
    assert psi(1, (1, -1), 10, 3, BIPARTITE) == 6
    with pytest.raises(InvalidEntry):
        psi(1, (1, 0), 10, 3, BIPARTITE)
    with pytest.raises(IndexOutOfRange):
        psi(5, (1, 0), 10, 3)


@given(regular_graphs(max_n=7), kt)
def test_gp_spectrum_formula_vs_oracle(g, kt_):
    k, t = kt_
    formula = gp_spectrum(GpEigenBasis.from_graph(g), k, t)
    assert eigenvalues(gp(g, k, t).adj).matches(formula, 1e-6)


@given(st.integers(2, 4), st.integers(0, 10**6), kt)
def test_sgp_spectrum_formula_vs_oracle(h, seed, kt_):
    k, t = kt_
    g = connected_bipartite(h, 2, seed)
    formula = gp_spectrum(GpEigenBasis.from_graph(g, BIPARTITE), k, t)
    assert eigenvalues(sgp(g, k, t).adj).matches(formula, 1e-6)


@given(st.integers(3, 5), st.integers(0, 10**6), kt)
def test_bgp_third_eigenvalue(h, seed, kt_):
    k, t = kt_
    g = connected_bipartite(h, 2, seed)
    oracle = eigenvalues(bgp(g, k, t).adj).kth_largest_abs(3)
    basis = GpEigenBasis.from_graph(g, BIPARTITE)
    assert float(lambda_bgp(basis, k, t)) == pytest.approx(oracle, abs=1e-6)
    assert float(lambda_bgp(basis, k, t)) == pytest.approx(lambda_bgp_sweep(basis, k, t), abs=1e-9)


@given(regular_graphs(max_n=8), st.integers(1, 3))
def test_tensor_collapse(g, k):
    basis = GpEigenBasis.from_graph(g)
    lam = basis.lambda_g()
    value = lambda_gp(basis, k, k)
    if isinstance(lam, int):
        assert value == lam * g.d ** (k - 1)
    else:
        assert float(value) == pytest.approx(lam * g.d ** (k - 1), abs=1e-8)


@given(regular_graphs(max_n=7), kt)
def test_exact_lambda_equals_sweep(g, kt_):
    # Λ at i* is the largest nontrivial |Λ| when d ≤ (n−1)/2
    k, t = kt_
    if 2 * g.d > g.n - 1:
        return
    basis = GpEigenBasis.from_graph(g)
    assert float(lambda_gp(basis, k, t)) == pytest.approx(lambda_gp_sweep(basis, k, t), abs=1e-8)


@given(st.sampled_from([(8, 1), (8, 2), (10, 2), (10, 4), (12, 3)]), st.integers(0, 10**6), kt)
def test_gp_bounds_contain_lambda(nd, seed, kt_):
    n, d = nd
    k, t = kt_
    g = random_regular(n, d, seed=seed)
    b = lambda_bounds(g, k, t, "gp")
    assert b.condition_met
    assert b.contains(lambda_gp(g, k, t))
    if t == k:
        assert b.lower == b.upper


@given(st.integers(0, 10**6), kt)
def test_bgp_bounds_contain_lambda(seed, kt_):
    k, t = kt_
    g = connected_bipartite(6, 3, seed)
    b = lambda_bounds(g, k, t, "bgp")
    assert b.condition_met and b.contains(lambda_bgp(g, k, t))


def test_bounds_precondition():
    g = random_regular(6, 4, seed=0)
    assert not lambda_bounds(g, 2, 1).condition_met
    with pytest.raises(PreconditionViolated):
        lambda_bounds(g, 2, 1, strict=True)


def test_eigenvectors_are_tensor_products():
    g = random_regular(6, 2, seed=5)
    basis = GpEigenBasis.from_graph(g, with_vectors=True)
    p = gp(g, 2, 1)
    for idx in [(1, 1), (2, 1), (3, 5), (6, 6)]:
        assert eigenvector_check(basis, idx, p) < 1e-8
    hb = GpEigenBasis.from_graph(cycle_graph(8, bipartite=True), BIPARTITE, with_vectors=True)
    s = sgp(cycle_graph(8, bipartite=True), 2, 1)
    for idx in [(1, 8), (2, 3), (8, 8)]:
        assert eigenvector_check(hb, idx, s) < 1e-8


def test_basis_companions():
    basis = GpEigenBasis.from_values(4, 1, [1, 1, -1, -1])
    assert basis.lambda_stars == (2, -2, 0, 0)
    assert gp_eigenvalue(basis, (1, 1), 2, 2) == 1
    hb = GpEigenBasis.from_values(4, 1, [1, 1, -1, -1], BIPARTITE)
    assert hb.lambda_stars == (1, -1, 1, -1)
    assert bgp_third_eigenvalue_exact(hb, 2, 2, 1) == 1  # λ2 · Ψ_{1,(−1)} = 1 · (n/2 − d)
    with pytest.raises(IndexOutOfRange):
        bgp_third_eigenvalue_exact(hb, 4, 2, 1)
    assert NONBIPARTITE != BIPARTITE
