import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threshprod.errors import InfeasibleDegree, NotBipartite, NotRegular, NotSimple, NotSymmetric, ValidationError
from threshprod.graphs import (
    BipartiteGraph,
    BipartiteRegularGraph,
    bipartite_complement,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    format_edgelist,
    from_edges,
    lambda_of,
    parse_edgelist,
    random_bipartite_regular,
    random_regular,
    validate,
)
from strategies import bipartite_graphs, regular_graphs


@given(regular_graphs())
def test_random_regular_is_simple_regular(g):
    a = g.adj
    assert (a == a.T).all() and not a.diagonal().any()
    assert (a.sum(axis=1) == g.d).all()


@given(bipartite_graphs())
def test_random_bipartite_is_balanced_regular(g):
    h = g.half
    assert not g.adj[:h, :h].any() and not g.adj[h:, h:].any()
    assert (g.adj.sum(axis=1) == g.d).all()


def test_generators_are_seeded():
    assert np.array_equal(random_regular(10, 3, seed=4).adj, random_regular(10, 3, seed=4).adj)
    assert np.array_equal(random_bipartite_regular(12, 3, seed=4).adj, random_bipartite_regular(12, 3, seed=4).adj)


def test_connected_generation():
    for seed in range(5):
        assert random_regular(10, 3, seed=seed, connected=True).is_connected()
        assert random_bipartite_regular(12, 2, seed=seed, connected=True).is_connected()


def test_infeasible_parameters():
    with pytest.raises(InfeasibleDegree):
        random_regular(5, 3)
    with pytest.raises(InfeasibleDegree):
        random_regular(4, 4)
    with pytest.raises(InfeasibleDegree):
        random_bipartite_regular(7, 2)
    with pytest.raises(InfeasibleDegree):
        random_bipartite_regular(8, 5)


def test_validation_errors():
    with pytest.raises(NotSimple):
        validate(np.eye(2, dtype=bool))
    with pytest.raises(NotSymmetric):
        validate(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NotRegular):
        from_edges(3, [(0, 1)])
    with pytest.raises(NotBipartite):
        validate(complete_graph(3).adj, bipartite=True)
    with pytest.raises(ValidationError):
        validate(np.array([[0, 2], [2, 0]]))


def test_named_graphs():
    assert complete_graph(4).d == 3
    assert cycle_graph(6, bipartite=True).d == 2
    k = complete_bipartite(2)
    assert isinstance(k, BipartiteRegularGraph) and k.d == 2
    assert lambda_of(complete_graph(5)) == pytest.approx(1.0)


def test_bipartite_complement_involution():
    g = random_bipartite_regular(10, 2, seed=3)
    gc = bipartite_complement(g)
    assert gc.d == 3
    assert np.array_equal(bipartite_complement(gc).adj, g.adj)


def test_bipartite_relabelled_into_blocks():
    # C6 given with interleaved sides; validation reorders into X then Y
    g = from_edges(6, [(i, (i + 1) % 6) for i in range(6)], bipartite=True)
    assert isinstance(g, BipartiteRegularGraph)
    assert not g.adj[:3, :3].any()


def test_irregular_bipartite_base():
    g = from_edges(4, [(0, 2)], bipartite=True, regular=False)
    assert isinstance(g, BipartiteGraph) and g.d is None
    assert list(g.degrees()) == [1, 0, 1, 0]
    text = format_edgelist(g)
    assert text.splitlines()[0] == "4 - bipartite"
    back = parse_edgelist(text)
    assert back.same_as(g)


@given(regular_graphs(), st.booleans())
def test_edgelist_roundtrip(g, with_comment):
    text = format_edgelist(g, ["seed 1"] if with_comment else [])
    assert parse_edgelist(text).same_as(g)


def test_edgelist_errors():
    with pytest.raises(ValidationError):
        parse_edgelist("4 x\n0 1\n")
    with pytest.raises(ValidationError):
        parse_edgelist("4 -\n0 1\n")
    with pytest.raises(ValidationError):
        parse_edgelist("2 1\n0 a\n")
