import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from threshprod.eigen import Spectrum, eigenvalues, eigh, jacobi_eigh
from threshprod.errors import CapExceeded, NotSymmetric


def sym_matrices(max_n=9):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.floats(-10, 10, allow_nan=False), min_size=n * n, max_size=n * n).map(
            lambda xs: (lambda m: (m + m.T) / 2)(np.array(xs).reshape(n, n))
        )
    )


@given(sym_matrices())
def test_jacobi_matches_lapack(m):
    vals, vecs = jacobi_eigh(m)
    assert np.allclose(np.sort(vals), np.linalg.eigvalsh(m), atol=1e-9)
    assert np.allclose(vecs @ np.diag(vals) @ vecs.T, m, atol=1e-8)
    assert np.allclose(vecs.T @ vecs, np.eye(len(m)), atol=1e-9)


def test_known_spectra():
    k4 = np.ones((4, 4)) - np.eye(4)
    assert eigenvalues(k4).matches([3, -1, -1, -1], 1e-10)
    c6 = np.roll(np.eye(6), 1, axis=1) + np.roll(np.eye(6), -1, axis=1)
    expect = [2 * np.cos(2 * np.pi * j / 6) for j in range(6)]
    assert eigenvalues(c6).matches(expect, 1e-10)


def test_large_matrix_uses_lapack_and_agrees():
    rng = np.random.default_rng(0)
    m = rng.normal(size=(200, 200))
    m = m + m.T
    a = eigenvalues(m)
    b = eigenvalues(m[:150, :150], method="jacobi")
    assert a.matches(np.linalg.eigvalsh(m), 1e-9)
    assert b.matches(np.linalg.eigvalsh(m[:150, :150]), 1e-8)


def test_eigh_sorted_descending():
    m = np.diag([1.0, 3.0, 2.0])
    vals, vecs = eigh(m)
    assert list(vals) == [3.0, 2.0, 1.0]
    assert np.allclose(m @ vecs, vecs * vals)


def test_errors():
    with pytest.raises(NotSymmetric):
        eigenvalues(np.array([[0, 1], [0, 0]]))
    with pytest.raises(CapExceeded):
        eigenvalues(np.zeros((5, 5)), cap=4)


def test_spectrum_helpers():
    s = Spectrum([1, -3, 2, 0])
    assert list(s) == [2, 1, 0, -3]
    assert s.nontrivial_lambda() == 3
    assert s.nontrivial_lambda(bipartite=True) == 1
    assert s.kth_largest_abs(2) == 2
    assert s.max_deviation([1, 2]) == float("inf")
    assert Spectrum([2, 0, -2]).is_symmetric()
