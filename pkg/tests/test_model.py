import numpy as np
import pytest
from hypothesis import given, strategies as st

from delayform import (
    GainVector,
    InvalidParameterError,
    InvalidTopologyError,
    NonDiagonalizableWarning,
    build_feedback_matrices,
    effective_gains,
    laplacian_eigenvalues,
    laplacian_from_adjacency,
    mode_system,
    example_topology,
)

from conftest import assert_multiset_close, COUPLING, EX1, FIG10_P0, FIG10_PBAR, S0


def test_feedback_matrices_fig6d():
    fm = build_feedback_matrices(S0, (0, 0, 0, 0))
    np.testing.assert_array_equal(fm.M, [[0, 1], [-2, -3]])
    np.testing.assert_array_equal(fm.M_tau, [[0, 0], [-1.5, -1.2]])
    assert not fm.P.any() and not fm.P_tau.any()


def test_feedback_matrices_zero_gains():
    fm = build_feedback_matrices((0, 0, 0, 0), (0, 0, 0, 0))
    np.testing.assert_array_equal(fm.M, [[0, 1], [0, 0]])
    for m in (fm.M_tau, fm.P, fm.P_tau):
        assert not m[1].any()


def test_feedback_matrices_coupling_rows():
    fm = build_feedback_matrices(EX1, COUPLING)
    np.testing.assert_array_equal(fm.P[1], [3, 3])
    np.testing.assert_array_equal(fm.P_tau[1], [-0.5, 0])


@pytest.mark.parametrize("bad", [(np.nan, 0, 0, 0), (0, np.inf, 0, 0)])
def test_non_finite_gains_rejected(bad):
    with pytest.raises(InvalidParameterError):
        GainVector.from_sequence(bad)


def test_example_laplacian():
    topo = example_topology()
    np.testing.assert_array_equal(topo.laplacian, [[3, -2, -1], [-2, 3, -1], [-2, -1, 3]])
    ev = laplacian_eigenvalues(topo)
    np.testing.assert_allclose(ev, [0, 4, 5], atol=1e-9)


def test_zero_and_pair_laplacians():
    z = laplacian_from_adjacency(np.zeros((3, 3)))
    assert not z.laplacian.any()
    np.testing.assert_allclose(laplacian_eigenvalues(z), [0, 0, 0], atol=1e-12)
    pair = laplacian_from_adjacency([[0, 1], [1, 0]])
    np.testing.assert_array_equal(pair.laplacian, [[1, -1], [-1, 1]])
    np.testing.assert_allclose(laplacian_eigenvalues(pair), [0, 2], atol=1e-12)


@pytest.mark.parametrize("adj", [[[0, -1], [1, 0]], [[1, 1], [1, 0]], [[0, 1, 0], [1, 0, 1]]])
def test_bad_adjacency(adj):
    with pytest.raises(InvalidTopologyError):
        laplacian_from_adjacency(adj)


def test_defective_laplacian_warns():
    # a directed chain has a Jordan block at zero
    with pytest.warns(NonDiagonalizableWarning):
        laplacian_eigenvalues(laplacian_from_adjacency([[0, 0, 0], [1, 0, 0], [0, 1, 0]]))


def test_mode_system_effective_gains():
    m = mode_system((0, 7, 1.5, -3), (2, 0, 0, 0), 2.0)
    np.testing.assert_allclose(np.asarray(m.gains).real, [4, 7, 1.5, -3])


def test_mode_system_lambda_zero_is_uncoupled():
    fm = build_feedback_matrices(S0)
    m = mode_system(S0, COUPLING, 0.0, 3.0)
    np.testing.assert_array_equal(m.A, fm.M)
    np.testing.assert_array_equal(m.B, fm.M_tau)


def test_mode_system_fig10_at_lambda0():
    m = mode_system(FIG10_P0, FIG10_PBAR, 1.5, 10.0)
    np.testing.assert_allclose(m.B[1], [3, 0])
    np.testing.assert_allclose(m.A[1], [-3, -6])


def test_negative_tau_rejected():
    with pytest.raises(InvalidParameterError):
        mode_system(S0, None, 0.0, -1.0)


gain = st.floats(-10, 10, allow_nan=False)
gains4 = st.tuples(gain, gain, gain, gain)
# strictly positive weights: strongly connected graph, simple zero eigenvalue
weights = st.lists(st.floats(0.1, 5, allow_nan=False), min_size=16, max_size=16)


@given(gains4, gains4, st.floats(-5, 5))
def test_affine_parameter_property(p0, pbar, lam):
    a = mode_system(p0, pbar, lam)
    b = mode_system(effective_gains(p0, pbar, lam).real, None, 0.0)
    np.testing.assert_allclose(a.A, b.A, atol=1e-12)
    np.testing.assert_allclose(a.B, b.B, atol=1e-12)


def _adj(w, n=4):
    a = np.array(w[: n * n]).reshape(n, n)
    np.fill_diagonal(a, 0.0)
    return a


@given(weights, st.permutations(range(4)))
def test_laplacian_rows_and_permutation(w, perm):
    a = _adj(w)
    topo = laplacian_from_adjacency(a)
    assert np.abs(topo.laplacian.sum(axis=1)).max() <= 1e-12
    p = np.array(perm)
    e1 = laplacian_eigenvalues(topo)
    e2 = laplacian_eigenvalues(laplacian_from_adjacency(a[np.ix_(p, p)]))
    assert_multiset_close(e1, e2, 1e-9)


@given(weights)
def test_symmetric_laplacian_real_nonnegative(w):
    a = _adj(w)
    a = a + a.T
    ev = np.asarray(laplacian_eigenvalues(laplacian_from_adjacency(a)))
    assert np.abs(ev.imag).max() <= 1e-9
    assert ev.real.min() >= -1e-9
