import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from hearo import linalg as la
from hearo.linalg import NonFiniteError, ShapeError


def naive_gemm(a, b):
    rows, inner, cols = len(a), len(b), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(rows)]


dims = st.integers(1, 5)
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def mats(r, c):
    return arrays(np.float64, (r, c), elements=finite)


def test_gemm_identity():
    m = la.matrix([[1.5, -2.0, 0.0, 4.0], [3.0, 1.0, 2.0, 2.0], [0.25, 0.5, 7.0, -1.0]])
    assert np.array_equal(la.gemm(np.eye(3), m), m)


def test_gemm_hand_computed():
    out = la.gemm(la.matrix([[1, 2], [3, 4]]), la.matrix([[5], [6]]))
    assert out.tolist() == [[17.0], [39.0]]


def test_gemm_shape_error_names_both_shapes():
    with pytest.raises(ShapeError, match="2x3.*2x3"):
        la.gemm(la.zeros(2, 3), la.zeros(2, 3))


@settings(max_examples=50, deadline=None)
@given(st.data(), dims, dims, dims)
def test_gemm_matches_triple_loop(data, r, k, c):
    a = data.draw(mats(r, k))
    b = data.draw(mats(k, c))
    np.testing.assert_allclose(la.gemm(a, b), naive_gemm(a.tolist(), b.tolist()), rtol=1e-12, atol=1e-12)


def test_add_broadcast_col():
    assert la.add_broadcast_col(la.zeros(2, 3), la.matrix([[1], [2]])).tolist() == [[1, 1, 1], [2, 2, 2]]
    z = la.matrix([[1, 2], [3, 4]])
    assert np.array_equal(la.add_broadcast_col(z, la.zeros(2, 1)), z)
    assert la.add_broadcast_col(z, la.matrix([[10], [20]])).tolist() == [[11, 12], [23, 24]]
    with pytest.raises(ShapeError):
        la.add_broadcast_col(z, la.zeros(3, 1))
    with pytest.raises(ShapeError):
        la.add_broadcast_col(z, la.zeros(2, 2))


def test_hadamard():
    a = la.matrix([[2, 3]])
    assert np.array_equal(la.hadamard(a, np.ones((1, 2))), a)
    assert np.array_equal(la.hadamard(a, la.zeros(1, 2)), la.zeros(1, 2))
    assert la.hadamard(a, la.matrix([[4, 5]])).tolist() == [[8, 15]]
    with pytest.raises(ShapeError):
        la.hadamard(a, la.zeros(2, 1))


def test_small_ops():
    assert la.frobenius_sq(la.zeros(3, 2)) == 0.0
    assert la.frobenius_sq(la.matrix([[3, 4]])) == 25.0
    assert la.row_sums(la.matrix([[1, 2, 3], [4, 5, 6]])).tolist() == [[6], [15]]
    assert la.scale(la.matrix([[1, -2]]), 3).tolist() == [[3, -6]]
    assert la.transpose(la.matrix([[1, 2, 3]])).tolist() == [[1], [2], [3]]
    with pytest.raises(ShapeError):
        la.add(la.zeros(1, 2), la.zeros(2, 1))


def test_matrix_rejects_bad_input():
    with pytest.raises(ShapeError):
        la.matrix([1, 2, 3])
    with pytest.raises(ShapeError):
        la.matrix([[]])
    with pytest.raises(ShapeError):
        la.gemm(np.ones(3), np.ones((3, 1)))


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_overflow_is_an_error():
    big = la.matrix([[1e200, 1e200]])
    with pytest.raises(NonFiniteError):
        la.gemm(big, la.transpose(big))
    with pytest.raises(NonFiniteError):
        la.scale(big, 1e200)
    with pytest.raises(NonFiniteError):
        la.frobenius_sq(big)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_finite_values_with_overflowing_sum_are_accepted():
    # Entries are finite even though their total is not.
    a = la.matrix([[1e308, 1e308]])
    assert np.array_equal(la.add(a, la.zeros(1, 2)), a)


@settings(max_examples=40, deadline=None)
@given(st.data(), dims, dims, dims, dims)
def test_gemm_associative(data, p, q, r, s):
    a, b, c = data.draw(mats(p, q)), data.draw(mats(q, r)), data.draw(mats(r, s))
    left = la.gemm(la.gemm(a, b), c)
    right = la.gemm(a, la.gemm(b, c))
    scale = max(1.0, np.abs(a).max() * np.abs(b).max() * np.abs(c).max() * q * r)
    np.testing.assert_allclose(left, right, rtol=1e-9, atol=1e-9 * scale)


@settings(max_examples=40, deadline=None)
@given(st.data(), dims, dims, dims)
def test_transpose_of_product(data, r, k, c):
    a, b = data.draw(mats(r, k)), data.draw(mats(k, c))
    np.testing.assert_allclose(
        la.transpose(la.gemm(a, b)), la.gemm(la.transpose(b), la.transpose(a)), rtol=0, atol=1e-12 * max(1, k * 100)
    )
    assert np.array_equal(la.transpose(la.transpose(a)), a)


@settings(max_examples=40, deadline=None)
@given(st.data(), dims, dims)
def test_commutativity_and_associativity(data, r, c):
    a, b, d = data.draw(mats(r, c)), data.draw(mats(r, c)), data.draw(mats(r, c))
    assert np.array_equal(la.hadamard(a, b), la.hadamard(b, a))
    assert np.array_equal(la.add(a, b), la.add(b, a))
    np.testing.assert_allclose(la.add(la.add(a, b), d), la.add(a, la.add(b, d)), rtol=0, atol=1e-12 * 30)


@settings(max_examples=25, deadline=None)
@given(st.data(), dims, dims)
def test_inputs_are_not_modified(data, r, c):
    a, b = data.draw(mats(r, c)).copy(), data.draw(mats(r, c)).copy()
    a0, b0 = a.copy(), b.copy()
    for out in (la.add(a, b), la.sub(a, b), la.hadamard(a, b), la.scale(a, 2.0),
                la.transpose(a), la.row_sums(a), la.gemm(a, la.transpose(b)),
                la.add_broadcast_col(a, la.row_sums(b))):
        assert out is not a and out is not b
        assert not np.shares_memory(out, a) and not np.shares_memory(out, b)
    la.frobenius_sq(a)
    assert np.array_equal(a, a0) and np.array_equal(b, b0)
