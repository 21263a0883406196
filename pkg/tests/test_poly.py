import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from conftest import Z4
from ringconv.poly import (
    ZERO_DEGREE,
    PolyEncoder,
    complexity,
    degree,
    is_pdp,
    leading_matrix,
    poly_add,
    poly_encode,
    weight,
)


def test_leading_matrix_examples():
    g = PolyEncoder(np.array([[[1, 2], [3, 1]]]), Z4)
    assert np.array_equal(leading_matrix(g), [[1, 2], [3, 1]])
    col = PolyEncoder.from_columns([[[1, 1], [2]]], Z4)
    assert leading_matrix(col).tolist() == [[1], [0]]
    two = PolyEncoder.from_columns([[[1, 1], [2]], [[0, 1], [1]]], Z4)
    assert two.nu == (1, 1)
    assert leading_matrix(two).tolist() == [[1, 1], [0, 0]]


def test_is_pdp_examples():
    eye = PolyEncoder.from_columns([[[0, 1], [0]], [[0], [0, 0, 1]]], Z4)
    assert eye.nu == (2, 1) and eye.permutation == [1, 0]
    assert is_pdp(eye)
    assert not is_pdp(PolyEncoder.from_columns([[[1, 2], [2]]], Z4))


def test_complexity_examples():
    assert complexity(PolyEncoder(np.ones((1, 3, 2), dtype=int), Z4)) == 0
    assert complexity(PolyEncoder.from_columns([[[0, 0, 1], [1]], [[1, 1], [0]]], Z4)) == 3
    three = PolyEncoder.from_columns([[[0, 1], [0], [0]], [[0], [1, 1], [0]], [[1], [0], [0, 3]]], Z4)
    assert complexity(three) == 3


def test_poly_encode_examples():
    g = PolyEncoder.from_columns([[[1, 1], [1]]], Z4)
    assert poly_encode(g, [[1], [2]]).tolist() == [[1, 1], [3, 2], [2, 0]]
    assert poly_encode(g, [[0]]).shape[0] == 0
    eye = PolyEncoder(np.eye(2, dtype=int)[None], Z4)
    u = np.array([[1, 3], [2, 0], [0, 1]])
    assert np.array_equal(poly_encode(eye, u), u)


def test_encode_respects_original_column_order():
    g = PolyEncoder.from_columns([[[1], [0]], [[0], [0, 1]]], Z4)
    assert g.permutation == [1, 0]
    # u = (1, 0): only the first original column contributes
    assert poly_encode(g, [[1, 0]]).tolist() == [[1, 0]]


def test_weight_and_degree_examples():
    assert weight(np.zeros((0, 2))) == 0
    assert weight([[1, 0], [2, 0]]) == 2
    assert weight([[3, 3, 3]]) == 3
    assert degree(np.zeros((3, 2))) == ZERO_DEGREE
    assert degree([[1], [0], [2], [0]]) == 2
    assert ZERO_DEGREE < 0


def _pdp_degree_holds(g, max_deg):
    for flat in itertools.product(range(4), repeat=g.k * (max_deg + 1)):
        u = np.array(flat).reshape(max_deg + 1, g.k)
        expected = max((degree(u[:, g.permutation[i]]) + g.nu[i] for i in range(g.k)), default=ZERO_DEGREE)
        if degree(poly_encode(g, u)) != expected:
            return False
    return True


def test_pdp_degree_equality_and_non_pdp_drop():
    pdp = PolyEncoder.from_columns([[[1, 1], [0, 2], [3]], [[2], [1], [1, 3]]], Z4)
    assert is_pdp(pdp)
    assert _pdp_degree_holds(pdp, 2)
    non = PolyEncoder.from_columns([[[1, 2], [2]]], Z4)
    assert not is_pdp(non)
    # (1 + 2z, 2) times 2 loses its z term
    assert degree(poly_encode(non, [[2]])) == 0 < 1


polys = hnp.arrays(np.int64, st.tuples(st.integers(1, 3), st.just(2), st.just(2)), elements=st.integers(0, 3))
msgs = hnp.arrays(np.int64, st.tuples(st.integers(1, 4), st.just(2)), elements=st.integers(0, 3))


@given(polys, msgs, msgs)
def test_poly_encode_is_linear(coeffs, u, v):
    coeffs[-1, 0, :] = 1  # keep every column nonzero
    g = PolyEncoder(coeffs, Z4)
    length = max(len(u), len(v))
    uu = np.zeros((length, 2), dtype=np.int64)
    vv = uu.copy()
    uu[:len(u)] = u
    vv[:len(v)] = v
    lhs = poly_encode(g, (uu + vv) % 4)
    rhs = poly_add(poly_encode(g, uu), poly_encode(g, vv), Z4)
    assert np.array_equal(lhs, rhs)


def test_zero_column_rejected():
    with pytest.raises(ValueError):
        PolyEncoder(np.zeros((2, 2, 1), dtype=int), Z4)
