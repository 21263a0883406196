import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from conftest import Z4, Z8, Z9, brute_image
from ringconv.exceptions import Inconsistent
from ringconv.linalg import (
    identity,
    is_injective,
    is_surjective,
    lift_solve,
    mat_mul,
    mat_pow,
    nullspace_mod_p,
    rank_mod_p,
    solve_mod_p,
)
from ringconv.ring import RingParams


def test_mat_mul_examples():
    m = np.array([[1, 2], [3, 0]])
    assert np.array_equal(mat_mul(identity(2), m, Z4), m)
    assert mat_mul([[2]], [[2]], Z4).tolist() == [[0]]
    assert mat_mul([[3, 1]], [[3], [3]], Z9).tolist() == [[3]]
    with pytest.raises(ValueError):
        mat_mul([[1, 2]], [[1, 2]], Z4)


def test_mat_mul_large_modulus_does_not_overflow():
    ring = RingParams(2, 30)
    a = np.full((3, 3), ring.modulus - 1)
    expected = (np.array(a, dtype=object) @ np.array(a, dtype=object)) % ring.modulus
    assert mat_mul(a, a, ring).tolist() == expected.tolist()


def test_mat_pow_examples():
    m = np.array([[1, 3], [2, 1]])
    assert np.array_equal(mat_pow(m, 0, Z4), identity(2))
    assert np.array_equal(mat_pow(identity(3), 17, Z4), identity(3))
    assert mat_pow([[2]], 2, Z4).tolist() == [[0]]
    assert np.array_equal(mat_pow(m, 5, Z9), mat_mul(mat_pow(m, 2, Z9), mat_pow(m, 3, Z9), Z9))
    with pytest.raises(ValueError):
        mat_pow([[1, 2]], 2, Z4)


def test_rank_examples():
    assert rank_mod_p([[2, 0], [0, 2]], 2) == 0
    assert rank_mod_p(identity(4), 3) == 4
    # mod 2 both rows reduce to (1, 0)
    assert rank_mod_p([[1, 2], [3, 0]], 2) == 1


def _span_rank(m, p):
    """Rank from the size of the F_p row span, by enumeration."""
    m = np.asarray(m) % p
    combos = np.indices((p,) * m.shape[0]).reshape(m.shape[0], -1).T
    size = len({tuple(row) for row in (combos @ m) % p})
    return int(round(np.log(size) / np.log(p)))


def test_rank_matches_row_span_enumeration():
    rng = np.random.default_rng(3)
    for _ in range(300):
        p = int(rng.choice([2, 3]))
        m = rng.integers(0, 9, size=tuple(rng.integers(1, 4, size=2)))
        assert rank_mod_p(m, p) == _span_rank(m, p)


def test_injective_surjective_examples():
    assert not is_injective([[2]], Z4)
    assert is_injective([[1], [2]], Z4)
    assert is_surjective(identity(3), Z4)
    assert not is_surjective([[2, 2]], Z4)


def test_random_full_rank_confirmed_by_enumeration():
    rng = np.random.default_rng(0)
    found = 0
    while found < 5:
        m = rng.integers(0, 8, size=(4, 2))
        if rank_mod_p(m, 2) == 2:
            found += 1
            assert is_injective(m, Z8)
            assert len(brute_image(m, 8)) == 64
    found = 0
    while found < 5:
        m = rng.integers(0, 9, size=(2, 4))
        if rank_mod_p(m, 3) == 2:
            found += 1
            assert is_surjective(m, Z9)
            assert len(brute_image(m, 9)) == 81


def test_all_small_z4_matrices_agree_with_enumeration():
    for rows, cols in itertools.product((1, 2), repeat=2):
        for flat in itertools.product(range(4), repeat=rows * cols):
            m = np.array(flat).reshape(rows, cols)
            size = len(brute_image(m, 4))
            assert is_injective(m, Z4) == (size == 4**cols)
            assert is_surjective(m, Z4) == (size == 4**rows)


def test_solve_examples():
    b = np.array([1, 0, 1])
    sol = solve_mod_p(identity(3), b, 2)
    assert np.array_equal(sol.particular, b) and sol.kernel.shape == (0, 3)
    sol = solve_mod_p(np.zeros((2, 2), dtype=int), [0, 0], 3)
    assert not sol.particular.any() and rank_mod_p(sol.kernel, 3) == 2
    sol = solve_mod_p([[1, 1]], [1], 2)
    assert sol.particular.tolist() == [1, 0] and sol.kernel.tolist() == [[1, 1]]
    with pytest.raises(Inconsistent):
        solve_mod_p([[1, 1], [1, 1]], [0, 1], 2)


matrices = st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 4)).flatmap(
    lambda t: st.tuples(st.just(t[0]), hnp.arrays(np.int64, (t[1], t[2]), elements=st.integers(0, t[0] - 1))))


@given(matrices, st.data())
def test_solve_by_substitution(pm, data):
    p, a = pm
    x = data.draw(hnp.arrays(np.int64, a.shape[1], elements=st.integers(0, p - 1)))
    b = (a @ x) % p
    sol = solve_mod_p(a, b, p)
    assert np.array_equal((a @ sol.particular) % p, b)
    assert not ((sol.kernel @ a.T) % p).any()
    assert sol.kernel.shape[0] == a.shape[1] - rank_mod_p(a, p)


@given(matrices)
def test_rank_symmetry_and_nullspace(pm):
    p, a = pm
    assert rank_mod_p(a, p) == rank_mod_p(a.T, p)
    kernel = nullspace_mod_p(a, p)
    assert not ((a @ kernel.T) % p).any()
    assert rank_mod_p(kernel, p) == kernel.shape[0]


@given(st.sampled_from([Z4, Z8, Z9, RingParams(5, 2)]), st.integers(1, 3), st.integers(0, 2), st.data())
def test_lift_solve_surjective(ring, rows, extra, data):
    a = data.draw(hnp.arrays(np.int64, (rows, rows + extra), elements=st.integers(0, ring.modulus - 1)))
    b = data.draw(hnp.arrays(np.int64, rows, elements=st.integers(0, ring.modulus - 1)))
    if is_surjective(a, ring):
        assert np.array_equal(mat_mul(a, lift_solve(a, b, ring), ring), b)
