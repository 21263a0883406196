import itertools

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from sklearn.base import clone

from conftest import Z4, Z8, Z9
from ringconv.block import (
    BlockCode,
    FieldDecoder,
    GVDecoder,
    TLNDecoder,
    all_vectors,
    dmin_free_code,
    field_decode,
    gv_decode,
    min_distance_bruteforce,
    tln_decode,
    xi_check,
)
from ringconv.exceptions import DecodeFailure, TooLarge
from ringconv.linalg import is_injective, mat_mul, nullspace_mod_p, rank_mod_p
from ringconv.ring import RingParams, digit_layers

REP_H = np.array([[1, 3, 0], [0, 1, 3]])


def ring_dmin(g, ring):
    """Minimum weight over all nonzero Z/p^r codewords, by enumeration."""
    words = (all_vectors(ring.modulus, g.shape[1]) @ np.asarray(g).T) % ring.modulus
    weights = np.count_nonzero(words, axis=1)
    return int(weights[weights > 0].min())


def test_min_distance_examples():
    assert min_distance_bruteforce([[1], [1], [1]], 2) == 3
    assert min_distance_bruteforce([[1, 0], [1, 1], [0, 1]], 2) == 2
    assert min_distance_bruteforce([[1], [1], [1], [1]], 3) == 4
    with pytest.raises(TooLarge):
        min_distance_bruteforce(np.eye(30, dtype=int), 2)


def test_dmin_free_code_examples():
    assert dmin_free_code(BlockCode(Z4, generator=[[1], [1], [1]])) == 3
    assert dmin_free_code(BlockCode(Z9, generator=[[1], [1]])) == 2
    g = np.array([[1, 0], [1, 1], [0, 1], [1, 2]])
    assert dmin_free_code(BlockCode(Z4, generator=g)) == ring_dmin(g, Z4) == 2


def test_block_code_validation():
    with pytest.raises(ValueError):
        BlockCode(Z4)
    with pytest.raises(ValueError):
        BlockCode(Z4, generator=[[2], [2], [0]])
    with pytest.raises(ValueError):
        BlockCode(Z4, generator=[[1], [1], [1]], parity=[[1, 1, 0]])
    code = BlockCode(Z4, parity=REP_H)
    assert (code.n, code.k) == (3, 1)


def test_field_decode_examples():
    rep = FieldDecoder.from_generator([[1], [1], [1]], 2)
    u0, e0 = field_decode(rep, [1, 0, 1])
    assert u0.tolist() == [1] and e0.tolist() == [0, 1, 0]
    u0, e0 = field_decode(rep, [1, 1, 1])
    assert u0.tolist() == [1] and not e0.any()
    syn = FieldDecoder.from_parity([[1, 1, 0], [0, 1, 1]], 2)
    assert field_decode(syn, [1, 0]).tolist() == [1, 0, 0]
    assert field_decode(syn, [0, 0]).tolist() == [0, 0, 0]


def test_field_decode_tie_and_capability_fail():
    with pytest.raises(DecodeFailure):
        FieldDecoder.from_generator([[1], [1]], 2).decode([1, 0])
    rep5 = FieldDecoder.from_generator([[1]] * 5, 2)
    assert rep5.t == 2
    with pytest.raises(DecodeFailure):
        # nearest codeword at distance 2 is fine, 3 errors look like 2 from the other side
        FieldDecoder.from_generator([[1, 0], [1, 0], [1, 0], [0, 1]], 2).decode([1, 1, 0, 0])


def test_syndrome_leaders_match_coset_enumeration():
    h = np.array([[1, 1, 0, 1, 0], [0, 1, 1, 0, 1]])
    dec = FieldDecoder.from_parity(h, 2)
    for e in all_vectors(2, 5):
        if np.count_nonzero(e) <= dec.t:
            assert np.array_equal(dec.decode((h @ e) % 2), e)


def test_gv_examples():
    code = BlockCode(Z4, generator=[[1], [1], [1]])
    inner = FieldDecoder.from_generator(code.generator_mod_p(), 2)
    res = gv_decode(code, [3, 1, 3], inner)
    assert res.message.tolist() == [3] and res.error.tolist() == [0, 2, 0]
    assert res.codeword.tolist() == [3, 3, 3]
    res = gv_decode(code, [2, 2, 2], inner)
    assert res.message.tolist() == [2] and not res.error.any()


def test_gv_over_field_is_one_inner_decode():
    f2 = RingParams(2, 1)
    code = BlockCode(f2, generator=[[1], [1], [1]])
    inner = FieldDecoder.from_generator([[1], [1], [1]], 2)
    for word in all_vectors(2, 3):
        res = gv_decode(code, word, inner)
        u0, e0 = inner.decode(word)
        assert np.array_equal(res.message, u0) and np.array_equal(res.error, e0)


def test_tln_examples():
    code = BlockCode(Z4, parity=REP_H)
    inner = FieldDecoder.from_parity(REP_H, 2)
    assert tln_decode(code, [2, 0], inner).tolist() == [2, 0, 0]
    assert tln_decode(code, [1, 0], inner).tolist() == [1, 0, 0]
    assert tln_decode(code, [0, 0], inner).tolist() == [0, 0, 0]
    with pytest.raises(ValueError):
        tln_decode(BlockCode(Z4, parity=[[1, 1, 0], [1, 1, 0]]), [0, 0], inner)


def test_xi_check_examples():
    # layer 0: nothing known yet, the field syndrome is the low digit of s
    assert xi_check(REP_H, [3, 2], [], 0, Z4).tolist() == [1, 0]
    assert xi_check(REP_H, [2, 0], [np.zeros(3, dtype=int)], 1, Z4).tolist() == [1, 0]
    assert xi_check(REP_H, [0, 0], [np.zeros(3, dtype=int)], 1, Z4).tolist() == [0, 0]
    with pytest.raises(IndexError):
        xi_check(REP_H, [0, 0], [], 2, Z4)


def _free_code(draw, ring, n, k):
    g = draw(st.lists(st.integers(0, ring.modulus - 1), min_size=n * k, max_size=n * k))
    g = np.array(g).reshape(n, k)
    assume(is_injective(g, ring))
    return g


codes = st.tuples(st.sampled_from([Z4, Z8, Z9]), st.integers(3, 6), st.integers(1, 2))


@given(codes, st.data())
def test_dmin_equals_ring_enumeration(params, data):
    ring, n, k = params
    g = _free_code(data.draw, ring, n, k)
    assert min_distance_bruteforce(g, ring.p) == ring_dmin(g, ring)


def _layer_bounded_error(draw, ring, n, t):
    e = np.zeros(n, dtype=np.int64)
    for layer in range(ring.r):
        support = draw(st.lists(st.integers(0, n - 1), max_size=t, unique=True))
        for pos in support:
            e[pos] += draw(st.integers(1, ring.p - 1)) * ring.p**layer
    return e % ring.modulus


@given(codes, st.data())
def test_gv_corrects_layer_bounded_errors(params, data):
    ring, n, k = params
    g = _free_code(data.draw, ring, n, k)
    code = BlockCode(ring, generator=g)
    inner = FieldDecoder.from_generator(g % ring.p, ring.p)
    u = np.array(data.draw(st.lists(st.integers(0, ring.modulus - 1), min_size=k, max_size=k)))
    e = _layer_bounded_error(data.draw, ring, n, inner.t)
    res = gv_decode(code, (code.encode(u) + e) % ring.modulus, inner)
    assert np.array_equal(res.message, u) and np.array_equal(res.error, e)


def _parity_for(g, ring):
    """A parity matrix over Z/p^r for the systematic code ``(I; P)``."""
    k = g.shape[1]
    n = g.shape[0]
    p_block = g[k:]
    return np.hstack([(-p_block) % ring.modulus, np.eye(n - k, dtype=np.int64)])


@given(st.sampled_from([Z4, Z8, Z9]), st.integers(4, 6), st.data())
def test_tln_agrees_with_gv_on_systematic_codes(ring, n, data):
    k = 1
    tail = data.draw(st.lists(st.integers(0, ring.modulus - 1), min_size=n - k, max_size=n - k))
    g = np.array([[1]] + [[v] for v in tail])
    h = _parity_for(g, ring)
    code = BlockCode(ring, generator=g, parity=h)
    gen_inner = FieldDecoder.from_generator(g % ring.p, ring.p)
    par_inner = FieldDecoder.from_parity(h % ring.p, ring.p)
    t = min(gen_inner.t, par_inner.t)
    e = _layer_bounded_error(data.draw, ring, n, t)
    u = np.array([data.draw(st.integers(0, ring.modulus - 1))])
    word = (code.encode(u) + e) % ring.modulus
    assert np.array_equal(gv_decode(code, word, gen_inner).error, e)
    assert np.array_equal(tln_decode(code, code.syndrome(word), par_inner), e)


@given(st.sampled_from([Z4, Z8, RingParams(2, 4), Z9]), st.integers(1, 3), st.integers(1, 5), st.data())
def test_xi_check_matches_compact_residual(ring, rows, cols, data):
    ints = st.integers(0, ring.modulus - 1)
    h = np.array(data.draw(st.lists(ints, min_size=rows * cols, max_size=rows * cols))).reshape(rows, cols)
    e = np.array(data.draw(st.lists(ints, min_size=cols, max_size=cols)))
    s = mat_mul(h, e, ring)
    digits = digit_layers(e, ring)
    for l in range(ring.r):
        low = sum((digits[i] * ring.p**i for i in range(l)), np.zeros(cols, dtype=np.int64)) % ring.modulus
        compact = (((s - mat_mul(h, low, ring)) % ring.modulus) // ring.p**l) % ring.p
        assert np.array_equal(xi_check(h, s, list(digits[:l]), l, ring), compact)


def test_coset_leader_uniqueness_exhaustive():
    for ring in (Z4, Z9):
        m = ring.modulus
        h = np.array([[1, m - 1, 0, 0, 0], [0, 1, m - 1, 0, 0], [0, 0, 1, m - 1, 0], [0, 0, 0, 1, m - 1]])
        code = BlockCode(ring, parity=h)
        inner = FieldDecoder.from_parity(h, ring.p)
        assert inner.t == 2
        for pos in itertools.combinations(range(5), 2):
            for vals in itertools.product(range(m), repeat=2):
                e = np.zeros(5, dtype=np.int64)
                e[list(pos)] = vals
                assert np.array_equal(tln_decode(code, code.syndrome(e), inner), e)


def test_estimators():
    est = GVDecoder(generator=[[1], [1], [1]], p=2, r=2)
    assert est.get_params() == {"generator": [[1], [1], [1]], "p": 2, "r": 2}
    assert clone(est).get_params()["r"] == 2
    est.fit()
    assert est.capability_ == 1
    assert est.predict([[3, 1, 3], [2, 2, 0]]).tolist() == [[3], [2]]
    assert est.transform([3, 1, 3]).tolist() == [[3, 3, 3]]

    tln = TLNDecoder(parity=REP_H, p=2, r=2).fit()
    assert tln.predict([[3, 1, 3]]).tolist() == [[0, 2, 0]]
    assert tln.transform([[3, 1, 3]]).tolist() == [[3, 3, 3]]
    with pytest.raises(ValueError):
        TLNDecoder(parity=[[1, 1, 0], [1, 1, 0]], p=2, r=2).fit()


def test_trivial_kernel_distance_sentinel():
    # a full-rank square parity matrix has only the zero solution
    dec = FieldDecoder.from_parity(np.eye(3, dtype=int), 2)
    assert dec.distance == 4 and dec.t == 3
    assert rank_mod_p(nullspace_mod_p(np.eye(3, dtype=int), 2), 2) == 0
