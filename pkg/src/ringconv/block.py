"""Free linear block codes over Z/p^r and their lifting decoders.

Both decoders peel off one p-adic digit layer per pass and hand that layer
to a decoder for the residue code over F_p:

* :func:`gv_decode` works on the generator side.  Layer ``i`` decodes
  ``((v - G u_low - e_low) / p**i) mod p`` in the code spanned by ``G mod p``.
* :func:`tln_decode` works on the syndrome side with a full-rank parity
  matrix and decodes ``((s - H e_low) / p**l) mod p`` against ``H mod p``.

An error is corrected whenever every digit layer is within the capability
of the field decoder.
"""

from __future__ import annotations

import itertools
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_ring, check_ring_array
from .exceptions import DecodeFailure, NotDivisible, TooLarge
from .linalg import is_injective, mat_mul, nullspace_mod_p, rank_mod_p
from .ring import RingParams, digit_layers, exact_div_p

ENUMERATION_GUARD = 2**22
TABLE_GUARD = 2_000_000

NEAREST = "nearest"
SYNDROME = "syndrome"


def hamming_weight(v) -> int:
    return int(np.count_nonzero(v))


def all_vectors(q: int, length: int) -> np.ndarray:
    """Every vector of ``{0..q-1}^length`` as rows, first coordinate fastest."""
    if length == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grid = np.indices((q,) * length).reshape(length, -1).T
    return np.ascontiguousarray(grid[:, ::-1], dtype=np.int64)


def min_distance_bruteforce(generator, p: int, guard: int = ENUMERATION_GUARD) -> int:
    """Minimum Hamming weight of the F_p code spanned by the columns of ``generator``.

    A code with no nonzero codeword reports ``n + 1``.
    """
    g = np.asarray(generator, dtype=np.int64) % p
    n, k = g.shape
    if p**k > guard:
        raise TooLarge(f"{p}^{k} codewords exceed the enumeration guard {guard}")
    if k == 0:
        return n + 1
    words = (all_vectors(p, k)[1:] @ g.T) % p
    weights = np.count_nonzero(words, axis=1)
    weights = weights[weights > 0]
    return int(weights.min()) if weights.size else n + 1


class BlockCode:
    """A free linear block code over Z/p^r.

    At least one of ``generator`` (n x k, injective) or ``parity`` (q x n)
    must be given.  When both are present they must satisfy
    ``parity @ generator == 0``.
    """

    def __init__(self, ring: RingParams, generator=None, parity=None):
        if generator is None and parity is None:
            raise ValueError("a block code needs a generator or a parity-check matrix")
        self.ring = ring
        self.generator = None if generator is None else check_ring_array(
            generator, ring, ndim=2, name="generator")
        self.parity = None if parity is None else check_ring_array(
            parity, ring, ndim=2, name="parity")
        if self.generator is not None:
            n, k = self.generator.shape
            if not is_injective(self.generator, ring):
                raise ValueError("generator is not injective (rank mod p < k), code is not free")
        if self.parity is not None and self.generator is not None:
            if self.parity.shape[1] != n:
                raise ValueError("parity and generator lengths differ")
            if np.any(mat_mul(self.parity, self.generator, ring)):
                raise ValueError("parity @ generator is not zero")

    @property
    def n(self) -> int:
        if self.generator is not None:
            return self.generator.shape[0]
        return self.parity.shape[1]

    @property
    def k(self) -> int:
        if self.generator is not None:
            return self.generator.shape[1]
        return self.n - rank_mod_p(self.parity, self.ring)

    def generator_mod_p(self) -> np.ndarray:
        """Generator of the residue code; derived from the parity kernel if needed."""
        if self.generator is not None:
            return self.generator % self.ring.p
        return nullspace_mod_p(self.parity, self.ring.p).T

    def encode(self, message) -> np.ndarray:
        if self.generator is None:
            raise ValueError("code has no generator")
        return mat_mul(self.generator, check_ring_array(message, self.ring, ndim=1), self.ring)

    def syndrome(self, word) -> np.ndarray:
        if self.parity is None:
            raise ValueError("code has no parity-check matrix")
        return mat_mul(self.parity, check_ring_array(word, self.ring, ndim=1), self.ring)

    def __repr__(self):
        return f"BlockCode({self.ring}, n={self.n}, k={self.k})"


def dmin_free_code(code: BlockCode) -> int:
    """Minimum distance of a free code, read off its reduction mod p."""
    return min_distance_bruteforce(code.generator_mod_p(), code.ring.p)


class DecodeResult(NamedTuple):
    message: np.ndarray
    error: np.ndarray
    codeword: np.ndarray


def _errors_of_weight(n: int, w: int, p: int) -> np.ndarray:
    positions = list(itertools.combinations(range(n), w))
    values = list(itertools.product(range(1, p), repeat=w))
    out = np.zeros((len(positions) * len(values), n), dtype=np.int64)
    row = 0
    for pos in positions:
        for val in values:
            out[row, list(pos)] = val
            row += 1
    return out


class FieldDecoder:
    """Exact bounded-distance decoder for a linear code over F_p.

    ``mode="nearest"`` takes a generator ``G0`` (n x k) and maps a received
    word to ``(u0, e0)``; ``mode="syndrome"`` takes a parity matrix ``H0``
    and maps a syndrome to its coset leader.  Either way a result whose
    error weight exceeds the capability ``t``, or a tie between equally
    light candidates, raises :class:`DecodeFailure`.
    """

    def __init__(self, matrix, p: int, mode: str = NEAREST):
        if mode not in (NEAREST, SYNDROME):
            raise ValueError(f"unknown mode {mode!r}")
        self.p = int(p)
        self.mode = mode
        self.matrix = np.asarray(matrix, dtype=np.int64) % self.p
        if self.matrix.ndim != 2:
            raise ValueError("decoder matrix must be 2-D")
        if mode == NEAREST:
            self._build_nearest()
        else:
            self._build_syndrome()

    @classmethod
    def from_generator(cls, generator, p):
        return cls(generator, p, NEAREST)

    @classmethod
    def from_parity(cls, parity, p):
        return cls(parity, p, SYNDROME)

    def _set_capability(self, d):
        self.distance = d
        self.t = self.n if d > self.n else (d - 1) // 2

    def _build_nearest(self):
        self.n, k = self.matrix.shape
        if rank_mod_p(self.matrix, self.p) != k:
            raise ValueError("generator mod p is not full column rank")
        if self.p**k > ENUMERATION_GUARD:
            raise TooLarge(f"{self.p}^{k} codewords exceed the enumeration guard")
        self._messages = all_vectors(self.p, k)
        self._codewords = (self._messages @ self.matrix.T) % self.p
        weights = np.count_nonzero(self._codewords[1:], axis=1)
        self._set_capability(int(weights.min()) if weights.size else self.n + 1)

    def _build_syndrome(self):
        q, self.n = self.matrix.shape
        self._set_capability(min_distance_bruteforce(nullspace_mod_p(self.matrix, self.p).T, self.p))
        self._powers = self.p ** np.arange(q, dtype=np.int64)
        reachable = self.p ** rank_mod_p(self.matrix, self.p)
        self._table = {}
        self._ambiguous = set()
        enumerated = 0
        for w in range(self.n + 1):
            errs = _errors_of_weight(self.n, w, self.p)
            enumerated += len(errs)
            if enumerated > TABLE_GUARD:
                if w > self.t:
                    break  # leaders beyond t are never returned
                raise TooLarge("syndrome table exceeds its guard")
            keys = ((errs @ self.matrix.T) % self.p) @ self._powers
            fresh = {}
            for key, err in zip(keys.tolist(), errs):
                if key in self._table:
                    continue
                if key in fresh:
                    self._ambiguous.add(key)
                else:
                    fresh[key] = err
            self._table.update(fresh)
            if len(self._table) == reachable:
                break

    def decode(self, word) -> tuple[np.ndarray, np.ndarray] | np.ndarray:
        word = np.asarray(word, dtype=np.int64) % self.p
        if self.mode == NEAREST:
            return self._decode_nearest(word)
        return self._decode_syndrome(word)

    def _decode_nearest(self, received):
        if received.shape != (self.n,):
            raise ValueError(f"received word must have length {self.n}")
        dist = np.count_nonzero(self._codewords != received, axis=1)
        best = int(dist.min())
        hits = np.flatnonzero(dist == best)
        if len(hits) > 1:
            raise DecodeFailure(f"{len(hits)} codewords tie at distance {best}")
        if best > self.t:
            raise DecodeFailure(f"nearest codeword at distance {best} > t={self.t}")
        i = hits[0]
        return self._messages[i].copy(), (received - self._codewords[i]) % self.p

    def _decode_syndrome(self, syndrome):
        if syndrome.shape != (self.matrix.shape[0],):
            raise ValueError(f"syndrome must have length {self.matrix.shape[0]}")
        key = int(syndrome @ self._powers) if syndrome.size else 0
        if key in self._ambiguous:
            raise DecodeFailure("coset has several minimum-weight leaders")
        leader = self._table.get(key)
        if leader is None:
            raise DecodeFailure("syndrome has no leader within the table")
        if hamming_weight(leader) > self.t:
            raise DecodeFailure(f"coset leader weight exceeds t={self.t}")
        return leader.copy()

    def __repr__(self):
        return f"FieldDecoder(mode={self.mode!r}, p={self.p}, n={self.n}, t={self.t})"


def field_decode(decoder: FieldDecoder, word):
    return decoder.decode(word)


def gv_decode(code: BlockCode, received, inner: FieldDecoder) -> DecodeResult:
    """Generator-side lifting decoder.

    Recovers ``u`` and ``e`` with ``received = G u + e`` digit layer by digit
    layer; ``inner`` decodes the residue code spanned by ``G mod p``.
    """
    ring = code.ring
    if code.generator is None:
        raise ValueError("GV decoding needs a generator matrix")
    g = code.generator
    v = check_ring_array(received, ring, shape=(g.shape[0],), name="received")
    u = np.zeros(g.shape[1], dtype=np.int64)
    e = np.zeros(g.shape[0], dtype=np.int64)
    for i in range(ring.r):
        residual = (v - mat_mul(g, u, ring) - e) % ring.modulus
        try:
            layer = exact_div_p(residual, i, ring) % ring.p
        except NotDivisible as exc:
            raise DecodeFailure(f"layer {i}: {exc}") from exc
        u_i, e_i = inner.decode(layer)
        u = (u + u_i * ring.p**i) % ring.modulus
        e = (e + e_i * ring.p**i) % ring.modulus
    return DecodeResult(u, e, mat_mul(g, u, ring))


def tln_decode(code: BlockCode, syndrome, inner: FieldDecoder, check_rank: bool = True) -> np.ndarray:
    """Syndrome-side lifting decoder for a full-rank parity matrix.

    Returns ``e`` with ``H e = syndrome``.  ``check_rank=False`` drops the
    full-rank precondition; layers whose residual syndrome is unreachable
    then fail like any other uncorrectable pattern.
    """
    ring = code.ring
    h = code.parity
    if h is None:
        raise ValueError("TLN decoding needs a parity-check matrix")
    if check_rank and rank_mod_p(h, ring) != h.shape[0]:
        raise ValueError("parity-check matrix is not full rank mod p")
    s = check_ring_array(syndrome, ring, shape=(h.shape[0],), name="syndrome")
    e = np.zeros(h.shape[1], dtype=np.int64)
    for l in range(ring.r):
        residual = (s - mat_mul(h, e, ring)) % ring.modulus
        try:
            layer = exact_div_p(residual, l, ring) % ring.p
        except NotDivisible as exc:
            raise DecodeFailure(f"layer {l}: {exc}") from exc
        e = (e + inner.decode(layer) * ring.p**l) % ring.modulus
    return e


def xi_check(parity, syndrome, known_digits, l: int, ring: RingParams) -> np.ndarray:
    """Layer-``l`` field syndrome evaluated term by term from the digit expansions.

    ``known_digits`` holds the error layers ``e_0 .. e_{l-1}``.  The three
    partial sums are formed in Z/p^r, their difference is a multiple of
    ``p**(r-1)``, and the quotient equals ``H0 e_l`` over F_p.  Kept as an
    independent cross-check of the compact residual used by
    :func:`tln_decode`.
    """
    if not 0 <= l < ring.r:
        raise IndexError(f"layer {l} outside 0..{ring.r - 1}")
    if len(known_digits) < l:
        raise ValueError(f"need {l} known error layers, got {len(known_digits)}")
    p, r, mod = ring.p, ring.r, ring.modulus
    h_digits = digit_layers(parity, ring)
    s_digits = digit_layers(syndrome, ring)
    e = [np.asarray(d, dtype=np.int64) % p for d in known_digits]

    first = np.zeros(h_digits.shape[1], dtype=np.int64)
    for j in range(r - 1 - l, r):
        first += s_digits[j - r + 1 + l] * p**j
    second = np.zeros_like(first)
    for j in range(r - 1 - l, r - 1):
        for i in range(j - r + 2 + l):
            second += mat_mul(h_digits[j - i - r + 1 + l], e[i], ring) * p**j
    third = np.zeros_like(first)
    for i in range(l):
        third += mat_mul(h_digits[l - i], e[i], ring) * p ** (r - 1)
    xi = (first - second - third) % mod
    return exact_div_p(xi, r - 1, ring) % p


class GVDecoder(BaseEstimator, TransformerMixin):
    """Estimator wrapper around :func:`gv_decode`.

    ``predict`` returns messages and ``transform`` corrected codewords, one
    row per received word.
    """

    def __init__(self, generator=None, p=2, r=1):
        self.generator = generator
        self.p = p
        self.r = r

    def fit(self, X=None, y=None):
        ring = check_ring(p=self.p, r=self.r)
        self.code_ = BlockCode(ring, generator=self.generator)
        self.inner_ = FieldDecoder.from_generator(self.code_.generator_mod_p(), ring.p)
        self.capability_ = self.inner_.t
        return self

    def decode(self, received) -> DecodeResult:
        check_is_fitted(self, "code_")
        return gv_decode(self.code_, received, self.inner_)

    def _rows(self, X):
        check_is_fitted(self, "code_")
        X = check_ring_array(X, self.code_.ring, name="X")
        return X[None, :] if X.ndim == 1 else X

    def predict(self, X):
        return np.array([self.decode(row).message for row in self._rows(X)])

    def transform(self, X):
        return np.array([self.decode(row).codeword for row in self._rows(X)])


class TLNDecoder(BaseEstimator, TransformerMixin):
    """Estimator wrapper around :func:`tln_decode`.

    ``predict`` returns error vectors and ``transform`` corrected words.
    """

    def __init__(self, parity=None, p=2, r=1):
        self.parity = parity
        self.p = p
        self.r = r

    def fit(self, X=None, y=None):
        ring = check_ring(p=self.p, r=self.r)
        self.code_ = BlockCode(ring, parity=self.parity)
        if rank_mod_p(self.code_.parity, ring) != self.code_.parity.shape[0]:
            raise ValueError("parity-check matrix is not full rank mod p")
        self.inner_ = FieldDecoder.from_parity(self.code_.parity, ring.p)
        self.capability_ = self.inner_.t
        return self

    def decode_syndrome(self, syndrome) -> np.ndarray:
        check_is_fitted(self, "code_")
        return tln_decode(self.code_, syndrome, self.inner_)

    def _rows(self, X):
        check_is_fitted(self, "code_")
        X = check_ring_array(X, self.code_.ring, name="X")
        return X[None, :] if X.ndim == 1 else X

    def predict(self, X):
        return np.array([self.decode_syndrome(self.code_.syndrome(row)) for row in self._rows(X)])

    def transform(self, X):
        rows = self._rows(X)
        return (rows - self.predict(rows)) % self.code_.ring.modulus
