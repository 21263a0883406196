"""Polynomial encoder matrices over Z/p^r[z].

A polynomial vector is stored as an int64 array of shape ``(L, n)`` whose
row ``j`` is the coefficient of ``z**j``; trailing zero rows are trimmed.
A polynomial matrix is an array of shape ``(L, n, k)``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ._validation import check_ring_array
from .linalg import is_injective
from .ring import RingParams

ZERO_DEGREE = -math.inf


def trim(v) -> np.ndarray:
    """Drop trailing zero coefficients (keeps at least zero rows)."""
    v = np.asarray(v, dtype=np.int64)
    nz = np.flatnonzero(v.reshape(v.shape[0], -1).any(axis=1)) if v.shape[0] else []
    return v[: (nz[-1] + 1 if len(nz) else 0)]


def degree(v):
    """Degree of a polynomial vector or matrix; ``-inf`` for zero."""
    v = trim(v)
    return v.shape[0] - 1 if v.shape[0] else ZERO_DEGREE


def weight(v) -> int:
    """Total Hamming weight of all coefficient vectors."""
    return int(np.count_nonzero(v))


def poly_add(a, b, ring: RingParams) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    length = max(a.shape[0], b.shape[0])
    out = np.zeros((length,) + a.shape[1:], dtype=np.int64)
    out[: a.shape[0]] += a
    out[: b.shape[0]] += b
    return trim(out % ring.modulus)


def poly_matvec(g, u, ring: RingParams) -> np.ndarray:
    """Coefficient convolution ``G(z) u(z)`` for ``g`` of shape (L, n, k), ``u`` of shape (M, k)."""
    g = np.asarray(g, dtype=np.int64)
    u = np.asarray(u, dtype=np.int64)
    n = g.shape[1]
    if g.shape[0] == 0 or u.shape[0] == 0:
        return np.zeros((0, n), dtype=np.int64)
    out = np.zeros((g.shape[0] + u.shape[0] - 1, n), dtype=np.int64)
    for i in range(g.shape[0]):
        for j in range(u.shape[0]):
            out[i + j] = (out[i + j] + g[i] @ u[j]) % ring.modulus
    return trim(out)


def poly_to_time(v) -> np.ndarray:
    """Time-ordered symbols of a codeword polynomial.

    Codeword polynomials list time steps in descending powers of ``z``, so
    symbol ``t`` of a degree-``g`` polynomial is the coefficient of
    ``z**(g - t)``.
    """
    return trim(v)[::-1].copy()


def time_to_poly(seq) -> np.ndarray:
    return trim(np.asarray(seq, dtype=np.int64)[::-1])


class PolyEncoder:
    """An ``n x k`` polynomial encoder ``G(z)`` with columns sorted by degree.

    Parameters
    ----------
    coeffs : array_like, shape (L, n, k)
        ``coeffs[j]`` is the coefficient matrix of ``z**j``.
    ring : RingParams

    The columns are reordered so the column degrees are non-increasing;
    ``permutation[i]`` is the original index of sorted column ``i``.
    :meth:`encode` accepts messages in the original column order.
    """

    def __init__(self, coeffs, ring: RingParams):
        coeffs = check_ring_array(coeffs, ring, ndim=3, name="coeffs")
        self.ring = ring
        _, self.n, self.k = coeffs.shape
        if self.k > self.n:
            raise ValueError(f"encoder needs k <= n, got k={self.k}, n={self.n}")
        raw_nu = [degree(coeffs[:, :, i]) for i in range(self.k)]
        if any(d == ZERO_DEGREE for d in raw_nu):
            raise ValueError("encoder has a zero column")
        # stable sort so equal-degree columns keep their order
        self.permutation = sorted(range(self.k), key=lambda i: -raw_nu[i])
        self.coeffs = trim(coeffs[:, :, self.permutation])
        self.nu = tuple(int(raw_nu[i]) for i in self.permutation)

    @classmethod
    def from_columns(cls, columns, ring: RingParams):
        """Build from nested lists ``columns[i][row]`` = ascending coefficient list."""
        k = len(columns)
        n = len(columns[0])
        length = max(len(entry) for col in columns for entry in col)
        coeffs = np.zeros((length, n, k), dtype=np.int64)
        for i, col in enumerate(columns):
            if len(col) != n:
                raise ValueError("columns have different lengths")
            for row, entry in enumerate(col):
                coeffs[: len(entry), row, i] = entry
        return cls(coeffs, ring)

    def leading_matrix(self) -> np.ndarray:
        """``G_h``: column ``i`` is the coefficient of ``z**nu_i`` in column ``i``."""
        gh = np.zeros((self.n, self.k), dtype=np.int64)
        for i, nu in enumerate(self.nu):
            gh[:, i] = self.coeffs[nu, :, i]
        return gh

    def is_pdp(self) -> bool:
        return is_injective(self.leading_matrix(), self.ring)

    def complexity(self) -> int:
        return sum(self.nu)

    @property
    def memory(self) -> int:
        return self.nu[0] if self.nu else 0

    def encode(self, u) -> np.ndarray:
        """``G(z) u(z)`` for ``u`` of shape (M, k) in original column order."""
        u = check_ring_array(u, self.ring, ndim=2, name="u")
        if u.shape[1] != self.k:
            raise ValueError(f"message must have {self.k} components")
        return poly_matvec(self.coeffs, u[:, self.permutation], self.ring)

    def messages(self, max_deg: int):
        """Every message polynomial with degree at most ``max_deg``."""
        q = self.ring.modulus
        for flat in itertools.product(range(q), repeat=self.k * (max_deg + 1)):
            yield np.array(flat, dtype=np.int64).reshape(max_deg + 1, self.k)

    def __repr__(self):
        return f"PolyEncoder(n={self.n}, k={self.k}, nu={self.nu}, ring={self.ring})"


def leading_matrix(g: PolyEncoder) -> np.ndarray:
    return g.leading_matrix()


def is_pdp(g: PolyEncoder) -> bool:
    return g.is_pdp()


def complexity(g: PolyEncoder) -> int:
    return g.complexity()


def poly_encode(g: PolyEncoder, u) -> np.ndarray:
    return g.encode(u)
