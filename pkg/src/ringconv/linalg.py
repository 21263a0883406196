"""Dense matrix algebra over Z/p^r and F_p.

Matrices are 2-D int64 numpy arrays of canonical residues; the ring is
passed alongside.  Injectivity and surjectivity over Z/p^r reduce to the
rank of the matrix mod p because Z/p^r is local: a matrix is equivalent to
a diagonal of p-powers, and a diagonal entry is invertible exactly when it
survives reduction mod p.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import Inconsistent, NotDivisible
from .ring import RingParams


def _prime(ring_or_p) -> int:
    return ring_or_p.p if isinstance(ring_or_p, RingParams) else int(ring_or_p)


def mat_mul(a, b, ring: RingParams) -> np.ndarray:
    """Product over Z/p^r; ``b`` may be a vector."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.ndim != 2 or b.ndim not in (1, 2) or a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot multiply shapes {a.shape} and {b.shape}")
    inner = max(a.shape[1], 1)
    if ring.modulus**2 * inner < 2**62:
        return (a @ b) % ring.modulus
    # big moduli: Python ints cannot overflow
    return ((a.astype(object) @ b.astype(object)) % ring.modulus).astype(np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def mat_pow(a, e: int, ring: RingParams) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix power needs a square matrix, got {a.shape}")
    if e < 0:
        raise ValueError("exponent must be non-negative")
    result = identity(a.shape[0])
    base = a % ring.modulus
    while e:
        if e & 1:
            result = mat_mul(result, base, ring)
        e >>= 1
        if e:
            base = mat_mul(base, base, ring)
    return result


def rref_mod_p(m, p) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p.

    Pivots are taken as the first nonzero entry scanning rows top to bottom,
    so the output is fully deterministic.
    """
    p = _prime(p)
    work = np.array(m, dtype=np.int64, copy=True) % p
    if work.ndim != 2:
        raise ValueError("rref needs a 2-D matrix")
    rows, cols = work.shape
    pivots = []
    row = 0
    for col in range(cols):
        if row == rows:
            break
        nz = np.nonzero(work[row:, col])[0]
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            work[[row, piv]] = work[[piv, row]]
        work[row] = (work[row] * pow(int(work[row, col]), -1, p)) % p
        for other in range(rows):
            if other != row and work[other, col]:
                work[other] = (work[other] - work[other, col] * work[row]) % p
        pivots.append(col)
        row += 1
    return work, pivots


def rank_mod_p(m, p) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref_mod_p(m, p)[1])


def is_injective(m, ring) -> bool:
    """Kernel over Z/p^r is trivial iff the mod-p column rank is full."""
    m = np.asarray(m)
    return rank_mod_p(m, ring) == m.shape[1]


def is_surjective(m, ring) -> bool:
    """Image is the whole codomain iff the mod-p row rank is full."""
    m = np.asarray(m)
    return rank_mod_p(m, ring) == m.shape[0]


def nullspace_mod_p(a, p) -> np.ndarray:
    """Basis of the right kernel over F_p, one basis vector per row."""
    p = _prime(p)
    a = np.asarray(a, dtype=np.int64)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return identity(cols)
    reduced, pivots = rref_mod_p(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for row, pc in enumerate(pivots):
            basis[i, pc] = (-reduced[row, f]) % p
    return basis


class Solution(NamedTuple):
    """Solution set ``particular + span(kernel rows)`` of a linear system over F_p."""

    particular: np.ndarray
    kernel: np.ndarray


def solve_mod_p(a, b, p) -> Solution:
    """Solve ``a @ x = b`` over F_p.

    Raises
    ------
    Inconsistent
        If ``b`` is not in the column space of ``a``.
    """
    p = _prime(p)
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if a.ndim != 2 or b.shape != (a.shape[0],):
        raise ValueError(f"shape mismatch: {a.shape} and {b.shape}")
    rows, cols = a.shape
    if rows == 0:
        return Solution(np.zeros(cols, dtype=np.int64), identity(cols))
    reduced, pivots = rref_mod_p(np.column_stack([a, b]), p)
    if cols in pivots:
        raise Inconsistent("right-hand side is not in the column space")
    x = np.zeros(cols, dtype=np.int64)
    for row, pc in enumerate(pivots):
        x[pc] = reduced[row, cols]
    return Solution(x, nullspace_mod_p(a, p))


def lift_solve(a, b, ring: RingParams) -> np.ndarray:
    """Solve ``a @ x = b`` over Z/p^r one p-adic digit at a time.

    Each layer solves a system over F_p with the residual divided by
    ``p**i``.  Always succeeds when ``a`` is surjective; otherwise it may
    raise :class:`Inconsistent` even if a solution exists.
    """
    a = np.asarray(a, dtype=np.int64) % ring.modulus
    b = np.asarray(b, dtype=np.int64) % ring.modulus
    x = np.zeros(a.shape[1], dtype=np.int64)
    a0 = a % ring.p
    for i in range(ring.r):
        residual = (b - mat_mul(a, x, ring)) % ring.modulus
        scale = ring.p**i
        if np.any(residual % scale):
            raise NotDivisible(f"residual not divisible by p^{i}")
        digit = solve_mod_p(a0, (residual // scale) % ring.p, ring.p).particular
        x = (x + digit * scale) % ring.modulus
    return x
