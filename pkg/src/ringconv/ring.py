"""Arithmetic in Z/p^r Z and its residue field F_p.

Ring elements are plain Python ints (or numpy int64 arrays) holding the
canonical residue in ``[0, p**r)``.  :class:`RingParams` carries ``p`` and
``r``; every function takes it explicitly so one value type serves all
moduli.

The p-adic helpers follow the usual digit notation: for
``x = sum_j x_j p**j`` the low truncation keeps digits ``0..i`` and the high
truncation keeps digits ``i..r-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import NotAUnit, NotDivisible

MAX_MODULUS = 2**31


def is_prime(n: int) -> bool:
    """Trial-division primality test (moduli are small)."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class RingParams:
    """The ring Z/p^r Z.

    Parameters
    ----------
    p : int
        A prime.
    r : int
        Exponent, at least 1.  ``r == 1`` gives the field F_p.
    """

    p: int
    r: int = 1
    modulus: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or not is_prime(int(self.p)):
            raise ValueError(f"p must be prime, got {self.p!r}")
        if not isinstance(self.r, (int, np.integer)) or self.r < 1:
            raise ValueError(f"r must be a natural number >= 1, got {self.r!r}")
        object.__setattr__(self, "p", int(self.p))
        object.__setattr__(self, "r", int(self.r))
        modulus = self.p**self.r
        if modulus > MAX_MODULUS:
            raise ValueError(f"p**r = {modulus} exceeds the supported bound 2**31")
        object.__setattr__(self, "modulus", modulus)

    @property
    def residue_field(self) -> "RingParams":
        return RingParams(self.p, 1)

    def __str__(self):
        return f"Z/{self.modulus}" if self.r > 1 else f"F_{self.p}"

    def reduce(self, x):
        """Canonical residue of an int or integer array."""
        if np.isscalar(x):
            return int(x) % self.modulus
        return np.asarray(x, dtype=np.int64) % self.modulus

    def elements(self):
        return range(self.modulus)

    def units(self):
        return [x for x in range(self.modulus) if x % self.p]


def padic_expand(x: int, ring: RingParams) -> tuple[int, ...]:
    """Digits ``(x_0, ..., x_{r-1})`` with ``x = sum_j x_j p**j``.

    >>> padic_expand(6, RingParams(2, 3))
    (0, 1, 1)
    """
    x = int(x) % ring.modulus
    out = []
    for _ in range(ring.r):
        x, d = divmod(x, ring.p)
        out.append(d)
    return tuple(out)


def recompose(digits, ring: RingParams) -> int:
    if len(digits) != ring.r:
        raise ValueError(f"expected {ring.r} digits, got {len(digits)}")
    value = 0
    for j, d in enumerate(digits):
        if not 0 <= int(d) < ring.p:
            raise ValueError(f"digit {d} out of range for p={ring.p}")
        value += int(d) * ring.p**j
    return value


def digit_layers(x, ring: RingParams) -> np.ndarray:
    """Elementwise p-adic digits of an array; result has a leading axis of length r."""
    x = np.asarray(x, dtype=np.int64) % ring.modulus
    layers = np.empty((ring.r,) + x.shape, dtype=np.int64)
    for j in range(ring.r):
        layers[j] = x % ring.p
        x = x // ring.p
    return layers


def _check_index(i, ring):
    if not 0 <= i <= ring.r - 1:
        raise IndexError(f"digit index {i} outside 0..{ring.r - 1}")


def truncate_low(x, i: int, ring: RingParams):
    """Keep digits ``0..i``; works on ints and arrays."""
    _check_index(i, ring)
    return ring.reduce(x) % ring.p ** (i + 1)


def truncate_high(x, i: int, ring: RingParams):
    """Keep digits ``i..r-1``; works on ints and arrays."""
    _check_index(i, ring)
    x = ring.reduce(x)
    return x - x % ring.p**i


def exact_div_p(x, i: int, ring: RingParams):
    """Divide by ``p**i``, raising :class:`NotDivisible` on a remainder.

    The quotient stays a ring element; callers reduce mod p when they need a
    field digit.
    """
    if i < 0:
        raise ValueError("power must be non-negative")
    x = ring.reduce(x)
    q = ring.p**i
    if np.any(np.asarray(x) % q):
        raise NotDivisible(f"{x} is not divisible by {ring.p}^{i}")
    return x // q


def is_unit(x: int, ring: RingParams) -> bool:
    return int(x) % ring.p != 0


def unit_inverse(x: int, ring: RingParams) -> int:
    if not is_unit(x, ring):
        raise NotAUnit(f"{int(x) % ring.modulus} is divisible by {ring.p}")
    return pow(int(x), -1, ring.modulus)
