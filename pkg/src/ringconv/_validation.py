"""Input validation in the spirit of ``sklearn.utils.check_array``."""

from __future__ import annotations

import numbers

import numpy as np

from .ring import RingParams


def check_ring(ring=None, p=None, r=None) -> RingParams:
    if isinstance(ring, RingParams):
        return ring
    if ring is not None:
        raise TypeError(f"expected RingParams, got {type(ring).__name__}")
    if p is None:
        raise ValueError("either ring or p must be given")
    return RingParams(p, 1 if r is None else r)


def check_ring_array(x, ring: RingParams, *, ndim=None, shape=None, name="array",
                     reduce=True) -> np.ndarray:
    """Return ``x`` as a C-contiguous int64 array of canonical residues.

    ``shape`` may contain ``None`` wildcards.  With ``reduce=False`` values
    outside ``[0, p**r)`` raise instead of being wrapped.
    """
    arr = np.asarray(x)
    if arr.dtype == object or arr.dtype.kind not in "iub":
        if arr.size and not all(isinstance(v, numbers.Integral) for v in arr.flat):
            raise TypeError(f"{name} must contain integers")
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if shape is not None:
        if arr.ndim != len(shape) or any(
            want is not None and want != got for want, got in zip(shape, arr.shape)
        ):
            raise ValueError(f"{name} has shape {arr.shape}, expected {shape}")
    if reduce:
        return arr % ring.modulus
    if arr.size and (arr.min() < 0 or arr.max() >= ring.modulus):
        raise ValueError(f"{name} has entries outside [0, {ring.modulus})")
    return arr


def check_field_array(x, p: int, *, ndim=None, name="array") -> np.ndarray:
    return check_ring_array(x, RingParams(p, 1), ndim=ndim, name=name)
