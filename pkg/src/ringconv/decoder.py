"""Sliding-window decoding of I/S/O convolutional codes over Z/p^r.

A window holds ``T`` received symbols starting at a time whose state is
already known.  Attempt ``h`` splits the first ``T - (h-1)*theta`` of them
into an input segment of length ``T - h*theta`` followed by an observer
block of ``theta`` symbols:

1. the observer block, with the input contribution removed, is a word of
   the block code spanned by the observability matrix; lifting decoding
   gives the state at the start of the block;
2. the state mismatch over the input segment is a syndrome for the
   reachability matrix; lifting syndrome decoding gives the input errors;
3. the corrected inputs are replayed through the recurrence.

The candidate is accepted when its total correction weight is at most
``lam - (h - 1)``; otherwise the next attempt shortens the span by
``theta``.  An accepted window commits its first ``theta`` symbols and the
state after them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_ring_array
from .block import BlockCode, FieldDecoder, gv_decode, min_distance_bruteforce, tln_decode
from .exceptions import DecodeFailure, HypothesisViolated, WindowExhausted, WindowRetry
from .linalg import is_injective, is_surjective, mat_mul, mat_pow, nullspace_mod_p
from .system import IsoSystem

CONDITION_A = "(1) A is invertible"
CONDITION_PHI = "(2) reachability matrix Phi_T is surjective"
CONDITION_PSI = "(3) observability matrix Psi_theta is injective"


def lambda_bound(d1: int, T: int, theta: int) -> int:
    """Per-window weight budget ``min((d1 - 1) // 2, T // (2 theta))``."""
    if not (T > theta >= 1):
        raise ValueError(f"need T > theta >= 1, got T={T}, theta={theta}")
    if d1 < 1:
        raise ValueError("d1 must be at least 1")
    return min((d1 - 1) // 2, T // (2 * theta))


@dataclass(frozen=True)
class DecoderConfig:
    """Everything the window decoder needs for one system and ``(T, theta)``.

    Built by :func:`analyze`.  ``inner_gen`` decodes the residue code of the
    observability matrix and ``inner_par`` the kernel of the reachability
    matrix mod p; ``parity_decoders[m]`` serves input segments of length ``m``.
    """

    system: IsoSystem
    T: int
    theta: int
    d1: int
    d2: int
    lam: int
    inner_gen: FieldDecoder
    inner_par: FieldDecoder
    observer_code: BlockCode = field(repr=False)
    toeplitz: np.ndarray = field(repr=False)
    parity_codes: dict = field(repr=False)
    parity_decoders: dict = field(repr=False)
    a_powers: tuple = field(repr=False)

    @property
    def t_gen(self) -> int:
        return self.inner_gen.t

    @property
    def t_par(self) -> int:
        return self.inner_par.t

    def budget(self, h: int) -> int:
        return self.lam - (h - 1)

    def max_attempts(self) -> int:
        return min(self.T // self.theta, self.lam + 1)


def analyze(s: IsoSystem, T: int, theta: int) -> DecoderConfig:
    """Check the decoding hypotheses and build the inner decoders.

    Raises
    ------
    HypothesisViolated
        Naming the first failing condition.
    """
    if not (T > theta >= 1):
        raise HypothesisViolated("T > theta >= 1", f"need T > theta >= 1, got T={T}, theta={theta}")
    ring = s.ring
    if not s.a_invertible():
        raise HypothesisViolated(CONDITION_A)
    phi = s.reachability_matrix(T)
    if not is_surjective(phi, ring):
        raise HypothesisViolated(CONDITION_PHI)
    psi = s.observability_matrix(theta)
    if not is_injective(psi, ring):
        raise HypothesisViolated(CONDITION_PSI)

    d1 = min_distance_bruteforce(nullspace_mod_p(phi, ring.p).T, ring.p)
    d2 = min_distance_bruteforce(psi % ring.p, ring.p)
    k = s.k
    parity_codes, parity_decoders = {}, {}
    for m in range(1, T + 1):
        # Phi_m is the trailing m blocks of Phi_T
        block = phi[:, (T - m) * k:]
        parity_codes[m] = BlockCode(ring, parity=block)
        parity_decoders[m] = FieldDecoder.from_parity(block % ring.p, ring.p)
    a_powers = tuple(mat_pow(s.A, m, ring) for m in range(T + 1))
    return DecoderConfig(
        system=s, T=T, theta=theta, d1=d1, d2=d2, lam=lambda_bound(d1, T, theta),
        inner_gen=FieldDecoder.from_generator(psi % ring.p, ring.p),
        inner_par=parity_decoders[T],
        observer_code=BlockCode(ring, generator=psi),
        toeplitz=s.markov_toeplitz(theta),
        parity_codes=parity_codes, parity_decoders=parity_decoders, a_powers=a_powers,
    )


@dataclass(frozen=True)
class WindowResult:
    decoded: np.ndarray
    next_state: np.ndarray
    attempts: int
    corrections: int


def _solve_inputs(cfg: DecoderConfig, inputs, x_start, x_end):
    """Input errors over a segment from the state mismatch it leaves behind."""
    s = cfg.system
    ring = s.ring
    m = inputs.shape[0]
    if m == 0:
        if not np.array_equal(x_start, x_end):
            raise DecodeFailure("empty input segment cannot change the state")
        return inputs
    reached = mat_mul(cfg.parity_codes[m].parity, inputs.ravel(), ring)
    drift = (x_end - mat_mul(cfg.a_powers[m], x_start, ring)) % ring.modulus
    syndrome = (reached - drift) % ring.modulus
    errors = tln_decode(cfg.parity_codes[m], syndrome, cfg.parity_decoders[m], check_rank=False)
    return (inputs - errors.reshape(m, s.k)) % ring.modulus


def decode_window(cfg: DecoderConfig, window, x_in, h: int = 1) -> WindowResult:
    """One attempt on a window of ``T`` received symbols starting in state ``x_in``.

    Raises :class:`WindowRetry` carrying ``h + 1`` when the attempt is
    rejected and :class:`WindowExhausted` when ``h`` is out of range.
    """
    s = cfg.system
    ring = s.ring
    T, theta, q = cfg.T, cfg.theta, s.outputs
    if h < 1 or h * theta > T or cfg.budget(h) < 0:
        raise WindowExhausted(f"no attempt h={h} for T={T}, theta={theta}, lambda={cfg.lam}")
    window = check_ring_array(window, ring, shape=(T, s.n), name="window")
    x_in = check_ring_array(x_in, ring, shape=(s.delta,), name="x_in")

    m = T - h * theta  # input segment length
    span = m + theta
    obs = window[m:span]
    word = (obs[:, :q].ravel() - mat_mul(cfg.toeplitz, obs[:, q:].ravel(), ring)) % ring.modulus
    try:
        x_obs = gv_decode(cfg.observer_code, word, cfg.inner_gen).message
        inputs = _solve_inputs(cfg, window[:m, q:], x_in, x_obs)
    except DecodeFailure as exc:
        raise WindowRetry(h + 1, str(exc)) from exc

    traj = s.simulate(np.vstack([inputs, obs[:, q:]]), x0=x_in)
    assert np.array_equal(traj.states[m], x_obs)
    candidate = traj.symbols
    corrections = int(np.count_nonzero(candidate != window[:span]))
    if corrections > cfg.budget(h):
        raise WindowRetry(h + 1, f"correction weight {corrections} > budget {cfg.budget(h)}")
    return WindowResult(candidate[:theta], traj.states[theta], h, corrections)


def decode_window_retrying(cfg: DecoderConfig, window, x_in) -> WindowResult:
    """Run attempts ``h = 1, 2, ...`` until one is accepted."""
    h = 1
    while True:
        try:
            return decode_window(cfg, window, x_in, h)
        except WindowRetry as retry:
            h = retry.next_h


def decode_tail(cfg: DecoderConfig, tail, x_in) -> np.ndarray:
    """Decode the last ``< T`` symbols using the known final state zero."""
    s = cfg.system
    ring = s.ring
    tail = check_ring_array(tail, ring, name="tail").reshape(-1, s.n)
    x_in = check_ring_array(x_in, ring, shape=(s.delta,), name="x_in")
    zero = np.zeros(s.delta, dtype=np.int64)
    inputs = _solve_inputs(cfg, tail[:, s.outputs:], x_in, zero)
    traj = s.simulate(inputs, x0=x_in)
    corrections = int(np.count_nonzero(traj.symbols != tail))
    if corrections > cfg.lam:
        raise DecodeFailure(f"tail correction weight {corrections} > lambda={cfg.lam}")
    return traj.symbols


def decode_stream(cfg: DecoderConfig, received, x0=None, cache=None, attempts=None) -> np.ndarray:
    """Decode a terminated received sequence (rows are symbols ``(y, u)``).

    ``cache`` may be a dict reused across calls; windows are memoised on
    ``(state, window contents)``.  If ``attempts`` is a list, the accepted
    attempt index of every window is appended to it.

    Raises
    ------
    DecodeFailure
        With ``position`` set to the start of the first undecodable window.
    """
    s = cfg.system
    ring = s.ring
    received = check_ring_array(received, ring, name="received").reshape(-1, s.n)
    x = np.zeros(s.delta, dtype=np.int64) if x0 is None else check_ring_array(
        x0, ring, shape=(s.delta,), name="x0")
    T, theta = cfg.T, cfg.theta
    pieces = []
    tau = 0
    while received.shape[0] - tau >= T:
        window = received[tau:tau + T]
        key = (x.tobytes(), window.tobytes())
        result = cache.get(key) if cache is not None else None
        if result is None:
            try:
                result = decode_window_retrying(cfg, window, x)
            except DecodeFailure as exc:
                result = exc
            if cache is not None:
                cache[key] = result
        if isinstance(result, DecodeFailure):
            raise DecodeFailure("window exhausted", position=tau) from result
        if attempts is not None:
            attempts.append(result.attempts)
        pieces.append(result.decoded)
        x = result.next_state
        tau += theta
    tail = received[tau:]
    key = (b"tail", x.tobytes(), tail.tobytes())
    result = cache.get(key) if cache is not None else None
    if result is None:
        try:
            result = decode_tail(cfg, tail, x)
        except DecodeFailure as exc:
            result = exc
        if cache is not None:
            cache[key] = result
    if isinstance(result, DecodeFailure):
        raise DecodeFailure("tail undecodable", position=tau) from result
    pieces.append(result)
    return np.vstack(pieces) if pieces else received[:0].copy()


class ConvolutionalDecoder(BaseEstimator, TransformerMixin):
    """Estimator front end for the sliding-window decoder.

    Parameters
    ----------
    system : IsoSystem
    T : int
        Window length.
    theta : int
        Symbols committed per accepted window.
    cache : bool, default True
        Memoise window decisions across calls to ``predict``.

    ``fit`` checks the hypotheses (``config_`` holds the result);
    ``predict``/``transform`` return the corrected symbol sequence.
    """

    def __init__(self, system=None, T=4, theta=1, cache=True):
        self.system = system
        self.T = T
        self.theta = theta
        self.cache = cache

    def fit(self, X=None, y=None):
        if not isinstance(self.system, IsoSystem):
            raise TypeError("system must be an IsoSystem")
        self.config_ = analyze(self.system, self.T, self.theta)
        self.lambda_ = self.config_.lam
        self._cache = {} if self.cache else None
        return self

    def predict(self, X):
        check_is_fitted(self, "config_")
        return decode_stream(self.config_, X, cache=self._cache)

    def transform(self, X):
        return self.predict(X)
