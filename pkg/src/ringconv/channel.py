"""Error injection and decoding campaigns.

Randomness is counter based: every trial draws from a Philox stream keyed
by ``(seed, trial)``, so a campaign can be replayed, split or reordered
without changing any individual trial.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ._validation import check_ring_array
from .decoder import DecoderConfig, decode_stream
from .exceptions import DecodeFailure, TooLarge
from .ring import RingParams

PATTERN_GUARD = 10**7

SUCCESS = "success"
FAILURE = "failure"
WRONG = "wrong"


def trial_rng(seed: int, trial: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial, stream])))


@dataclass(frozen=True)
class IidSymbol:
    """Each ring entry is replaced by a different uniform value with probability ``epsilon``."""

    epsilon: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")


@dataclass(frozen=True)
class PerWindowWeight:
    """Exactly ``weight`` corrupted entries in every disjoint block of ``T`` symbols."""

    weight: int
    T: int
    seed: int = 0

    def __post_init__(self):
        if self.weight < 0 or self.T < 1:
            raise ValueError("need weight >= 0 and T >= 1")


@dataclass(frozen=True)
class ExplicitPattern:
    """Additive errors given as ``(t, component, value)`` triples."""

    entries: tuple = ()
    seed: int = 0


def inject(model, clean, ring: RingParams, trial: int = 0):
    """Corrupt a symbol sequence.

    Returns ``(corrupted, pattern)`` where ``pattern`` is the additive error
    array, so ``corrupted = clean + pattern`` mod p^r.
    """
    clean = check_ring_array(clean, ring, ndim=2, name="clean")
    q = ring.modulus
    pattern = np.zeros_like(clean)
    if isinstance(model, IidSymbol):
        rng = trial_rng(model.seed, trial)
        hit = rng.random(clean.shape) < model.epsilon
        offsets = rng.integers(1, q, size=clean.shape)
        pattern[hit] = offsets[hit]
    elif isinstance(model, PerWindowWeight):
        rng = trial_rng(model.seed, trial)
        n = clean.shape[1]
        for start in range(0, clean.shape[0], model.T):
            cells = min(model.T, clean.shape[0] - start) * n
            chosen = rng.choice(cells, size=min(model.weight, cells), replace=False)
            values = rng.integers(1, q, size=len(chosen))
            for cell, value in zip(chosen, values):
                pattern[start + cell // n, cell % n] = value
    elif isinstance(model, ExplicitPattern):
        for t, comp, value in model.entries:
            if not (0 <= t < clean.shape[0] and 0 <= comp < clean.shape[1]):
                raise IndexError(f"pattern entry ({t}, {comp}) outside {clean.shape}")
            pattern[t, comp] = (pattern[t, comp] + value) % q
    else:
        raise TypeError(f"unknown channel model {model!r}")
    return (clean + pattern) % q, pattern


def pattern_entries(pattern) -> list[tuple[int, int, int]]:
    """Nonzero cells of an error array as ``(t, component, value)``."""
    return [(int(t), int(c), int(pattern[t, c])) for t, c in zip(*np.nonzero(pattern))]


def window_weights(pattern, T: int) -> list[int]:
    """Error weight of each disjoint block of ``T`` symbols."""
    per_step = np.count_nonzero(pattern, axis=1)
    return [int(per_step[i:i + T].sum()) for i in range(0, len(per_step), T)]


def max_sliding_weight(pattern, T: int) -> int:
    pattern = np.asarray(pattern)
    if pattern.shape[0] == 0:
        return 0
    per_step = np.count_nonzero(pattern.reshape(len(pattern), -1), axis=1)
    sums = np.convolve(per_step, np.ones(min(T, per_step.size), dtype=np.int64), mode="valid")
    return int(sums.max())


@dataclass
class CampaignReport:
    """Aggregated outcome of a campaign; ``merge`` is associative and commutative."""

    trials: int = 0
    successes: int = 0
    failures: int = 0
    wrong_decodes: int = 0
    errors_in: int = 0
    errors_out: int = 0
    entries: int = 0
    histogram: Counter = field(default_factory=Counter)
    rows: list = field(default_factory=list)
    keep_rows: bool = True

    @property
    def ser_in(self) -> float:
        return self.errors_in / self.entries if self.entries else 0.0

    @property
    def ser_out(self) -> float:
        return self.errors_out / self.entries if self.entries else 0.0

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def record(self, trial: int, clean, received, decoded, outcome: str, T: int):
        self.trials += 1
        if outcome == SUCCESS:
            self.successes += 1
        elif outcome == FAILURE:
            self.failures += 1
        else:
            self.wrong_decodes += 1
        in_err = np.asarray(received) != clean
        out_err = np.asarray(decoded) != clean
        self.errors_in += int(in_err.sum())
        self.errors_out += int(out_err.sum())
        self.entries += clean.size
        w_in, w_out = window_weights(in_err, T), window_weights(out_err, T)
        self.histogram.update(w_in)
        if self.keep_rows:
            self.rows.extend((trial, i, a, b, outcome) for i, (a, b) in enumerate(zip(w_in, w_out)))

    def merge(self, other: "CampaignReport") -> "CampaignReport":
        rows = sorted(self.rows + other.rows)
        return CampaignReport(
            self.trials + other.trials, self.successes + other.successes,
            self.failures + other.failures, self.wrong_decodes + other.wrong_decodes,
            self.errors_in + other.errors_in, self.errors_out + other.errors_out,
            self.entries + other.entries, self.histogram + other.histogram, rows,
            self.keep_rows and other.keep_rows)


def decode_outcome(cfg: DecoderConfig, clean, received, cache=None):
    """Decode ``received`` and classify it against ``clean``."""
    try:
        decoded = decode_stream(cfg, received, cache=cache)
    except DecodeFailure:
        return received, FAILURE
    return decoded, SUCCESS if np.array_equal(decoded, clean) else WRONG


def count_patterns(length: int, n: int, q: int, T: int, weight: int) -> int:
    """Number of error arrays with every length-``T`` window of weight at most ``weight``."""
    per_weight = [math.comb(n, j) * (q - 1) ** j for j in range(min(n, weight) + 1)]

    @lru_cache(maxsize=None)
    def count(t, recent):
        if t == length:
            return 1
        total = 0
        for j, ways in enumerate(per_weight):
            if sum(recent) + j <= weight:
                total += ways * count(t + 1, (recent + (j,))[-(T - 1):] if T > 1 else ())
        return total

    return count(0, ())


def _vectors_by_weight(n: int, q: int, weight: int):
    out = [[] for _ in range(weight + 1)]
    for flat in np.ndindex(*(q,) * n):
        w = sum(1 for v in flat if v)
        if w <= weight:
            out[w].append(np.array(flat, dtype=np.int64))
    return out


def enumerate_patterns(length: int, n: int, q: int, T: int, weight: int):
    """Yield every error array with sliding length-``T`` window weight at most ``weight``."""
    by_weight = _vectors_by_weight(n, q, min(n, weight))
    pattern = np.zeros((length, n), dtype=np.int64)
    steps = [0] * length

    def walk(t):
        if t == length:
            yield pattern
            return
        used = sum(steps[max(0, t - T + 1):t])
        for w in range(min(n, weight - used) + 1):
            steps[t] = w
            for vec in by_weight[w]:
                pattern[t] = vec
                yield from walk(t + 1)
        steps[t] = 0
        pattern[t] = 0

    yield from walk(0)


def run_exhaustive(cfg: DecoderConfig, message, weight=None, guard: int = PATTERN_GUARD,
                   cache=None) -> CampaignReport:
    """Decode the encoded ``message`` under every pattern of sliding window weight ``<= weight``.

    ``weight`` defaults to the decoder budget ``cfg.lam``.

    Raises
    ------
    TooLarge
        If the number of patterns exceeds ``guard``.
    """
    s = cfg.system
    ring = s.ring
    weight = cfg.lam if weight is None else int(weight)
    clean = s.encode_stream(message).symbols
    total = count_patterns(clean.shape[0], s.n, ring.modulus, cfg.T, weight)
    if total > guard:
        raise TooLarge(f"{total} patterns exceed the guard {guard}")
    cache = {} if cache is None else cache
    report = CampaignReport(keep_rows=False)
    for trial, pattern in enumerate(enumerate_patterns(clean.shape[0], s.n, ring.modulus, cfg.T, weight)):
        received = (clean + pattern) % ring.modulus
        decoded, outcome = decode_outcome(cfg, clean, received, cache)
        report.record(trial, clean, received, decoded, outcome, cfg.T)
    return report


def random_message(s, length: int, seed: int, trial: int = 0) -> np.ndarray:
    return trial_rng(seed, trial, 1).integers(0, s.ring.modulus, size=(length, s.k))


def run_montecarlo(cfg: DecoderConfig, model, trials: int, message_length=None,
                   cache=None) -> CampaignReport:
    """Random messages of ``message_length`` (default ``3 T``) sent through ``model``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    s = cfg.system
    length = 3 * cfg.T if message_length is None else message_length
    report = CampaignReport()
    for trial in range(trials):
        clean = s.encode_stream(random_message(s, length, model.seed, trial)).symbols
        received, _ = inject(model, clean, s.ring, trial)
        decoded, outcome = decode_outcome(cfg, clean, received, cache)
        report.record(trial, clean, received, decoded, outcome, cfg.T)
    return report


def _writer(handle):
    return csv.writer(handle, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)


def write_trials_csv(path, report: CampaignReport):
    with open(path, "w", encoding="ascii", newline="") as handle:
        w = _writer(handle)
        w.writerow(["trial", "window", "in_weight", "out_weight", "result"])
        w.writerows(report.rows)


def write_summary_csv(path, results):
    """``results`` is a list of ``(epsilon, report)`` pairs."""
    with open(path, "w", encoding="ascii", newline="") as handle:
        w = _writer(handle)
        w.writerow(["epsilon", "trials", "success_rate", "ser_in", "ser_out"])
        for eps, rep in results:
            w.writerow([f"{eps:g}", rep.trials, f"{rep.success_rate:.6f}",
                        f"{rep.ser_in:.6f}", f"{rep.ser_out:.6f}"])
