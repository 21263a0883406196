"""Desk-scale acceptance checks shared by ``ringconv selftest`` and the test suite.

Each check compares the library against an independent brute-force oracle
and reports its wall time against a fixed limit.
"""

from __future__ import annotations

import contextlib
import io
import itertools
import os
import tempfile
import time
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .block import (
    BlockCode,
    FieldDecoder,
    all_vectors,
    gv_decode,
    min_distance_bruteforce,
    tln_decode,
    xi_check,
)
from .channel import decode_outcome, max_sliding_weight, run_exhaustive, random_message
from .decoder import analyze, decode_stream, lambda_bound
from .exceptions import DecodeFailure, NotAUnit
from .io import BUNDLED_SYSTEMS, ParseError, bundled_system, parse_key_values, parse_matrix
from .linalg import is_injective, is_surjective, mat_mul, mat_pow
from .ring import (
    RingParams,
    digit_layers,
    padic_expand,
    recompose,
    truncate_high,
    truncate_low,
    unit_inverse,
)

Z4 = RingParams(2, 2)
Z9 = RingParams(3, 2)


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    ok: bool
    detail: str
    seconds: float
    limit: float

    @property
    def passed(self) -> bool:
        return self.ok and self.seconds < self.limit

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} [{self.number}] {self.name}: {self.detail} "
                f"({self.seconds:.2f} s, limit {self.limit:g} s)")


def _timed(number, name, limit, body) -> CheckResult:
    start = time.perf_counter()
    try:
        ok, detail = body()
    except Exception as exc:  # a crashing check is a failing check
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return CheckResult(number, name, ok, detail, time.perf_counter() - start, limit)


# -- 1 ----------------------------------------------------------------------

def _padic_suite():
    bad = 0
    checked = 0
    for ring in (RingParams(2, 2), RingParams(2, 3), RingParams(3, 2), RingParams(3, 3)):
        for x in ring.elements():
            checked += 1
            digits = padic_expand(x, ring)
            if recompose(digits, ring) != x or sum(d * ring.p**j for j, d in enumerate(digits)) != x:
                bad += 1
            for i in range(ring.r - 1):
                if truncate_low(x, i, ring) + truncate_high(x, i + 1, ring) != x:
                    bad += 1
            if truncate_low(x, ring.r - 1, ring) != x or truncate_high(x, 0, ring) != x:
                bad += 1
            if x % ring.p:
                if (x * unit_inverse(x, ring)) % ring.modulus != 1:
                    bad += 1
            else:
                try:
                    unit_inverse(x, ring)
                    bad += 1
                except NotAUnit:
                    pass
    return bad == 0, f"{checked} elements over Z/4, Z/8, Z/9, Z/27, {bad} failures"


def check_padic() -> CheckResult:
    return _timed(1, "p-adic layer suite", 1.0, _padic_suite)


# -- 2 ----------------------------------------------------------------------

def _image_size(m, q):
    rows, cols = m.shape
    images = (all_vectors(q, cols) @ m.T) % q
    return len(np.unique(images, axis=0)) if rows else 1


def _criterion_agrees(m, ring):
    q = ring.modulus
    size = _image_size(m, q)
    inj = size == q ** m.shape[1]
    sur = size == q ** m.shape[0]
    return inj == is_injective(m, ring) and sur == is_surjective(m, ring)


def _rank_criterion():
    mismatches = 0
    exhaustive = 0
    for rows, cols in itertools.product((1, 2), repeat=2):
        for flat in itertools.product(range(4), repeat=rows * cols):
            exhaustive += 1
            mismatches += not _criterion_agrees(np.array(flat).reshape(rows, cols), Z4)
    rng = np.random.default_rng(20240601)
    rings = (RingParams(2, 3), Z9)
    for i in range(10_000):
        ring = rings[i % 2]
        rows, cols = rng.integers(1, 4, size=2)
        m = rng.integers(0, ring.modulus, size=(rows, cols))
        # bias toward rank-deficient matrices so both answers are exercised
        if rng.random() < 0.3:
            m = (m * ring.p) % ring.modulus
        mismatches += not _criterion_agrees(m, ring)
    return mismatches == 0, f"{exhaustive} exhaustive + 10000 random matrices, {mismatches} mismatches"


def check_rank_criterion() -> CheckResult:
    return _timed(2, "injectivity/surjectivity vs brute force", 30.0, _rank_criterion)


# -- 3 ----------------------------------------------------------------------

def _random_free_generator(rng, ring, n, k):
    while True:
        g = rng.integers(0, ring.modulus, size=(n, k))
        if is_injective(g, ring):
            return g


def _dmin_invariance():
    rng = np.random.default_rng(7)
    mismatches = 0
    codes = 60
    for i in range(codes):
        ring = RingParams((2, 3)[i % 2], 1 + (i // 2) % 2)
        k = int(rng.integers(1, 4))
        n = int(rng.integers(k, 7))
        g = _random_free_generator(rng, ring, n, k)
        words = (all_vectors(ring.modulus, k)[1:] @ g.T) % ring.modulus
        ring_dmin = int(np.count_nonzero(words, axis=1).min())
        mismatches += ring_dmin != min_distance_bruteforce(g, ring.p)
    return mismatches == 0, f"{codes} random free codes, {mismatches} mismatches"


def check_dmin_invariance() -> CheckResult:
    return _timed(3, "minimum distance equals its mod-p value", 60.0, _dmin_invariance)


# -- 4 / 5 ------------------------------------------------------------------

def repetition_codes():
    """Length-3 repetition codes over Z/4 and Z/9 with generator and parity matrices."""
    out = []
    for ring in (Z4, Z9):
        m = ring.modulus
        g = np.ones((3, 1), dtype=np.int64)
        h = np.array([[1, m - 1, 0], [0, 1, m - 1]], dtype=np.int64)
        out.append(BlockCode(ring, generator=g, parity=h))
    return out


def _layer_bounded_errors(ring, n, t):
    errors = all_vectors(ring.modulus, n)
    layers = digit_layers(errors, ring)
    keep = (np.count_nonzero(layers, axis=2) <= t).all(axis=0)
    return errors[keep]


def _gv_guarantee():
    wrong = 0
    trials = 0
    for code in repetition_codes():
        ring = code.ring
        inner = FieldDecoder.from_generator(code.generator_mod_p(), ring.p)
        for e in _layer_bounded_errors(ring, code.n, inner.t):
            for u in ring.elements():
                trials += 1
                msg = np.array([u])
                try:
                    res = gv_decode(code, (code.encode(msg) + e) % ring.modulus, inner)
                    wrong += not (np.array_equal(res.message, msg) and np.array_equal(res.error, e))
                except DecodeFailure:
                    wrong += 1
    return wrong == 0, f"{trials} (message, error) pairs over Z/4 and Z/9, {wrong} not corrected"


def check_gv() -> CheckResult:
    return _timed(4, "GV corrects every layer-bounded error", 60.0, _gv_guarantee)


def coset_leaders(h, ring):
    """Map syndrome bytes to the list of minimum-weight solutions, by enumeration."""
    errors = all_vectors(ring.modulus, h.shape[1])
    syndromes = (errors @ h.T) % ring.modulus
    weights = np.count_nonzero(errors, axis=1)
    best = {}
    for e, s, w in zip(errors, syndromes, weights):
        key = s.tobytes()
        if key not in best or w < best[key][0]:
            best[key] = (w, [e])
        elif w == best[key][0]:
            best[key][1].append(e)
    return best


def _tln_coset():
    mismatches = 0
    checked = 0
    for code in repetition_codes():
        ring = code.ring
        inner = FieldDecoder.from_parity(code.parity, ring.p)
        leaders = coset_leaders(code.parity, ring)
        for e in all_vectors(ring.modulus, code.n):
            if np.count_nonzero(e) > inner.t:
                continue
            checked += 1
            s = code.syndrome(e)
            w, sols = leaders[s.tobytes()]
            got = tln_decode(code, s, inner)
            mismatches += len(sols) != 1 or not np.array_equal(got, sols[0])
    rng = np.random.default_rng(11)
    rings = (Z4, RingParams(2, 3), Z9, RingParams(3, 3))
    xi_bad = 0
    for i in range(1000):
        ring = rings[i % 4]
        rows, cols = int(rng.integers(1, 4)), int(rng.integers(1, 6))
        h = rng.integers(0, ring.modulus, size=(rows, cols))
        e = rng.integers(0, ring.modulus, size=cols)
        s = mat_mul(h, e, ring)
        digits = digit_layers(e, ring)
        l = int(rng.integers(0, ring.r))
        want = mat_mul(h % ring.p, digits[l], ring.residue_field)
        xi_bad += not np.array_equal(xi_check(h, s, list(digits[:l]), l, ring), want)
    ok = mismatches == 0 and xi_bad == 0
    return ok, (f"{checked} syndromes vs coset-leader enumeration ({mismatches} mismatches), "
                f"1000 xi_check instances ({xi_bad} mismatches)")


def check_tln() -> CheckResult:
    return _timed(5, "TLN equals the brute-force coset leader", 60.0, _tln_coset)


# -- 6 ----------------------------------------------------------------------

def _trajectory_identities():
    rng = np.random.default_rng(5)
    bad = 0
    for name in ("scalar_z4", "delta2_z4"):
        s, _ = bundled_system(name)
        ring = s.ring
        q = s.outputs
        for _ in range(1000):
            length = int(rng.integers(1, 12))
            traj = s.encode_stream(rng.integers(0, ring.modulus, size=(length, s.k)))
            bad += not traj.terminated
            total = len(traj)
            theta = int(rng.integers(1, 4))
            if total < theta + 1:
                continue
            l = int(rng.integers(0, total - theta))
            tau = int(rng.integers(0, total - theta - l))
            start = tau + l + 1
            y = traj.outputs[start:start + theta].ravel()
            u = traj.inputs[start:start + theta].ravel()
            lhs = (y - mat_mul(s.markov_toeplitz(theta), u, ring)) % ring.modulus
            bad += not np.array_equal(lhs, mat_mul(s.observability_matrix(theta), traj.states[start], ring))
            drift = (traj.states[start] - mat_mul(mat_pow(s.A, l + 1, ring), traj.states[tau], ring)) % ring.modulus
            reached = mat_mul(s.reachability_matrix(l + 1), traj.inputs[tau:start].ravel(), ring)
            bad += not np.array_equal(drift, reached)
    return bad == 0, f"2000 random terminated trajectories, {bad} violations"


def check_trajectories() -> CheckResult:
    return _timed(6, "trajectory identities", 30.0, _trajectory_identities)


# -- 7 ----------------------------------------------------------------------

def _exhaustive_recovery():
    parts = []
    ok = True
    for name in BUNDLED_SYSTEMS:
        s, defaults = bundled_system(name)
        cfg = analyze(s, defaults["T"], defaults["theta"])
        message = random_message(s, 3 * cfg.T, seed=2024)
        rep = run_exhaustive(cfg, message)
        ok &= rep.successes == rep.trials and rep.wrong_decodes == 0
        parts.append(f"{name} lambda={cfg.lam}: {rep.successes}/{rep.trials} exact, "
                     f"{rep.wrong_decodes} wrong")
    return ok, "; ".join(parts)


def check_exhaustive_recovery() -> CheckResult:
    return _timed(7, "exhaustive recovery under the window budget", 300.0, _exhaustive_recovery)


# -- 8 ----------------------------------------------------------------------

LAMBDA_TABLE = (
    # d1, T, theta, expected
    (5, 8, 2, 2), (3, 12, 3, 1), (1, 5, 1, 0), (1, 100, 3, 0), (2, 4, 1, 0),
    (3, 2, 1, 1), (3, 3, 2, 0), (4, 4, 1, 1), (5, 4, 1, 2), (7, 4, 1, 2),
    (7, 6, 1, 3), (9, 6, 1, 3), (9, 100, 1, 4), (9, 7, 2, 1), (9, 8, 2, 2),
    (11, 20, 4, 2), (11, 21, 2, 5), (6, 5, 4, 0), (13, 13, 1, 6), (100, 12, 1, 6),
)


def _lambda_table():
    bad = [row for row in LAMBDA_TABLE if lambda_bound(*row[:3]) != row[3]]
    return not bad, f"{len(LAMBDA_TABLE)} cases, mismatches {bad}"


def check_lambda() -> CheckResult:
    return _timed(8, "lambda formula table", 1.0, _lambda_table)


# -- 9 ----------------------------------------------------------------------

def _over_budget_pattern(rng, length, n, q, T, weight):
    """Random pattern whose heaviest sliding window has exactly ``weight`` errors."""
    while True:
        pattern = np.zeros((length, n), dtype=np.int64)
        if rng.random() < 0.5:
            # single burst inside one window
            start = int(rng.integers(0, length - T + 1))
            cells = start * n + rng.choice(T * n, size=weight, replace=False)
        else:
            count = int(rng.integers(weight, weight * (length // T + 1) + 1))
            cells = rng.choice(length * n, size=min(count, length * n), replace=False)
        pattern.flat[cells] = rng.integers(1, q, size=len(cells))
        if max_sliding_weight(pattern, T) == weight:
            return pattern


def _soundness(cases=10_000):
    rng = np.random.default_rng(99)
    counts = {"success": 0, "failure": 0, "wrong": 0}
    configs = []
    for name in BUNDLED_SYSTEMS:
        s, defaults = bundled_system(name)
        configs.append(analyze(s, defaults["T"], defaults["theta"]))
    caches = [{} for _ in configs]
    for i in range(cases):
        cfg = configs[i % len(configs)]
        s = cfg.system
        clean = s.encode_stream(rng.integers(0, s.ring.modulus, size=(3 * cfg.T, s.k))).symbols
        pattern = _over_budget_pattern(rng, len(clean), s.n, s.ring.modulus, cfg.T, cfg.lam + 1)
        _, outcome = decode_outcome(cfg, clean, (clean + pattern) % s.ring.modulus,
                                    caches[i % len(configs)])
        counts[outcome] += 1
    return counts["wrong"] == 0, (f"{cases} over-budget patterns: {counts['success']} corrected, "
                                  f"{counts['failure']} failures, {counts['wrong']} wrong")


def check_soundness() -> CheckResult:
    return _timed(9, "soundness sentinel", 120.0, _soundness)


# -- 10 ---------------------------------------------------------------------

def _pipeline_once(workdir, seed):
    """encode -> corrupt -> decode in ``workdir``; ``seed=None`` uses a fixed pattern file."""
    from .cli import main

    system = os.path.join(workdir, "system.txt")
    with open(system, "w", encoding="ascii") as handle:
        handle.write(resources.files("ringconv").joinpath("data", "delta3_z4.txt").read_text("ascii"))
    messages = os.path.join(workdir, "messages.txt")
    with open(messages, "w", encoding="ascii") as handle:
        handle.write("".join(f"{v}\n" for v in (1, 2, 3, 0, 1, 1, 2, 3, 3, 0, 2, 1)))
    paths = {key: os.path.join(workdir, f"{key}.txt")
             for key in ("encoded", "received", "pattern", "decoded", "recovered")}
    if seed is None:
        model = ["--pattern-file", os.path.join(workdir, "given.txt")]
        with open(model[1], "w", encoding="ascii") as handle:
            handle.write("1 0 2\n6 3 1\n11 2 3\n")
    else:
        model = ["--per-window-weight", "1", "-T", "4", "--seed", str(seed)]
    with contextlib.redirect_stderr(io.StringIO()):
        codes = _run_pipeline(main, system, messages, model, paths)
    blobs = {}
    for key, path in paths.items():
        if os.path.exists(path):
            with open(path, "rb") as handle:
                blobs[key] = handle.read()
    return codes, blobs


def _run_pipeline(main, system, messages, model, paths):
    return [
        main(["encode", system, messages, "--terminate", "-o", paths["encoded"]]),
        main(["corrupt", system, paths["encoded"], *model,
              "-o", paths["received"], "--pattern-out", paths["pattern"]]),
        main(["decode", system, paths["received"], "-o", paths["decoded"],
              "--message-out", paths["recovered"]]),
    ]


def _pipeline_sound(codes, blobs):
    """Decoding must succeed within the budget and may only fail, never mislead, beyond it."""
    s, defaults = bundled_system("delta3_z4")
    entries = [tuple(map(int, line.split())) for line in blobs["pattern"].decode().splitlines()]
    n_steps = len(blobs["encoded"].decode().splitlines())
    pattern = np.zeros((n_steps, s.n), dtype=np.int64)
    for t, c, v in entries:
        pattern[t, c] = v
    within = max_sliding_weight(pattern, defaults["T"]) <= analyze(s, defaults["T"], defaults["theta"]).lam
    if codes[2] == 0:
        return blobs["decoded"] == blobs["encoded"]
    return codes[2] == 3 and not within


def _cli_determinism():
    runs = {}
    for seed in (4242, 7, None):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            runs[seed] = (_pipeline_once(a, seed), _pipeline_once(b, seed))
    same = all(first == second for first, second in runs.values())
    sound = all(_pipeline_sound(*first) for first, _ in runs.values())
    sound &= runs[None][0][0] == [0, 0, 0]
    ascii_lf = all(b"\r" not in blob and blob.isascii()
                   for first, _ in runs.values() for blob in first[1].values())
    codes = {("pattern file" if seed is None else f"seed {seed}"): first[0]
             for seed, (first, _) in runs.items()}
    return same and sound and ascii_lf, (f"exit codes {codes}, byte-identical={same}, "
                                         f"sound={sound}, ascii/LF={ascii_lf}")


def check_cli() -> CheckResult:
    return _timed(10, "CLI pipeline determinism", 10.0, _cli_determinism)


# -- bundled vectors --------------------------------------------------------

def read_vectors(text: str):
    """Known-answer vectors: blocks introduced by a ``[vector]`` line."""
    blocks = []
    current = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line == "[vector]":
            current = []
            blocks.append(current)
        elif line:
            if current is None:
                raise ParseError("vector data before the first [vector] header")
            current.append(line)
    return [parse_key_values("\n".join(block), "vectors") for block in blocks]


def _rows(value, width):
    count = len(value.split(";")) if value.strip() else 0
    return parse_matrix(value, (count, width), "vectors")


def check_vectors(text=None) -> CheckResult:
    def body():
        source = text
        if source is None:
            source = resources.files("ringconv").joinpath("data", "vectors.txt").read_text("ascii")
        vectors = read_vectors(source)
        bad = []
        for i, vec in enumerate(vectors):
            s, defaults = bundled_system(vec["system"])
            cfg = analyze(s, defaults["T"], defaults["theta"])
            encoded = s.encode_stream(_rows(vec["message"], s.k)).symbols
            if not np.array_equal(encoded, _rows(vec["encoded"], s.n)):
                bad.append(f"vector {i} encode")
            decoded = decode_stream(cfg, _rows(vec["received"], s.n))
            if not np.array_equal(decoded, _rows(vec["decoded"], s.n)):
                bad.append(f"vector {i} decode")
        return not bad and bool(vectors), f"{len(vectors)} vectors, failures {bad}"

    try:
        return _timed(0, "bundled known-answer vectors", 10.0, body)
    except Exception as exc:  # malformed file or undecodable vector
        return CheckResult(0, "bundled known-answer vectors", False, f"{type(exc).__name__}: {exc}", 0.0, 10.0)


ALL_CHECKS = (check_padic, check_rank_criterion, check_dmin_invariance, check_gv, check_tln,
              check_trajectories, check_exhaustive_recovery, check_lambda, check_soundness, check_cli)


def run_all(vectors_text=None, echo=print) -> list[CheckResult]:
    results = [check_vectors(vectors_text)]
    echo(results[0].line())
    for check in ALL_CHECKS:
        results.append(check())
        echo(results[-1].line())
    return results
