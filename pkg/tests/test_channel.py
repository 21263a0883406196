import csv
import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import Z4
from ringconv.channel import (
    FAILURE,
    SUCCESS,
    CampaignReport,
    ExplicitPattern,
    IidSymbol,
    PerWindowWeight,
    count_patterns,
    enumerate_patterns,
    inject,
    max_sliding_weight,
    pattern_entries,
    run_exhaustive,
    run_montecarlo,
    window_weights,
    write_summary_csv,
    write_trials_csv,
)
from ringconv.decoder import analyze
from ringconv.exceptions import TooLarge
from ringconv.io import bundled_system


@pytest.fixture(scope="module")
def cfg():
    s, d = bundled_system("delta3_z4")
    return analyze(s, d["T"], d["theta"])


def test_iid_zero_is_identity():
    clean = np.arange(24).reshape(6, 4) % 4
    received, pattern = inject(IidSymbol(0.0, seed=3), clean, Z4)
    assert np.array_equal(received, clean) and not pattern.any()


def test_iid_one_hits_everything():
    clean = np.zeros((5, 2), dtype=int)
    received, pattern = inject(IidSymbol(1.0), clean, Z4)
    assert np.all(received != 0) and np.array_equal(received, pattern)


def test_iid_validation():
    with pytest.raises(ValueError):
        IidSymbol(1.5)
    with pytest.raises(ValueError):
        PerWindowWeight(-1, 4)


def test_explicit_pattern():
    clean = np.zeros((3, 2), dtype=int)
    received, pattern = inject(ExplicitPattern(((0, 1, 3), (2, 0, 2))), clean, Z4)
    assert received.tolist() == [[0, 3], [0, 0], [2, 0]]
    assert pattern_entries(pattern) == [(0, 1, 3), (2, 0, 2)]
    with pytest.raises(IndexError):
        inject(ExplicitPattern(((3, 0, 1),)), clean, Z4)


def test_per_window_weight_blocks():
    clean = np.zeros((10, 3), dtype=int)
    _, pattern = inject(PerWindowWeight(2, 4, seed=1), clean, Z4)
    assert window_weights(pattern, 4) == [2, 2, 2]


@given(st.integers(0, 2**32), st.integers(0, 50))
def test_injection_is_reproducible(seed, trial):
    clean = np.zeros((8, 3), dtype=int)
    a = inject(IidSymbol(0.3, seed), clean, Z4, trial)[1]
    b = inject(IidSymbol(0.3, seed), clean, Z4, trial)[1]
    assert np.array_equal(a, b)


def test_trials_are_independent_streams():
    clean = np.zeros((30, 3), dtype=int)
    a = inject(IidSymbol(0.5, 9), clean, Z4, 0)[1]
    b = inject(IidSymbol(0.5, 9), clean, Z4, 1)[1]
    assert not np.array_equal(a, b)


def test_max_sliding_weight():
    pattern = np.zeros((6, 2), dtype=int)
    pattern[1, 0] = pattern[3, 1] = 1
    assert max_sliding_weight(pattern, 3) == 2
    assert max_sliding_weight(pattern, 2) == 1
    assert max_sliding_weight(np.zeros((0, 2)), 3) == 0


@pytest.mark.parametrize("length,n,T,weight", [(4, 2, 2, 1), (5, 2, 3, 2), (3, 3, 1, 1), (4, 1, 4, 2)])
def test_pattern_enumeration_matches_bruteforce(length, n, T, weight):
    q = 3
    brute = [
        flat for flat in itertools.product(range(q), repeat=length * n)
        if max_sliding_weight(np.array(flat).reshape(length, n), T) <= weight
    ]
    listed = [p.ravel().tolist() for p in enumerate_patterns(length, n, q, T, weight)]
    assert sorted(map(tuple, listed)) == sorted(brute)
    assert len(set(map(tuple, listed))) == len(listed)
    assert count_patterns(length, n, q, T, weight) == len(brute)


def test_exhaustive_guard(cfg):
    with pytest.raises(TooLarge):
        run_exhaustive(cfg, np.zeros((6, 1), dtype=int), guard=100)


def test_exhaustive_short_message(cfg):
    rep = run_exhaustive(cfg, np.array([[1], [3]]))
    assert rep.trials == count_patterns(5, 4, 4, 4, 1)
    assert rep.successes == rep.trials and rep.wrong_decodes == 0


def test_montecarlo_zero_noise(cfg):
    rep = run_montecarlo(cfg, IidSymbol(0.0, 2), trials=5)
    assert rep.success_rate == 1.0 and rep.ser_in == rep.ser_out == 0.0
    assert rep.entries == 5 * (3 * cfg.T + 3) * 4


def test_montecarlo_deterministic(cfg):
    a = run_montecarlo(cfg, IidSymbol(0.05, 11), trials=20)
    b = run_montecarlo(cfg, IidSymbol(0.05, 11), trials=20)
    assert a == b


def test_report_merge_associative():
    def rep(trial, outcome):
        r = CampaignReport()
        clean = np.zeros((4, 2), dtype=int)
        received = clean.copy()
        received[trial % 4, 0] = 1
        r.record(trial, clean, received, clean if outcome == SUCCESS else received, outcome, 2)
        return r

    a, b, c = rep(0, SUCCESS), rep(1, FAILURE), rep(2, SUCCESS)
    assert a.merge(b).merge(c) == a.merge(b.merge(c)) == c.merge(b).merge(a)
    total = a.merge(b).merge(c)
    assert (total.trials, total.successes, total.failures) == (3, 2, 1)
    assert total.ser_in == pytest.approx(3 / 24)
    assert total.ser_out == pytest.approx(1 / 24)


def test_csv_files(cfg, tmp_path):
    rep = run_montecarlo(cfg, IidSymbol(0.1, 4), trials=3)
    trials_path, summary_path = tmp_path / "t.csv", tmp_path / "s.csv"
    write_trials_csv(trials_path, rep)
    write_summary_csv(summary_path, [(0.1, rep)])
    raw = trials_path.read_bytes()
    assert b"\r" not in raw and raw.isascii()
    rows = list(csv.reader(raw.decode().splitlines()))
    assert rows[0] == ["trial", "window", "in_weight", "out_weight", "result"]
    assert len(rows) - 1 == len(rep.rows)
    summary = list(csv.reader(summary_path.read_text().splitlines()))
    assert summary[0] == ["epsilon", "trials", "success_rate", "ser_in", "ser_out"]
    assert summary[1][:2] == ["0.1", "3"]
    assert float(summary[1][2]) == pytest.approx(rep.success_rate, abs=1e-6)
