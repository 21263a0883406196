"""``ringconv`` command line.

Exit codes: 0 success, 1 parse or usage error, 2 decoder hypothesis
violated, 3 decoding failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import channel
from .decoder import analyze, decode_stream
from .exceptions import DecodeFailure, HypothesisViolated, RingConvError
from .io import (
    ParseError,
    format_pattern,
    format_rows,
    parse_pattern,
    read_rows,
    read_system,
    write_text,
)
from .linalg import rank_mod_p

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_HYPOTHESIS = 2
EXIT_DECODE = 3

SEED_ENV = "RINGCONV_SEED"


class UsageError(Exception):
    pass


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _window(args, defaults):
    T = args.T if args.T is not None else defaults.get("T")
    theta = args.theta if args.theta is not None else defaults.get("theta")
    if T is None or theta is None:
        raise UsageError("window length -T and --theta are required (not set in the system file)")
    return T, theta


def _emit(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        write_text(path, text)


def cmd_params(args) -> int:
    s, defaults = read_system(args.system)
    T, theta = _window(args, defaults)
    p = s.ring.p
    print(f"ring: {s.ring}  delta={s.delta} k={s.k} n={s.n}  T={T} theta={theta}")
    print(f"A invertible: {s.a_invertible()}")
    if T >= 1:
        print(f"rank Phi_T mod p: {rank_mod_p(s.reachability_matrix(T), p)} (need {s.delta})")
    if theta >= 1:
        print(f"rank Psi_theta mod p: {rank_mod_p(s.observability_matrix(theta), p)} (need {s.delta})")
    if args.encoder:
        from .io import parse_poly_matrix
        from .system import check_encoder_consistency

        with open(args.encoder, encoding="ascii") as handle:
            g = parse_poly_matrix(handle.read(), s.ring, args.encoder)
        print(f"encoder: nu={g.nu} complexity={g.complexity()} pdp={g.is_pdp()} "
              f"consistent={check_encoder_consistency(s, g, args.max_deg)}")
    cfg = analyze(s, T, theta)
    print(f"d1={cfg.d1} d2={cfg.d2} lambda={cfg.lam} t_gen={cfg.t_gen} t_par={cfg.t_par}")
    return EXIT_OK


def cmd_encode(args) -> int:
    s, _ = read_system(args.system)
    messages = read_rows(args.messages, s.k, s.ring.modulus)
    _emit(args.output, format_rows(s.encode_stream(messages, terminate=args.terminate).symbols))
    return EXIT_OK


def cmd_corrupt(args) -> int:
    s, defaults = read_system(args.system)
    clean = read_rows(args.sequence, s.n, s.ring.modulus)
    seed = _seed(args)
    if args.epsilon is not None:
        model = channel.IidSymbol(args.epsilon, seed)
    elif args.per_window_weight is not None:
        T = args.T if args.T is not None else defaults.get("T")
        if T is None:
            raise UsageError("--per-window-weight needs -T")
        model = channel.PerWindowWeight(args.per_window_weight, T, seed)
    else:
        with open(args.pattern_file, encoding="ascii") as handle:
            model = channel.ExplicitPattern(parse_pattern(handle.read(), args.pattern_file), seed)
    try:
        received, pattern = channel.inject(model, clean, s.ring)
    except IndexError as exc:
        raise ParseError(str(exc)) from None
    _emit(args.output, format_rows(received))
    if args.pattern_out:
        write_text(args.pattern_out, format_pattern(channel.pattern_entries(pattern)))
    return EXIT_OK


def cmd_decode(args) -> int:
    s, defaults = read_system(args.system)
    T, theta = _window(args, defaults)
    received = read_rows(args.received, s.n, s.ring.modulus)
    cfg = analyze(s, T, theta)
    decoded = decode_stream(cfg, received)
    _emit(args.output, format_rows(decoded))
    if args.message_out:
        inputs = decoded[:, s.outputs:]
        write_text(args.message_out, format_rows(inputs[: max(len(inputs) - s.delta, 0)]))
    return EXIT_OK


def cmd_simulate(args) -> int:
    s, defaults = read_system(args.system)
    T, theta = _window(args, defaults)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    cfg = analyze(s, T, theta)
    seed = _seed(args)
    results = []
    combined = channel.CampaignReport()
    cache = {}
    for index, eps in enumerate(args.epsilon):
        rep = channel.run_montecarlo(cfg, channel.IidSymbol(eps, seed), args.trials,
                                     args.message_length, cache=cache)
        # trial numbers run on across the epsilon sweep
        rep.rows = [(index * args.trials + r[0],) + r[1:] for r in rep.rows]
        results.append((eps, rep))
        combined = combined.merge(rep)
        print(f"epsilon={eps:g} trials={rep.trials} success={rep.successes} "
              f"failures={rep.failures} wrong={rep.wrong_decodes} "
              f"ser_in={rep.ser_in:.6f} ser_out={rep.ser_out:.6f}")
    if args.csv:
        channel.write_trials_csv(args.csv, combined)
        summary = args.summary or _summary_path(args.csv)
        channel.write_summary_csv(summary, results)
    return EXIT_OK


def _summary_path(path: str) -> str:
    stem, ext = os.path.splitext(path)
    return f"{stem}_summary{ext or '.csv'}"


def cmd_selftest(args) -> int:
    from .selftest import run_all

    text = None
    if args.vectors:
        with open(args.vectors, encoding="ascii", errors="replace") as handle:
            text = handle.read()
    results = run_all(text)
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"selftest failed: first failing check [{failed[0].number}] {failed[0].name}",
              file=sys.stderr)
        return EXIT_PARSE
    print(f"selftest passed: {len(results)} checks")
    return EXIT_OK


def _add_window(parser):
    parser.add_argument("-T", type=int, help="window length (default from the system file)")
    parser.add_argument("--theta", type=int, help="symbols committed per window")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringconv", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("params", help="check decoder hypotheses and print code parameters")
    p.add_argument("system")
    _add_window(p)
    p.add_argument("--encoder", help="polynomial encoder file to check against the system")
    p.add_argument("--max-deg", type=int, default=2, help="message degree bound for --encoder")
    p.set_defaults(func=cmd_params)

    p = sub.add_parser("encode", help="encode message rows into (y, u) symbols")
    p.add_argument("system")
    p.add_argument("messages")
    p.add_argument("--terminate", action="store_true", help="append steering steps to state zero")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", help="add channel errors to a sequence")
    p.add_argument("system")
    p.add_argument("sequence")
    model = p.add_mutually_exclusive_group(required=True)
    model.add_argument("--epsilon", type=float)
    model.add_argument("--per-window-weight", type=int)
    model.add_argument("--pattern-file")
    p.add_argument("-T", type=int, help="block length for --per-window-weight")
    p.add_argument("--seed", type=int, help=f"defaults to ${SEED_ENV}, then 0")
    p.add_argument("-o", "--output")
    p.add_argument("--pattern-out", help="write the applied error pattern here")
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("decode", help="sliding-window decode a received sequence")
    p.add_argument("system")
    p.add_argument("received")
    _add_window(p)
    p.add_argument("-o", "--output")
    p.add_argument("--message-out", help="also write the recovered message rows")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte-Carlo campaign over symbol error rates")
    p.add_argument("system")
    _add_window(p)
    p.add_argument("--epsilon", type=float, nargs="+", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--message-length", type=int, help="message rows per trial (default 3T)")
    p.add_argument("--seed", type=int, help=f"defaults to ${SEED_ENV}, then 0")
    p.add_argument("--csv", help="per-window trial CSV")
    p.add_argument("--summary", help="summary CSV (default <csv>_summary.csv)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="run the bundled acceptance checks")
    p.add_argument("--vectors", help="known-answer vector file (default: bundled)")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except HypothesisViolated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except DecodeFailure as exc:
        print(f"decode failure at position {exc.position}: {exc}", file=sys.stderr)
        return EXIT_DECODE
    except (ParseError, UsageError, RingConvError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
