"""Command-line front end: construct, analyze, simulate, encode, decode.

Every subcommand is deterministic given its flags; anything that consumes
randomness takes an explicit --seed.  Exit codes: 0 success, 2 usage error
(argparse), 3 validation failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import construction, reliability, simulate, weights
from .construction import CodeSpec, SpecFormatError
from .decoders import scl_decode

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3


class ValidationFailure(Exception):
    """User input failed a semantic check (exit code 3)."""


def _load_spec(path: str) -> CodeSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return construction.deserialize(fh.read())
    except OSError as exc:
        raise ValidationFailure(f"cannot read code spec: {exc}") from exc
    except SpecFormatError as exc:
        raise ValidationFailure(f"invalid code spec: {exc}") from exc


def _hex_to_bits(line: str, n_bits: int) -> np.ndarray:
    text = line.strip()
    n_bytes = (n_bits + 7) // 8
    if len(text) != 2 * n_bytes:
        raise ValidationFailure(f"expected {2 * n_bytes} hex digits, got {len(text)}")
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise ValidationFailure(f"malformed hex input: {text!r}") from exc
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
    if np.any(bits[n_bits:]):
        raise ValidationFailure("padding bits beyond message length must be zero")
    return bits[:n_bits]


def _bits_to_hex(bits: np.ndarray) -> str:
    return np.packbits(bits.astype(np.uint8), bitorder="little").tobytes().hex()


def _cmd_construct(args) -> int:
    t, q = args.t, args.q
    if t is None or q is None:
        td, qd = construction.default_params(args.n, args.k, t)
        t = td if t is None else t
        q = qd if q is None else q
    try:
        spec = construction.construct(
            args.n, args.k, t=t, q=q, seed=args.seed, design_ebno_db=args.design_snr
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc
    text = construction.serialize(spec)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(text)

    frozen, _, _, _, _ = construction.design_sets(
        spec.n, spec.k, spec.t, spec.q, spec.design_channel
    )
    base_frozen = list(frozen) + list(range(spec.n, spec.full_length))
    d_base, w_base = weights.polar_error_coefficient(base_frozen, spec.m)
    expected = weights.expected_subcode_spectrum(w_base, spec.k, spec.t)
    print(f"wrote {args.out}")
    print(f"n={spec.n} k={spec.k} t={spec.t} q={spec.q} seed={spec.seed}")
    print(f"base code: distance={d_base} codewords_at_distance={w_base}")
    print(f"expected subcode codewords at weight {d_base}: {expected:.6f}")
    return EXIT_OK


def _cmd_reliability(args) -> int:
    m = (args.n - 1).bit_length()
    channel = reliability.ChannelModel(ebno_db=args.design_snr, rate=args.rate)
    profile = reliability.evolve_reliabilities(channel, m, args.n)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            reliability.dump_profile_csv(profile, fh)
        print(f"wrote {args.out}")
    else:
        reliability.dump_profile_csv(profile, sys.stdout)
    return EXIT_OK


def _analyze_one(spec: CodeSpec, args, out_path: str | None) -> list[weights.WeightRecord]:
    if args.exact:
        try:
            records = weights.exact_weight_enumerator(spec)
        except ValueError as exc:
            raise ValidationFailure(str(exc)) from exc
        records = [r for r in records if r.weight <= args.threshold or args.full]
    else:
        cfg = weights.LowWeightSearchConfig(
            weight_threshold=args.threshold,
            iterations=args.budget,
            seed=args.seed,
            depth=args.depth,
        )
        records = weights.low_weight_search(spec, cfg)
    lines = ["weight,count,exact"]
    lines += [f"{r.weight},{r.count},{int(r.exact)}" for r in records]
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return records


def _cmd_analyze(args) -> int:
    if args.code is not None:
        spec = _load_spec(args.code)
        _analyze_one(spec, args, args.out)
        return EXIT_OK

    # batch mode: construct a family of codes and report count statistics
    if args.n is None or args.k is None:
        raise ValidationFailure("batch mode needs --n and --k")
    counts = []
    for offset in range(args.batch_seeds):
        spec = construction.construct(
            args.n, args.k, t=args.t, q=args.q,
            seed=args.seed + offset, design_ebno_db=args.design_snr,
        )
        cfg = weights.LowWeightSearchConfig(
            weight_threshold=args.threshold,
            iterations=args.budget,
            seed=args.seed + offset,
            depth=args.depth,
        )
        found = weights.low_weight_search(spec, cfg)
        counts.append(sum(r.count for r in found))
        print(f"seed={args.seed + offset} count={counts[-1]}", file=sys.stderr, flush=True)
    arr = np.array(counts, dtype=np.int64)
    print(f"codes={arr.size} min={arr.min()} max={arr.max()} mean={arr.mean():.6f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("seed,count\n")
            for offset, c in enumerate(counts):
                fh.write(f"{args.seed + offset},{c}\n")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    spec = _load_spec(args.code)
    try:
        start, stop, step = (float(v) for v in args.snr.split(":"))
    except ValueError as exc:
        raise ValidationFailure(f"bad --snr grid {args.snr!r}, expected start:stop:step") from exc
    try:
        cfg = simulate.SimConfig(
            snr_start=start,
            snr_stop=stop,
            snr_step=step,
            list_size=args.list_size,
            min_errors=args.min_errors,
            max_trials=args.max_trials,
            seed=args.seed,
            workers=args.workers,
        )
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc
    simulate.run_sweep(spec, cfg, csv_path=args.csv)
    print(f"wrote {args.csv}")
    return EXIT_OK


def _cmd_encode(args) -> int:
    spec = _load_spec(args.code)
    for line in sys.stdin:
        if not line.strip():
            continue
        msg = _hex_to_bits(line, spec.k)
        codeword = construction.encode_message(spec, msg)
        print(_bits_to_hex(codeword))
    return EXIT_OK


def _cmd_decode(args) -> int:
    spec = _load_spec(args.code)
    for line in sys.stdin:
        if not line.strip():
            continue
        try:
            llr = np.array([float(v) for v in line.replace(",", " ").split()])
        except ValueError as exc:
            raise ValidationFailure(f"malformed LLR line: {exc}") from exc
        if llr.size != spec.n:
            raise ValidationFailure(f"expected {spec.n} LLR values, got {llr.size}")
        result = scl_decode(spec, llr, args.list_size)
        print(_bits_to_hex(result.message))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarsub",
        description="Randomized polar subcodes: construction, analysis, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and write its spec file")
    p.add_argument("--n", type=int, required=True, help="code length")
    p.add_argument("--k", type=int, required=True, help="code dimension")
    p.add_argument("--t", type=int, default=None, help="low-weight-killing constraints (default: min(m, n-k))")
    p.add_argument("--q", type=int, default=None, help="path-penalty constraints (default: budget top-up)")
    p.add_argument("--design-snr", type=float, required=True, help="design Eb/N0 in dB")
    p.add_argument("--seed", type=int, required=True, help="construction PRNG seed")
    p.add_argument("--out", required=True, help="output spec file path")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("reliability", help="dump the subchannel reliability profile")
    p.add_argument("--n", type=int, required=True, help="code length")
    p.add_argument("--design-snr", type=float, required=True, help="design Eb/N0 in dB")
    p.add_argument("--rate", type=float, required=True, help="code rate for Eb/N0 conversion")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=_cmd_reliability)

    p = sub.add_parser("analyze", help="count low-weight codewords")
    p.add_argument("--code", default=None, help="code spec file")
    p.add_argument("--threshold", type=int, required=True, help="weight threshold")
    p.add_argument("--budget", type=int, default=1000, help="search iterations")
    p.add_argument("--seed", type=int, required=True, help="search seed")
    p.add_argument("--depth", type=int, default=2, choices=(1, 2), help="enumeration depth")
    p.add_argument("--exact", action="store_true", help="brute force (dimension <= 24)")
    p.add_argument("--full", action="store_true", help="with --exact, report all weights")
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.add_argument("--batch-seeds", type=int, default=None, help="construct this many codes and report count stats")
    p.add_argument("--n", type=int, default=None, help="batch mode: code length")
    p.add_argument("--k", type=int, default=None, help="batch mode: code dimension")
    p.add_argument("--t", type=int, default=None, help="batch mode: t override")
    p.add_argument("--q", type=int, default=None, help="batch mode: q override")
    p.add_argument("--design-snr", type=float, default=1.5, help="batch mode: design Eb/N0 in dB")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo FER sweep")
    p.add_argument("--code", required=True, help="code spec file")
    p.add_argument("--snr", required=True, help="grid start:stop:step in dB")
    p.add_argument("--list-size", type=int, required=True, help="decoder list size")
    p.add_argument("--min-errors", type=int, default=100, help="frame errors per point")
    p.add_argument("--max-trials", type=int, default=1_000_000, help="trial cap per point")
    p.add_argument("--seed", type=int, required=True, help="master simulation seed")
    p.add_argument("--csv", required=True, help="output CSV path")
    p.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("encode", help="hex messages on stdin -> hex codewords")
    p.add_argument("--code", required=True, help="code spec file")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="LLR lines on stdin -> hex messages")
    p.add_argument("--code", required=True, help="code spec file")
    p.add_argument("--list-size", type=int, default=1, help="decoder list size")
    p.set_defaults(func=_cmd_decode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "analyze" and (args.code is None) == (args.batch_seeds is None):
        print("analyze: give exactly one of --code or --batch-seeds", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
