"""``scone`` command line.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import warnings
from pathlib import Path

from .coder import IllegalStrand, PayloadMismatch
from .container import (
    FastaError,
    RecordError,
    read_fasta,
    read_record,
    write_fasta,
    write_record,
)
from .fsm import ConfigError, ConstraintConfig
from .harness import (
    ablation_report,
    decode_record,
    encode_bytes,
    encode_latent,
    eval_report,
    parse_pmf,
)
from .latent import LatentAdapter, parse_symbols
from .metrics import rows_to_csv, strand_stats

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2

_CONFIG_KEYS = {
    "window": ("window", int),
    "gc_lo": ("gamma_lo", int),
    "gc_hi": ("gamma_hi", int),
    "hp_max": ("hp_max", int),
    "guard_bits": ("guard_bits", int),
    "gc": ("gc_enabled", lambda v: v.lower() in ("1", "true", "yes", "on")),
    "hp": ("hp_enabled", lambda v: v.lower() in ("1", "true", "yes", "on")),
}


class UsageError(Exception):
    pass


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: bad config line {line!r}")
        field, conv = _CONFIG_KEYS[key]
        try:
            out[field] = conv(value.strip())
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return out


def build_config(args: argparse.Namespace) -> ConstraintConfig:
    values: dict = {}
    if args.config:
        values.update(read_config_file(args.config))
    for flag, field in (
        ("window", "window"),
        ("gc_lo", "gamma_lo"),
        ("gc_hi", "gamma_hi"),
        ("hp_max", "hp_max"),
        ("guard_bits", "guard_bits"),
    ):
        v = getattr(args, flag)
        if v is not None:
            values[field] = v
    if args.no_gc:
        values["gc_enabled"] = False
    if args.no_hp:
        values["hp_enabled"] = False
    try:
        return ConstraintConfig(**values)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _add_constraint_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("constraints")
    g.add_argument("--gc-lo", type=int, help="lower GC bound, per-mille (default 450)")
    g.add_argument("--gc-hi", type=int, help="upper GC bound, per-mille (default 550)")
    g.add_argument("--window", type=int, help="GC window length in bases (default 20)")
    g.add_argument("--hp-max", type=int, help="longest allowed homopolymer (default 3)")
    g.add_argument("--guard-bits", type=int, help="zero guard bits after the payload (default 32)")
    g.add_argument("--no-gc", action="store_true", help="disable the GC window rule")
    g.add_argument("--no-hp", action="store_true", help="disable the homopolymer rule")
    g.add_argument("--config", help="key = value config file; flags override it")


def _write_json(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_encode(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.latent and args.pmf:
        raise UsageError("--latent and --pmf cannot be combined")
    data = Path(args.input).read_bytes()
    if args.latent:
        try:
            adapter = LatentAdapter.from_json(json.loads(Path(args.latent).read_text()))
            symbols = parse_symbols(data.decode())
        except (ValueError, KeyError) as exc:
            raise UsageError(f"bad latent input: {exc}") from None
        record = encode_latent(symbols, adapter, config)
    else:
        provider = None
        if args.pmf:
            try:
                provider = parse_pmf(args.pmf)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
        record = encode_bytes(data, config, provider)
    out = args.out or args.input + ".scn1"
    Path(out).write_bytes(write_record(record))
    if args.fasta:
        Path(args.fasta).write_text(write_fasta([record.strand], [Path(args.input).name]))
    st = strand_stats(record.strand, config)
    print(
        f"{args.input}: {record.payload_bit_length} bits -> {len(record.strand)} bases, "
        f"GC {float(st.gc_ratio or 0):.3f}, max run {st.max_run} -> {out}",
        file=sys.stderr,
    )
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    record = read_record(Path(args.record).read_bytes())
    data = decode_record(record)
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.buffer.write(data)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.n < 1 or args.len < 0:
        raise UsageError("--n must be >= 1 and --len >= 0")
    try:
        provider = parse_pmf(args.pmf) if args.pmf else None
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report, rows = eval_report(args.n, args.len, args.seed, config, provider, args.workers)
    if args.csv:
        Path(args.csv).write_text(rows_to_csv(rows))
    _write_json(report, args.out)
    if args.out:
        for k, v in report["summary"].items():
            print(f"{k:<28} {v}")
    return EXIT_OK


def cmd_ablate(args: argparse.Namespace) -> int:
    config = build_config(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    report = ablation_report(args.n, args.len, args.seed, config, args.workers)
    _write_json(report, args.out)
    if args.out:
        print(f"{'config':<8} {'gc_std':>7} {'hp_max':>6} {'bpn_core':>8} {'bpn':>6}")
        for name, row in report["rows"].items():
            print(
                f"{name:<8} {row['gc_std']:7.4f} {row['hp_max']:6d} "
                f"{row['bpn_core']:8.4f} {row['bpn']:6.3f}"
            )
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    config = build_config(args)
    records = read_fasta(Path(args.fasta).read_text())
    per = []
    violating = 0
    for sid, seq in records:
        st = strand_stats(seq, config)
        v = st.violations(config)
        violating += bool(v)
        per.append(
            {
                "id": sid,
                "length": st.length,
                "gc": None if st.gc_ratio is None else float(st.gc_ratio),
                "max_run": st.max_run,
                "window_gc_min": min(st.window_gc_counts) / config.window if st.window_gc_counts else None,
                "window_gc_max": max(st.window_gc_counts) / config.window if st.window_gc_counts else None,
                "violations": v,
            }
        )
    gcs = [p["gc"] for p in per if p["gc"] is not None]
    report = {
        "config": dataclasses.asdict(config),
        "strands": per,
        "aggregate": {
            "n": len(per),
            "violating_strands": violating,
            "gc_mean": sum(gcs) / len(gcs) if gcs else None,
            "hp_max": max((p["max_run"] for p in per), default=None),
        },
    }
    _write_json(report, args.out)
    return EXIT_DATA if violating and args.strict else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scone", description="Constraint-aware quaternary transcoding of bits into DNA strands."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="encode a file into a .scn1 strand record")
    p.add_argument("input")
    p.add_argument("--out", help="record path (default INPUT.scn1)")
    p.add_argument("--fasta", help="also write the strand as FASTA")
    p.add_argument("--latent", metavar="JSON", help="treat INPUT as latent symbols, params from JSON")
    p.add_argument("--pmf", help="static base weights A,T,G,C instead of uniform")
    _add_constraint_flags(p)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="recover the original file from a .scn1 record")
    p.add_argument("record")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_decode)

    for name, func, n_default, help_ in (
        ("eval", cmd_eval, 5000, "roundtrip a random corpus and report constraint/density stats"),
        ("ablate", cmd_ablate, 1000, "run the full/no_fsm/gc_only/hp_only variants"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--n", type=int, default=n_default, help="number of sequences")
        p.add_argument("--len", type=int, default=100, help="symbols per sequence (2 bits each)")
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out", help="JSON report path (default stdout)")
        if name == "eval":
            p.add_argument("--csv", help="per-strand CSV path")
            p.add_argument("--pmf", help="static base weights A,T,G,C instead of uniform")
        _add_constraint_flags(p)
        p.set_defaults(func=func)

    p = sub.add_parser("stats", help="constraint statistics for a FASTA file")
    p.add_argument("--fasta", required=True)
    p.add_argument("--out", help="JSON report path (default stdout)")
    p.add_argument("--strict", action="store_true", help="exit 1 if any strand violates the config")
    _add_constraint_flags(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except UsageError as exc:
        print(f"scone: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IllegalStrand as exc:
        print(f"scone: illegal strand: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (PayloadMismatch, RecordError, FastaError, ValueError, OSError) as exc:
        print(f"scone: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
