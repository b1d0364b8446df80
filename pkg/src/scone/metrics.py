"""Constraint and density measurements for strands and random corpora."""

from __future__ import annotations

import csv
import io
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import Iterable, Sequence

from .coder import Payload, generate_strand, pack_strand
from .fsm import ConstraintConfig, as_indices, new_state
from .model import ProbabilityProvider, UniformProvider


def gc_count(strand: str) -> int:
    return strand.count("G") + strand.count("C")


def gc_ratio(strand: str) -> Fraction | None:
    if not strand:
        return None
    return Fraction(gc_count(strand), len(strand))


def max_run(strand: str) -> int:
    best = run = 0
    prev = None
    for c in strand:
        run = run + 1 if c == prev else 1
        prev = c
        if run > best:
            best = run
    return best


def window_gc_counts(strand: str, window: int) -> list[int]:
    """G/C count of every full window, left to right."""
    if len(strand) < window:
        return []
    isgc = [c in "GC" for c in strand]
    n = sum(isgc[:window])
    out = [n]
    for i in range(window, len(strand)):
        n += isgc[i] - isgc[i - window]
        out.append(n)
    return out


@dataclass
class StrandStats:
    length: int
    gc_ratio: Fraction | None
    max_run: int
    window: int
    window_gc_counts: list[int]
    allowed_count_series: list[int]
    relaxed_steps: int

    @property
    def window_gc_series(self) -> list[Fraction]:
        return [Fraction(n, self.window) for n in self.window_gc_counts]

    def violations(self, config: ConstraintConfig) -> list[str]:
        """Constraint rules of ``config`` this strand breaks."""
        out = []
        if config.hp_enabled and self.max_run > config.hp_max:
            out.append(f"max_run {self.max_run} > {config.hp_max}")
        if config.gc_enabled and self.window == config.window:
            lo, hi = config.gc_min_count, config.gc_max_count
            bad = sum(1 for n in self.window_gc_counts if n < lo or n > hi)
            if bad:
                out.append(f"{bad} GC windows outside [{config.gamma_lo}, {config.gamma_hi}] per-mille")
        return out


def strand_stats(strand: str, config: ConstraintConfig | None = None) -> StrandStats:
    config = config or ConstraintConfig()
    state = new_state(config)
    allowed = []
    relaxed = 0
    for b in as_indices(strand):
        m = state.mask()
        allowed.append(m.count)
        relaxed += m.relaxed
        state.advance(b)
    return StrandStats(
        length=len(strand),
        gc_ratio=gc_ratio(strand),
        max_run=max_run(strand),
        window=config.window,
        window_gc_counts=window_gc_counts(strand, config.window),
        allowed_count_series=allowed,
        relaxed_steps=relaxed,
    )


@dataclass
class StrandRow:
    index: int
    strand_len: int
    core_bases: int
    gc: Fraction | None
    max_run: int
    window_gc_min: int | None
    window_gc_max: int | None
    relaxed_steps: int
    bpn: Fraction | None
    bpn_core: Fraction | None
    encode_ms: float
    decode_ms: float
    ok: bool


@dataclass
class CorpusStats:
    """Corpus aggregates; standard deviations use the population formula."""

    n: int
    roundtrip_success_rate: float | None = None
    gc_mean: float | None = None
    gc_std: float | None = None
    gc_min: float | None = None
    gc_max: float | None = None
    window_gc_min: float | None = None
    window_gc_max: float | None = None
    hp_max: int | None = None
    bpn_core_mean: float | None = None
    bpn_core_std: float | None = None
    bpn_mean: float | None = None
    bpn_std: float | None = None
    strand_len_mean: float | None = None
    relaxed_steps: int = 0
    encode_ms_mean: float | None = None
    decode_ms_mean: float | None = None

    def deterministic_fields(self) -> dict:
        d = asdict(self)
        d.pop("encode_ms_mean")
        d.pop("decode_ms_mean")
        return d


def _mean_std(values: Sequence[Fraction]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values, Fraction(0)) / n
    var = sum(((v - mean) ** 2 for v in values), Fraction(0)) / n
    return float(mean), math.sqrt(var)


def aggregate(rows: Iterable[StrandRow], window: int) -> CorpusStats:
    rows = sorted(rows, key=lambda r: r.index)
    stats = CorpusStats(n=len(rows))
    if not rows:
        return stats
    stats.roundtrip_success_rate = sum(r.ok for r in rows) / len(rows)
    gcs = [r.gc for r in rows if r.gc is not None]
    if gcs:
        stats.gc_mean, stats.gc_std = _mean_std(gcs)
        stats.gc_min, stats.gc_max = float(min(gcs)), float(max(gcs))
    wmins = [r.window_gc_min for r in rows if r.window_gc_min is not None]
    wmaxs = [r.window_gc_max for r in rows if r.window_gc_max is not None]
    if wmins:
        stats.window_gc_min = min(wmins) / window
        stats.window_gc_max = max(wmaxs) / window
    stats.hp_max = max(r.max_run for r in rows)
    core = [r.bpn_core for r in rows if r.bpn_core is not None]
    if core:
        stats.bpn_core_mean, stats.bpn_core_std = _mean_std(core)
    raw = [r.bpn for r in rows if r.bpn is not None]
    if raw:
        stats.bpn_mean, stats.bpn_std = _mean_std(raw)
    stats.strand_len_mean = sum(r.strand_len for r in rows) / len(rows)
    stats.relaxed_steps = sum(r.relaxed_steps for r in rows)
    stats.encode_ms_mean = sum(r.encode_ms for r in rows) / len(rows)
    stats.decode_ms_mean = sum(r.decode_ms for r in rows) / len(rows)
    return stats


def random_payloads(n: int, len_bits: int, seed: int) -> list[Payload]:
    rng = random.Random(seed)
    nbytes = (len_bits + 7) // 8
    return [Payload(rng.randbytes(nbytes), len_bits) for _ in range(n)]


def evaluate_payload(
    index: int, payload: Payload, provider: ProbabilityProvider, config: ConstraintConfig
) -> StrandRow:
    t0 = time.perf_counter()
    strand = generate_strand(payload, provider, config)
    t1 = time.perf_counter()
    try:
        ok = pack_strand(strand, provider, config, payload.bit_length) == payload
    except ValueError:
        ok = False
    t2 = time.perf_counter()
    st = strand_stats(strand.bases, config)
    counts = st.window_gc_counts
    return StrandRow(
        index=index,
        strand_len=len(strand),
        core_bases=strand.core_bases,
        gc=st.gc_ratio,
        max_run=st.max_run,
        window_gc_min=min(counts) if counts else None,
        window_gc_max=max(counts) if counts else None,
        relaxed_steps=st.relaxed_steps,
        bpn=Fraction(payload.bit_length, len(strand)) if len(strand) else None,
        bpn_core=Fraction(payload.bit_length, strand.core_bases) if strand.core_bases else None,
        encode_ms=(t1 - t0) * 1e3,
        decode_ms=(t2 - t1) * 1e3,
        ok=ok,
    )


def _eval_chunk(args) -> list[StrandRow]:
    start, payloads, provider, config = args
    return [evaluate_payload(start + i, p, provider, config) for i, p in enumerate(payloads)]


def corpus_eval(
    n: int,
    len_bits: int,
    provider: ProbabilityProvider | None = None,
    config: ConstraintConfig | None = None,
    seed: int = 0,
    workers: int = 1,
) -> tuple[CorpusStats, list[StrandRow]]:
    """Roundtrip ``n`` seeded random payloads and aggregate their statistics.

    Payloads are drawn up front from one seeded generator, so results do not
    depend on ``workers``; rows come back sorted by index.
    """
    provider = provider or UniformProvider()
    config = config or ConstraintConfig()
    payloads = random_payloads(n, len_bits, seed)
    if workers <= 1 or n < 2 * workers:
        rows = _eval_chunk((0, payloads, provider, config))
    else:
        size = -(-n // (workers * 4))
        chunks = [(i, payloads[i : i + size], provider, config) for i in range(0, n, size)]
        rows = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_eval_chunk, chunks):
                rows.extend(part)
    rows.sort(key=lambda r: r.index)
    return aggregate(rows, config.window), rows


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, Fraction):
        return f"{float(v):.6f}"
    if isinstance(v, float):
        return f"{v:.6f}"
    if isinstance(v, bool):
        return "1" if v else "0"
    return str(v)


def rows_to_csv(rows: Iterable[StrandRow]) -> str:
    buf = io.StringIO()
    names = [f.name for f in fields(StrandRow)]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for r in rows:
        w.writerow([_fmt(getattr(r, k)) for k in names])
    return buf.getvalue()


def series_to_csv(strand: str, config: ConstraintConfig | None = None) -> str:
    """Per-position allowed-base counts and trailing-window GC ratios."""
    config = config or ConstraintConfig()
    st = strand_stats(strand, config)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["position", "base", "allowed_count", "window_gc"])
    for i, c in enumerate(strand):
        j = i - config.window + 1
        wgc = f"{st.window_gc_counts[j] / config.window:.6f}" if j >= 0 else ""
        w.writerow([i, c, st.allowed_count_series[i], wgc])
    return buf.getvalue()
