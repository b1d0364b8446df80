"""Evaluation runs, ablation variants and file-level encode/decode."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

from .coder import Payload, generate_strand, unpack_strand
from .container import StrandRecord
from .fsm import ConstraintConfig
from .latent import LatentAdapter, format_symbols, pack_params, unpack_params
from .metrics import CorpusStats, StrandRow, corpus_eval
from .model import ProbabilityProvider, StaticPmfProvider, UniformProvider, pmf_from_probs

VARIANTS = ("full", "no_fsm", "gc_only", "hp_only")

BPN_FOOTNOTE = (
    "bpn_core = payload bits / bases emitted before the guard tail (reported as Bit/nt); "
    "bpn = payload bits / full strand length including the guard tail."
)


@dataclass(frozen=True)
class AblationConfig:
    variant: str
    base: ConstraintConfig = ConstraintConfig()

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown ablation variant {self.variant!r}")

    @property
    def config(self) -> ConstraintConfig:
        gc, hp = {
            "full": (True, True),
            "no_fsm": (False, False),
            "gc_only": (True, False),
            "hp_only": (False, True),
        }[self.variant]
        return dataclasses.replace(self.base, gc_enabled=gc, hp_enabled=hp)


def _r(v: float | None, nd: int = 4) -> float | None:
    return None if v is None else round(v, nd)


def summary_rows(stats: CorpusStats) -> dict:
    """Aggregate block keyed by the reported metric names."""
    return {
        "GC Ratio (mean ± std)": [_r(stats.gc_mean), _r(stats.gc_std)],
        "GC Ratio (range)": [_r(stats.gc_min), _r(stats.gc_max)],
        "Homopolymer (max)": stats.hp_max,
        "Bit/nt (mean ± std)": [_r(stats.bpn_core_mean), _r(stats.bpn_core_std)],
        "Encode/Decode latency (ms)": [_r(stats.encode_ms_mean, 3), _r(stats.decode_ms_mean, 3)],
        "Roundtrip success": stats.roundtrip_success_rate,
    }


def eval_report(
    n: int,
    len_symbols: int,
    seed: int,
    config: ConstraintConfig,
    provider: ProbabilityProvider | None = None,
    workers: int = 1,
) -> tuple[dict, list[StrandRow]]:
    provider = provider or UniformProvider()
    stats, rows = corpus_eval(n, 2 * len_symbols, provider, config, seed, workers)
    report = {
        "n": n,
        "len_symbols": len_symbols,
        "payload_bits": 2 * len_symbols,
        "seed": seed,
        "config": dataclasses.asdict(config),
        "provider": provider.provider_id,
        "summary": summary_rows(stats),
        "stats": dataclasses.asdict(stats),
        "footnote": BPN_FOOTNOTE,
    }
    return report, rows


def ablation_report(
    n: int,
    len_symbols: int,
    seed: int,
    base: ConstraintConfig | None = None,
    workers: int = 1,
    variants: Sequence[str] = VARIANTS,
) -> dict:
    base = base or ConstraintConfig()
    out: dict = {"n": n, "len_symbols": len_symbols, "seed": seed, "rows": {}}
    for v in variants:
        cfg = AblationConfig(v, base).config
        stats, _ = corpus_eval(n, 2 * len_symbols, UniformProvider(), cfg, seed, workers)
        out["rows"][v] = {
            "gc_std": stats.gc_std,
            "hp_max": stats.hp_max,
            "bpn_core": stats.bpn_core_mean,
            "bpn": stats.bpn_mean,
            "roundtrip_success_rate": stats.roundtrip_success_rate,
            "window_gc_range": [stats.window_gc_min, stats.window_gc_max],
            "latency_ms": (stats.encode_ms_mean or 0.0) + (stats.decode_ms_mean or 0.0),
        }
    rows = out["rows"]
    if "full" in rows and "no_fsm" in rows and rows["no_fsm"]["latency_ms"]:
        out["fsm_latency_overhead_pct"] = 100.0 * (
            rows["full"]["latency_ms"] / rows["no_fsm"]["latency_ms"] - 1.0
        )
    out["footnote"] = BPN_FOOTNOTE
    return out


def encode_bytes(
    data: bytes, config: ConstraintConfig, provider: ProbabilityProvider | None = None
) -> StrandRecord:
    provider = provider or UniformProvider()
    payload = Payload(data)
    strand = generate_strand(payload, provider, config)
    return StrandRecord(
        config=config,
        payload_bit_length=payload.bit_length,
        strand=strand.bases,
        provider_id=provider.provider_id,
        provider_params=provider.params(),
    )


def encode_latent(
    symbols: Sequence[Sequence[int]], adapter: LatentAdapter, config: ConstraintConfig
) -> StrandRecord:
    payload = adapter.encode(symbols)
    strand = generate_strand(payload, UniformProvider(), config)
    return StrandRecord(
        config=config,
        payload_bit_length=payload.bit_length,
        strand=strand.bases,
        provider_id="latent_adapter",
        provider_params=pack_params(adapter, [len(s) for s in symbols]),
    )


def decode_record(record: StrandRecord) -> bytes:
    """Recover the original file content from a record.

    Byte payloads come back verbatim; latent payloads come back as the
    canonical symbol text (one channel per line).
    """
    payload = unpack_strand(
        record.strand, record.payload_bit_length, record.provider(), record.config
    )
    if record.provider_id == "latent_adapter":
        adapter, counts = unpack_params(record.provider_params)
        return format_symbols(adapter.decode(payload, counts)).encode()
    if payload.bit_length % 8:
        raise ValueError("payload is not a whole number of bytes")
    return payload.data


def parse_pmf(text: str) -> StaticPmfProvider:
    """``a,t,g,c`` weights, rescaled to the coder total."""
    weights = [float(x) for x in text.split(",")]
    if len(weights) != 4 or any(w <= 0 for w in weights):
        raise ValueError("--pmf needs four positive weights A,T,G,C")
    s = sum(weights)
    return StaticPmfProvider(pmf_from_probs([w / s for w in weights]))
