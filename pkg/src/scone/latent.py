"""Quantized latent symbols to payload bits and back.

Two modes:

``digits``  each symbol becomes ``digits`` base-4 digits of its zigzag value,
            packed two bits per digit, MSB first.
``model``   symbols are arithmetic-coded under each channel's discretized
            Gaussian PMF.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .coder import ArithmeticDecoder, ArithmeticEncoder, Payload, _bit_reader
from .model import (
    TOTAL_BITS,
    LatentAdapterConfig,
    base4_map,
    base4_unmap,
    gaussian_symbol_pmf,
)

MODES = ("digits", "model")


def symbols_to_payload(
    symbols: Sequence[int], cfg: LatentAdapterConfig, mode: str = "digits"
) -> Payload:
    return LatentAdapter([cfg], mode).encode([symbols])


def payload_to_symbols(
    payload: Payload, count: int, cfg: LatentAdapterConfig, mode: str = "digits"
) -> list[int]:
    return LatentAdapter([cfg], mode).decode(payload, [count])[0]


@dataclass
class LatentAdapter:
    channels: list[LatentAdapterConfig]
    mode: str = "digits"

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown latent mode {self.mode!r}")
        if not self.channels:
            raise ValueError("need at least one channel")

    def _check(self, symbols: Sequence[Sequence[int]]) -> None:
        if len(symbols) != len(self.channels):
            raise ValueError(f"expected {len(self.channels)} channels, got {len(symbols)}")
        for ch, (cfg, syms) in enumerate(zip(self.channels, symbols)):
            for k in syms:
                if not cfg.k_min <= k <= cfg.k_max:
                    raise ValueError(
                        f"channel {ch}: symbol {k} outside support [{cfg.k_min}, {cfg.k_max}]"
                    )

    def encode(self, symbols: Sequence[Sequence[int]]) -> Payload:
        self._check(symbols)
        if self.mode == "digits":
            bits: list[int] = []
            for cfg, syms in zip(self.channels, symbols):
                for k in syms:
                    for d in base4_map(k, cfg.digits):
                        bits.append(d >> 1)
                        bits.append(d & 1)
            return Payload.from_bits(bits)

        enc = ArithmeticEncoder()
        for cfg, syms in zip(self.channels, symbols):
            cum = _cum(gaussian_symbol_pmf(cfg))
            for k in syms:
                i = k - cfg.k_min
                enc.encode(cum[i], cum[i + 1], TOTAL_BITS)
        return Payload.from_bits(enc.finish())

    def decode(self, payload: Payload, counts: Sequence[int]) -> list[list[int]]:
        if len(counts) != len(self.channels):
            raise ValueError("need one symbol count per channel")
        out: list[list[int]] = []
        if self.mode == "digits":
            bits = payload.bits()
            need = sum(2 * cfg.digits * c for cfg, c in zip(self.channels, counts))
            if need != len(bits):
                raise ValueError(f"payload has {len(bits)} bits, symbols need {need}")
            pos = 0
            for cfg, count in zip(self.channels, counts):
                syms = []
                for _ in range(count):
                    digits = []
                    for _ in range(cfg.digits):
                        digits.append(bits[pos] << 1 | bits[pos + 1])
                        pos += 2
                    syms.append(base4_unmap(digits))
                out.append(syms)
            return out

        dec = ArithmeticDecoder(_bit_reader(payload))
        for cfg, count in zip(self.channels, counts):
            cum = _cum(gaussian_symbol_pmf(cfg))
            out.append([cfg.k_min + dec.select(cum, TOTAL_BITS) for _ in range(count)])
        return out

    def to_json(self, counts: Sequence[int] | None = None) -> dict:
        chans = []
        for i, cfg in enumerate(self.channels):
            d = cfg.to_dict()
            if counts is not None:
                d["count"] = counts[i]
            chans.append(d)
        return {"mode": self.mode, "channels": chans}

    @classmethod
    def from_json(cls, doc: dict) -> "LatentAdapter":
        chans = doc["channels"] if "channels" in doc else [doc]
        return cls([LatentAdapterConfig.from_dict(c) for c in chans], doc.get("mode", "digits"))


def _cum(freq: Sequence[int]) -> list[int]:
    cum = [0]
    for f in freq:
        cum.append(cum[-1] + f)
    return cum


def parse_symbols(text: str) -> list[list[int]]:
    """One channel per line, whitespace-separated integers; a blank line is an empty channel."""
    return [[int(tok) for tok in line.split()] for line in text.splitlines()]


def format_symbols(symbols: Sequence[Sequence[int]]) -> str:
    return "".join(" ".join(str(k) for k in syms) + "\n" for syms in symbols)


def pack_params(adapter: LatentAdapter, counts: Sequence[int]) -> bytes:
    return json.dumps(adapter.to_json(counts), separators=(",", ":"), sort_keys=True).encode()


def unpack_params(raw: bytes) -> tuple[LatentAdapter, list[int]]:
    doc = json.loads(raw.decode())
    adapter = LatentAdapter.from_json(doc)
    return adapter, [int(c["count"]) for c in doc["channels"]]
