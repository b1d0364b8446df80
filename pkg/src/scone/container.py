"""Sidecar record files (``.scn1``) and FASTA strand files.

Record layout, big-endian::

    magic "SCN1"        4
    version             u8   (1)
    flags               u8   bit0 gc_enabled, bit1 hp_enabled, bit2 EOS mode
    window              u8
    gamma_lo (per-mille) u16
    gamma_hi (per-mille) u16
    hp_max              u8
    guard_bits          u8
    provider_id         u8   0 uniform, 1 static_pmf, 2 latent_adapter
    params length       u16
    params              bytes
    payload_bit_length  u64
    strand_length       u32
    strand              ASCII A/T/G/C
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

from .fsm import LETTER_INDEX, ConfigError, ConstraintConfig
from .model import ProbabilityProvider, StaticPmfProvider, UniformProvider

MAGIC = b"SCN1"
VERSION = 1

_HEAD = struct.Struct(">4sBBBHHBBBH")
_TAIL = struct.Struct(">QI")
HEADER_SIZE = _HEAD.size + _TAIL.size

FLAG_GC = 0x01
FLAG_HP = 0x02
FLAG_EOS = 0x04

PROVIDER_IDS = {"uniform": 0, "static_pmf": 1, "latent_adapter": 2}
PROVIDER_NAMES = {v: k for k, v in PROVIDER_IDS.items()}


class RecordError(ValueError):
    pass


class BadMagic(RecordError):
    pass


class UnsupportedVersion(RecordError):
    pass


class TruncatedRecord(RecordError):
    pass


class InvalidBase(RecordError):
    def __init__(self, offset: int, byte: int) -> None:
        super().__init__(f"invalid base byte {bytes([byte])!r} at offset {offset}")
        self.offset = offset


class FastaError(ValueError):
    pass


@dataclass(frozen=True)
class StrandRecord:
    config: ConstraintConfig
    payload_bit_length: int
    strand: str
    provider_id: str = "uniform"
    provider_params: bytes = b""
    version: int = VERSION

    def __post_init__(self) -> None:
        if self.provider_id not in PROVIDER_IDS:
            raise ValueError(f"unknown provider {self.provider_id!r}")
        if len(self.provider_params) > 0xFFFF:
            raise ValueError("provider params longer than 65535 bytes")
        if not 0 <= self.payload_bit_length < 1 << 64:
            raise ValueError("payload_bit_length out of range")
        if len(self.strand) >= 1 << 32:
            raise ValueError("strand too long")

    @property
    def strand_length(self) -> int:
        return len(self.strand)

    def provider(self) -> ProbabilityProvider:
        if self.provider_id == "static_pmf":
            return StaticPmfProvider.from_params(self.provider_params)
        # latent payloads are coded with uniform base PMFs
        return UniformProvider()


def write_record(record: StrandRecord) -> bytes:
    cfg = record.config
    flags = (FLAG_GC if cfg.gc_enabled else 0) | (FLAG_HP if cfg.hp_enabled else 0)
    head = _HEAD.pack(
        MAGIC,
        record.version,
        flags,
        cfg.window,
        cfg.gamma_lo,
        cfg.gamma_hi,
        cfg.hp_max,
        cfg.guard_bits,
        PROVIDER_IDS[record.provider_id],
        len(record.provider_params),
    )
    tail = _TAIL.pack(record.payload_bit_length, len(record.strand))
    return head + record.provider_params + tail + record.strand.encode("ascii")


def read_record(raw: bytes) -> StrandRecord:
    if len(raw) < 4:
        raise TruncatedRecord("record shorter than its magic")
    if raw[:4] != MAGIC:
        raise BadMagic(f"bad magic {raw[:4]!r}")
    if len(raw) < _HEAD.size:
        raise TruncatedRecord("header truncated")
    (_, version, flags, window, g_lo, g_hi, hp_max, guard, pid, plen) = _HEAD.unpack_from(raw)
    if version != VERSION:
        raise UnsupportedVersion(f"unsupported record version {version}")
    if flags & FLAG_EOS:
        raise RecordError("EOS-terminated records are not supported")
    if flags & ~(FLAG_GC | FLAG_HP):
        raise RecordError(f"unknown flag bits 0x{flags:02x}")
    if pid not in PROVIDER_NAMES:
        raise RecordError(f"unknown provider id {pid}")
    pos = _HEAD.size
    if len(raw) < pos + plen + _TAIL.size:
        raise TruncatedRecord("header truncated")
    params = bytes(raw[pos : pos + plen])
    pos += plen
    bit_length, strand_length = _TAIL.unpack_from(raw, pos)
    pos += _TAIL.size
    body = raw[pos:]
    if len(body) < strand_length:
        raise TruncatedRecord(f"strand truncated: {len(body)} of {strand_length} bases")
    if len(body) > strand_length:
        raise RecordError(f"{len(body) - strand_length} trailing bytes after strand")
    for i, b in enumerate(body):
        if b not in _BASE_BYTES:
            raise InvalidBase(pos + i, b)
    try:
        config = ConstraintConfig(
            gc_enabled=bool(flags & FLAG_GC),
            hp_enabled=bool(flags & FLAG_HP),
            window=window,
            gamma_lo=g_lo,
            gamma_hi=g_hi,
            hp_max=hp_max,
            guard_bits=guard,
        )
    except ConfigError as exc:
        raise RecordError(f"invalid constraint parameters: {exc}") from None
    return StrandRecord(
        config=config,
        payload_bit_length=bit_length,
        strand=body.decode("ascii"),
        provider_id=PROVIDER_NAMES[pid],
        provider_params=params,
        version=version,
    )


_BASE_BYTES = frozenset(b"ATGC")


def write_fasta(strands: Sequence[str], ids: Sequence[str] | None = None, width: int = 80) -> str:
    if ids is None:
        ids = [f"s{i}" for i in range(len(strands))]
    if len(ids) != len(strands):
        raise FastaError("need one id per strand")
    if len(set(ids)) != len(ids):
        raise FastaError("duplicate strand id")
    lines = []
    for sid, seq in zip(ids, strands):
        if not sid or any(c.isspace() for c in sid):
            raise FastaError(f"bad strand id {sid!r}")
        lines.append(">" + sid)
        lines.extend(seq[i : i + width] for i in range(0, len(seq), width))
    return "\n".join(lines) + "\n" if lines else ""


def read_fasta(text: str) -> list[tuple[str, str]]:
    """Parse FASTA into (id, sequence) pairs.

    Any line wrapping is accepted and lowercase bases are upcased; anything
    outside A/T/G/C is an error. The id is the first word of the header.
    """
    records: list[tuple[str, list[str]]] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            words = line[1:].split()
            if not words:
                raise FastaError(f"line {lineno}: empty header")
            sid = words[0]
            if sid in seen:
                raise FastaError(f"line {lineno}: duplicate id {sid!r}")
            seen.add(sid)
            records.append((sid, []))
            continue
        if not records:
            raise FastaError(f"line {lineno}: sequence before first header")
        seq = line.upper()
        for col, ch in enumerate(seq, 1):
            if ch not in LETTER_INDEX:
                raise FastaError(f"line {lineno}, column {col}: illegal character {ch!r}")
        records[-1][1].append(seq)
    return [(sid, "".join(parts)) for sid, parts in records]


def fasta_strands(text: str) -> list[str]:
    return [seq for _, seq in read_fasta(text)]

