"""Quaternary arithmetic coding over constraint-masked base distributions.

The write path (``generate_strand``) runs an arithmetic *decoder* over the
payload bits: each step picks the base whose slot contains the code point,
so the output strand follows the FSM mask by construction. The read path
(``pack_strand``) runs the matching *encoder* over the strand and emits the
payload bits back during renormalization.

Registers are 32 bits wide with E1/E2/E3 renormalization. Frequencies sum to
2**16, so every product fits in 64 bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, NamedTuple, Sequence

from .fsm import LETTER_INDEX, LETTERS, BaseMask, ConstraintConfig, new_state
from .model import TOTAL, TOTAL_BITS, ProbabilityProvider, UniformProvider, mask_and_renormalize

STATE_BITS = 32
FULL = (1 << STATE_BITS) - 1
HALF = 1 << (STATE_BITS - 1)
QUARTER = 1 << (STATE_BITS - 2)
THREE_QUARTERS = HALF + QUARTER


class IllegalStrand(ValueError):
    """A strand base is forbidden by the replayed constraint mask."""

    def __init__(self, position: int, base: str, mask: BaseMask) -> None:
        super().__init__(f"base {base!r} at position {position} violates mask {mask}")
        self.position = position
        self.base = base
        self.mask = mask


@dataclass(frozen=True)
class Payload:
    """A bit string, MSB-first within each byte of ``data``."""

    data: bytes = b""
    bit_length: int = -1

    def __post_init__(self) -> None:
        if self.bit_length < 0:
            object.__setattr__(self, "bit_length", 8 * len(self.data))
        if self.bit_length > 8 * len(self.data):
            raise ValueError("bit_length exceeds data")
        # canonical form: bytes trimmed, padding bits zero
        nbytes = (self.bit_length + 7) // 8
        data = bytearray(self.data[:nbytes])
        if self.bit_length % 8:
            data[-1] &= (0xFF << (8 - self.bit_length % 8)) & 0xFF
        object.__setattr__(self, "data", bytes(data))

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "Payload":
        data = bytearray((len(bits) + 7) // 8)
        for i, b in enumerate(bits):
            if b:
                data[i >> 3] |= 0x80 >> (i & 7)
        return cls(bytes(data), len(bits))

    def bits(self) -> list[int]:
        d = self.data
        return [(d[i >> 3] >> (7 - (i & 7))) & 1 for i in range(self.bit_length)]

    def prefix(self, n: int) -> "Payload":
        return Payload(self.data, min(n, self.bit_length))

    def __len__(self) -> int:
        return self.bit_length


class TraceStep(NamedTuple):
    mask: BaseMask
    pmf: tuple[int, int, int, int]
    consumed: int


@dataclass
class DnaStrand:
    bases: str
    payload_bits: int = 0
    core_bases: int = 0
    trace: list[TraceStep] | None = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.bases)

    def __str__(self) -> str:
        return self.bases


def _cumulative(freq: Sequence[int]) -> tuple[int, int, int, int, int]:
    a, t, g, c = freq
    return (0, a, a + t, a + t + g, TOTAL)


class ArithmeticDecoder:
    """Reads a bit source; bits past its end are zeros."""

    def __init__(self, read_bit: Callable[[], int]) -> None:
        self.read_bit = read_bit
        self.low = 0
        self.high = FULL
        self.code = 0
        self.shifts = 0
        for _ in range(STATE_BITS):
            self.code = (self.code << 1) | read_bit()

    def select(self, cum: Sequence[int], total_bits: int = TOTAL_BITS) -> int:
        """Index of the slot holding the code point; narrows the interval."""
        low = self.low
        rng = self.high - low + 1
        code = self.code
        lo_b = low
        for s in range(len(cum) - 1):
            hi_b = low + ((rng * cum[s + 1]) >> total_bits)
            if code < hi_b:
                if hi_b > lo_b:
                    self.low = lo_b
                    self.high = hi_b - 1
                    self._renormalize()
                    return s
            lo_b = hi_b
        raise AssertionError("code point outside interval")

    def _renormalize(self) -> None:
        low, high, code = self.low, self.high, self.code
        read_bit = self.read_bit
        while True:
            if high < HALF:
                pass
            elif low >= HALF:
                low -= HALF
                high -= HALF
                code -= HALF
            elif low >= QUARTER and high < THREE_QUARTERS:
                low -= QUARTER
                high -= QUARTER
                code -= QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
            code = (code << 1) | read_bit()
            self.shifts += 1
        self.low, self.high, self.code = low, high, code


class ArithmeticEncoder:
    def __init__(self) -> None:
        self.low = 0
        self.high = FULL
        self.pending = 0
        self.bits: list[int] = []

    def encode(self, cum_lo: int, cum_hi: int, total_bits: int = TOTAL_BITS) -> None:
        low = self.low
        rng = self.high - low + 1
        self.high = low + ((rng * cum_hi) >> total_bits) - 1
        self.low = low + ((rng * cum_lo) >> total_bits)
        self._renormalize()

    def _emit(self, bit: int) -> None:
        out = self.bits
        out.append(bit)
        if self.pending:
            out.extend([bit ^ 1] * self.pending)
            self.pending = 0

    def _renormalize(self) -> None:
        low, high = self.low, self.high
        while True:
            if high < HALF:
                self._emit(0)
            elif low >= HALF:
                self._emit(1)
                low -= HALF
                high -= HALF
            elif low >= QUARTER and high < THREE_QUARTERS:
                self.pending += 1
                low -= QUARTER
                high -= QUARTER
            else:
                break
            low <<= 1
            high = (high << 1) | 1
        self.low, self.high = low, high

    def finish(self) -> list[int]:
        """Flush so the code value is exactly the interval midpoint HALF.

        HALF always lies in [low, high] after renormalization, and followed by
        zeros it is never below a decoder whose stream ran into zero padding,
        which keeps the payload prefix free of borrows.
        """
        self.pending += 1
        self._emit(1)
        return self.bits


def _bit_reader(payload: Payload) -> Callable[[], int]:
    data = payload.data
    n = payload.bit_length
    pos = 0

    def read_bit() -> int:
        nonlocal pos
        i = pos
        pos += 1
        if i < n:
            return (data[i >> 3] >> (7 - (i & 7))) & 1
        return 0

    return read_bit


class ZeroCapacity(ValueError):
    """The constraints force an endless cycle of single-choice bases."""


def _state_key(state) -> tuple:
    cfg = state.config
    return (
        tuple(state.recent),
        state.run_base,
        min(state.run_len, cfg.hp_max),
        min(state.emitted, cfg.window),
    )


def generate_strand(
    payload: Payload,
    provider: ProbabilityProvider | None = None,
    config: ConstraintConfig | None = None,
    *,
    trace: bool = False,
) -> DnaStrand:
    """Turn payload bits into a constraint-legal strand.

    Generation stops once ``bit_length + guard_bits`` bits have been shifted
    through the code register; the guard zeros make the read path reproduce
    the payload exactly.
    """
    config = config or ConstraintConfig()
    provider = provider or UniformProvider()
    dec = ArithmeticDecoder(_bit_reader(payload))
    state = new_state(config)
    limit = payload.bit_length + config.guard_bits
    n = payload.bit_length
    out: list[str] = []
    steps: list[TraceStep] | None = [] if trace else None
    core = 0
    step = 0
    forced = 0
    seen: set[tuple] = set()
    # forced steps consume nothing; a long forced chain is checked for a cycle
    patience = 2 * (config.window + config.hp_max) + 8
    while dec.shifts < limit:
        mask = state.mask()
        if mask.count == 1:
            forced += 1
            if forced > patience:
                key = _state_key(state)
                if key in seen:
                    raise ZeroCapacity(f"constraints force a base cycle at step {step}")
                seen.add(key)
        elif forced:
            forced = 0
            seen.clear()
        pmf = mask_and_renormalize(provider.next_pmf(step, state), mask)
        if steps is not None:
            steps.append(TraceStep(mask, pmf, dec.shifts))
        if dec.shifts < n:
            core += 1
        s = dec.select(_cumulative(pmf))
        out.append(LETTERS[s])
        state.advance(s)
        step += 1
    return DnaStrand("".join(out), n, core, steps)


def pack_strand(
    strand: DnaStrand | str,
    provider: ProbabilityProvider | None = None,
    config: ConstraintConfig | None = None,
    bit_length: int | None = None,
) -> Payload:
    """Recover payload bits from a strand.

    Without ``bit_length`` the whole flushed code stream is returned; the
    original payload is its prefix.
    """
    config = config or ConstraintConfig()
    provider = provider or UniformProvider()
    bases = strand.bases if isinstance(strand, DnaStrand) else strand
    enc = ArithmeticEncoder()
    state = new_state(config)
    for pos, letter in enumerate(bases):
        s = LETTER_INDEX.get(letter)
        mask = state.mask()
        if s is None or not mask.allowed[s]:
            raise IllegalStrand(pos, letter, mask)
        pmf = mask_and_renormalize(provider.next_pmf(pos, state), mask)
        cum = _cumulative(pmf)
        enc.encode(cum[s], cum[s + 1])
        state.advance(s)
    bits = enc.finish()
    if bit_length is not None:
        if bit_length > len(bits):
            raise ValueError(f"strand carries only {len(bits)} bits, {bit_length} requested")
        bits = bits[:bit_length]
    return Payload.from_bits(bits)


def bpn(bit_length: int, strand_length: int) -> Fraction | None:
    if strand_length == 0:
        return None
    return Fraction(bit_length, strand_length)


def bpn_core(strand: DnaStrand) -> Fraction | None:
    if strand.core_bases == 0:
        return None
    return Fraction(strand.payload_bits, strand.core_bases)


class PayloadMismatch(ValueError):
    """The strand is mask-legal but is not what the recovered payload generates."""


def unpack_strand(
    bases: str,
    bit_length: int,
    provider: ProbabilityProvider | None = None,
    config: ConstraintConfig | None = None,
) -> Payload:
    """``pack_strand`` plus a consistency check.

    Regenerating from the recovered payload must reproduce ``bases``. A
    corrupted strand that is still legal usually fails here because its guard
    tail no longer matches; one that happens to be the exact encoding of some
    other payload cannot be told apart and decodes to that payload.
    """
    payload = pack_strand(bases, provider, config, bit_length)
    if generate_strand(payload, provider, config).bases != bases:
        raise PayloadMismatch("strand does not regenerate from its recovered payload")
    return payload


def roundtrip_ok(
    payload: Payload,
    provider: ProbabilityProvider | None = None,
    config: ConstraintConfig | None = None,
) -> bool:
    strand = generate_strand(payload, provider, config)
    return pack_strand(strand, provider, config, payload.bit_length) == payload

