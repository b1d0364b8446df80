"""Finite-state machine for GC-balance and homopolymer constraints.

The machine state depends only on the configuration and the bases emitted so
far, so a reader can rebuild the exact mask sequence a writer used by
replaying the strand.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, NamedTuple


class Base(IntEnum):
    A = 0
    T = 1
    G = 2
    C = 3

    @property
    def letter(self) -> str:
        return self.name

    @property
    def is_gc(self) -> bool:
        return self >= 2

    @classmethod
    def from_letter(cls, letter: str) -> "Base":
        try:
            return cls[letter]
        except KeyError:
            raise ValueError(f"not a DNA base: {letter!r}") from None


LETTERS = "ATGC"
LETTER_INDEX = {c: i for i, c in enumerate(LETTERS)}
GC_BASES = (False, False, True, True)


class ConfigError(ValueError):
    """Raised for constraint parameters outside their valid ranges."""


@dataclass(frozen=True)
class ConstraintConfig:
    """Biochemical constraint parameters.

    GC bounds are stored in per-mille so every comparison is an integer
    inequality.
    """

    gc_enabled: bool = True
    hp_enabled: bool = True
    window: int = 20
    gamma_lo: int = 450
    gamma_hi: int = 550
    hp_max: int = 3
    guard_bits: int = 32

    def __post_init__(self) -> None:
        if not 1 <= self.window <= 255:
            raise ConfigError(f"window must be in [1, 255], got {self.window}")
        if not 0 <= self.gamma_lo <= self.gamma_hi <= 1000:
            raise ConfigError(
                f"need 0 <= gamma_lo <= gamma_hi <= 1000, got "
                f"{self.gamma_lo}, {self.gamma_hi}"
            )
        if self.hp_max < 1:
            raise ConfigError(f"hp_max must be >= 1, got {self.hp_max}")
        if not 0 <= self.guard_bits <= 255:
            raise ConfigError(f"guard_bits must be in [0, 255], got {self.guard_bits}")
        if self.gc_enabled and self.window * (self.gamma_hi - self.gamma_lo) < 1000:
            warnings.warn(
                "GC band narrower than one base per window; fail-safe relaxation may fire",
                stacklevel=3,
            )

    @property
    def gc_min_count(self) -> int:
        """Smallest G/C count a full window may hold."""
        return -(-self.gamma_lo * self.window // 1000)

    @property
    def gc_max_count(self) -> int:
        """Largest G/C count a full window may hold."""
        return self.gamma_hi * self.window // 1000


class BaseMask(NamedTuple):
    allowed: tuple[bool, bool, bool, bool]
    relaxed: bool = False

    @property
    def count(self) -> int:
        return sum(self.allowed)

    def __str__(self) -> str:
        return "".join(c if a else "-" for c, a in zip(LETTERS, self.allowed))


ALL_ALLOWED = BaseMask((True, True, True, True))


class FsmState:
    """Sliding GC window and homopolymer run over the emitted history.

    ``recent`` keeps the last ``window`` bases; ``run_len`` is the length of
    the identical-base suffix of the whole history.
    """

    __slots__ = ("config", "recent", "gc_count", "run_base", "run_len", "emitted")

    def __init__(self, config: ConstraintConfig) -> None:
        self.config = config
        self.recent: deque[int] = deque(maxlen=config.window)
        self.gc_count = 0
        self.run_base: int | None = None
        self.run_len = 0
        self.emitted = 0

    def copy(self) -> "FsmState":
        other = FsmState.__new__(FsmState)
        other.config = self.config
        other.recent = self.recent.copy()
        other.gc_count = self.gc_count
        other.run_base = self.run_base
        other.run_len = self.run_len
        other.emitted = self.emitted
        return other

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FsmState):
            return NotImplemented
        return (
            self.config == other.config
            and self.recent == other.recent
            and self.gc_count == other.gc_count
            and self.run_base == other.run_base
            and self.run_len == other.run_len
            and self.emitted == other.emitted
        )

    def __repr__(self) -> str:
        tail = "".join(LETTERS[b] for b in self.recent)
        return (
            f"FsmState(emitted={self.emitted}, recent={tail!r}, gc={self.gc_count}, "
            f"run={self.run_len}x{LETTERS[self.run_base] if self.run_base is not None else '-'})"
        )

    def mask(self) -> BaseMask:
        cfg = self.config
        a_ok = t_ok = g_ok = c_ok = True
        relaxed = False

        if cfg.gc_enabled:
            w = cfg.window
            if len(self.recent) == w:
                # prospective window: drop the oldest base, add the candidate
                n = self.gc_count - (self.recent[0] >= 2)
                room = 0
            else:
                n = self.gc_count
                room = w - 1 - self.emitted
            # before the first full window, A/T stays legal only while enough
            # positions remain to reach the lower bound
            gc_ok = n + 1 <= cfg.gc_max_count
            at_ok = n + room >= cfg.gc_min_count
            g_ok = c_ok = gc_ok
            a_ok = t_ok = at_ok

        allowed = [a_ok, t_ok, g_ok, c_ok]
        hp_blocked = (
            cfg.hp_enabled and self.run_len >= cfg.hp_max and self.run_base is not None
        )
        if hp_blocked:
            allowed[self.run_base] = False
        if not any(allowed):
            relaxed = True
            allowed = [True, True, True, True]
            if hp_blocked:
                allowed[self.run_base] = False
        return BaseMask(tuple(allowed), relaxed)

    def advance(self, base: int) -> "FsmState":
        """Push ``base`` into the history in place and return self."""
        recent = self.recent
        if len(recent) == recent.maxlen and recent[0] >= 2:
            self.gc_count -= 1
        recent.append(base)
        if base >= 2:
            self.gc_count += 1
        if base == self.run_base:
            self.run_len += 1
        else:
            self.run_base = base
            self.run_len = 1
        self.emitted += 1
        return self


def new_state(config: ConstraintConfig | None = None) -> FsmState:
    return FsmState(config if config is not None else ConstraintConfig())


def compute_mask(state: FsmState) -> BaseMask:
    return state.mask()


def advance(state: FsmState, base: int) -> FsmState:
    """Return a new state with ``base`` appended; ``state`` is left untouched."""
    return state.copy().advance(int(base))


def as_indices(bases: Iterable[int] | str) -> list[int]:
    if isinstance(bases, str):
        try:
            return [LETTER_INDEX[c] for c in bases]
        except KeyError as exc:
            raise ValueError(f"not a DNA base: {exc.args[0]!r}") from None
    return [int(b) for b in bases]


def replay(bases: Iterable[int] | str, config: ConstraintConfig | None = None) -> FsmState:
    state = new_state(config)
    for b in as_indices(bases):
        state.advance(b)
    return state


def mask_trace(bases: Iterable[int] | str, config: ConstraintConfig | None = None) -> list[BaseMask]:
    """Masks seen before each base of ``bases`` when replayed from scratch."""
    state = new_state(config)
    out = []
    for b in as_indices(bases):
        out.append(state.mask())
        state.advance(b)
    return out
