"""Probability providers for the quaternary coder and the latent adapter.

Coder-facing PMFs are integer frequency tables over A, T, G, C summing to
``TOTAL``; no floating point enters the coding path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol, Sequence

from .fsm import LETTERS, BaseMask, FsmState

TOTAL_BITS = 16
TOTAL = 1 << TOTAL_BITS

Pmf = tuple[int, int, int, int]


def uniform_pmf() -> Pmf:
    return (TOTAL // 4,) * 4


def apportion(weights: Sequence[int], total: int, allowed: Sequence[bool] | None = None) -> tuple[int, ...]:
    """Split ``total`` over ``weights`` by largest remainder.

    Every allowed slot gets at least 1 unit; disallowed slots get 0. Ties in
    the remainder go to the higher index first. Weights of allowed slots that
    are all zero are treated as equal.
    """
    n = len(weights)
    if allowed is None:
        allowed = [True] * n
    idx = [i for i in range(n) if allowed[i]]
    if not idx:
        raise ValueError("cannot renormalize over an empty mask")
    if len(idx) > total:
        raise ValueError("total too small for one unit per allowed slot")
    w = [weights[i] if allowed[i] else 0 for i in range(n)]
    wsum = sum(w)
    if wsum == 0:
        w = [1 if allowed[i] else 0 for i in range(n)]
        wsum = len(idx)

    # each allowed slot is floored at 1, the rest is shared proportionally
    spare = total - len(idx)
    out = [0] * n
    rems = []
    for i in idx:
        q, r = divmod(w[i] * spare, wsum)
        out[i] = 1 + q
        rems.append((-r, -i))
    left = total - sum(out)
    for _, neg_i in sorted(rems)[:left]:
        out[-neg_i] += 1
    return tuple(out)


@lru_cache(maxsize=4096)
def _renorm(pmf: Pmf, allowed: tuple[bool, bool, bool, bool]) -> Pmf:
    if all(allowed):
        return pmf
    return apportion(pmf, TOTAL, allowed)  # type: ignore[return-value]


def mask_and_renormalize(pmf: Sequence[int], mask: BaseMask | Sequence[bool]) -> Pmf:
    """Zero the disallowed bases and rescale the rest to ``TOTAL``."""
    allowed = mask.allowed if isinstance(mask, BaseMask) else tuple(bool(m) for m in mask)
    if not any(allowed):
        raise ValueError("mask has no allowed base")
    return _renorm(tuple(pmf), tuple(allowed))


def check_pmf(freq: Sequence[int]) -> Pmf:
    if len(freq) != 4 or any(f < 0 for f in freq) or sum(freq) != TOTAL:
        raise ValueError(f"PMF must be 4 non-negative ints summing to {TOTAL}: {freq!r}")
    return tuple(int(f) for f in freq)  # type: ignore[return-value]


def pmf_from_probs(probs: Sequence[float]) -> Pmf:
    """Quantize real probabilities to a ``TOTAL``-sum frequency table."""
    scaled = [round(p * (1 << 30)) for p in probs]
    return apportion(scaled, TOTAL, [p > 0 for p in probs])  # type: ignore[return-value]


class ProbabilityProvider(Protocol):
    """Per-step base distribution, before constraint masking.

    Implementations must only look at information the reader also has: the
    step index and the FSM state built from previously emitted bases.
    """

    provider_id: str

    def next_pmf(self, step: int, state: FsmState) -> Pmf: ...

    def params(self) -> bytes: ...


class UniformProvider:
    provider_id = "uniform"

    def next_pmf(self, step: int, state: FsmState) -> Pmf:
        return _UNIFORM

    def params(self) -> bytes:
        return b""

    def __repr__(self) -> str:
        return "UniformProvider()"


_UNIFORM = uniform_pmf()


class StaticPmfProvider:
    """The same frequency table at every step."""

    provider_id = "static_pmf"

    def __init__(self, freq: Sequence[int]) -> None:
        self.freq = check_pmf(freq)
        if min(self.freq) < 1:
            raise ValueError("static PMF needs every base at frequency >= 1")

    def next_pmf(self, step: int, state: FsmState) -> Pmf:
        return self.freq

    def params(self) -> bytes:
        return b"".join(f.to_bytes(4, "big") for f in self.freq)

    @classmethod
    def from_params(cls, raw: bytes) -> "StaticPmfProvider":
        if len(raw) != 16:
            raise ValueError("static_pmf params must be 16 bytes")
        return cls([int.from_bytes(raw[i : i + 4], "big") for i in range(0, 16, 4)])

    def __repr__(self) -> str:
        return f"StaticPmfProvider({list(self.freq)})"


# ---- latent adapter ----


@dataclass(frozen=True)
class LatentAdapterConfig:
    """Discretized Gaussian model for one latent channel."""

    mu: float = 0.0
    sigma: float = 1.0
    k_min: int = -8
    k_max: int = 7
    digits: int = 2
    fold_tails: bool = True

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.k_min > self.k_max:
            raise ValueError("empty support")
        if self.digits < 1:
            raise ValueError("digits must be >= 1")
        top = max(zigzag(self.k_min), zigzag(self.k_max))
        if top >= 4**self.digits:
            raise ValueError(
                f"support [{self.k_min}, {self.k_max}] does not fit in {self.digits} base-4 digits"
            )

    @property
    def support(self) -> range:
        return range(self.k_min, self.k_max + 1)

    def to_dict(self) -> dict:
        return {
            "mu": self.mu,
            "sigma": self.sigma,
            "support": [self.k_min, self.k_max],
            "digits": self.digits,
            "fold_tails": self.fold_tails,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LatentAdapterConfig":
        lo, hi = d.get("support", (-8, 7))
        return cls(
            mu=float(d.get("mu", 0.0)),
            sigma=float(d.get("sigma", 1.0)),
            k_min=int(lo),
            k_max=int(hi),
            digits=int(d.get("digits", 2)),
            fold_tails=bool(d.get("fold_tails", True)),
        )


def _phi(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def gaussian_probs(cfg: LatentAdapterConfig) -> list[float]:
    """Bin masses of N(mu, sigma) over the support.

    Mass outside the support goes to the end bins, or is dropped and the
    rest renormalized when ``fold_tails`` is off.
    """
    probs = []
    for k in cfg.support:
        fold = cfg.fold_tails
        upper = 1.0 if fold and k == cfg.k_max else _phi((k + 0.5 - cfg.mu) / cfg.sigma)
        lower = 0.0 if fold and k == cfg.k_min else _phi((k - 0.5 - cfg.mu) / cfg.sigma)
        probs.append(max(upper - lower, 0.0))
    if sum(probs) == 0.0:
        probs = [1.0] * len(probs)
    s = sum(probs)
    return [p / s for p in probs]


def gaussian_symbol_pmf(cfg: LatentAdapterConfig, total: int = TOTAL) -> tuple[int, ...]:
    """Integer frequencies for each support value, every bin at least 1."""
    probs = gaussian_probs(cfg)
    weights = [round(p * (1 << 40)) for p in probs]
    return apportion(weights, total)


def zigzag(k: int) -> int:
    return 2 * k if k >= 0 else -2 * k - 1


def unzigzag(z: int) -> int:
    return z // 2 if z % 2 == 0 else -(z + 1) // 2


def base4_map(k: int, digits: int) -> list[int]:
    """Base-4 digits of zigzag(k), most significant first."""
    z = zigzag(k)
    if z >= 4**digits:
        raise ValueError(f"symbol {k} does not fit in {digits} base-4 digits")
    return [(z >> (2 * (digits - 1 - i))) & 3 for i in range(digits)]


def base4_unmap(digits: Sequence[int]) -> int:
    z = 0
    for d in digits:
        if not 0 <= d < 4:
            raise ValueError(f"bad base-4 digit {d}")
        z = (z << 2) | d
    return unzigzag(z)


def base4_letters(k: int, digits: int) -> str:
    return "".join(LETTERS[d] for d in base4_map(k, digits))
