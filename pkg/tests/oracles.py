"""Reference computations that do not share code with the package.

Everything here works on plain strings and recomputes from scratch at each
position, so it checks the incremental machinery rather than reusing it.
"""

import math
import random


def naive_bounds(window, gamma_lo, gamma_hi):
    lo = min((c for c in range(window + 1) if c * 1000 >= gamma_lo * window), default=window + 1)
    hi = max((c for c in range(window + 1) if c * 1000 <= gamma_hi * window), default=-1)
    return lo, hi


def naive_allowed(history, window=20, gamma_lo=450, gamma_hi=550, hp_max=3, gc=True, hp=True):
    """Allowed letters after ``history`` and whether the fail-safe fired."""
    lo, hi = naive_bounds(window, gamma_lo, gamma_hi)
    tail = history[len(history) - (window - 1):] if window > 1 else ""
    if len(history) < window - 1:
        tail = history
    n = sum(c in "GC" for c in tail)
    room = max(0, window - 1 - len(history))
    gc_rule = {}
    for b in "ATGC":
        if not gc:
            gc_rule[b] = True
        elif b in "GC":
            gc_rule[b] = n + 1 <= hi
        else:
            gc_rule[b] = any(n + x >= lo for x in range(room + 1))
    hp_rule = {}
    for b in "ATGC":
        run_blocked = hp and len(history) >= hp_max and history[-hp_max:] == b * hp_max
        hp_rule[b] = not run_blocked
    allowed = [b for b in "ATGC" if gc_rule[b] and hp_rule[b]]
    if allowed:
        return allowed, False
    return [b for b in "ATGC" if hp_rule[b]], True


def naive_max_run(s):
    best = 0
    for i in range(len(s)):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        best = max(best, j - i)
    return best


def naive_violations(s, window=20, gamma_lo=450, gamma_hi=550, hp_max=3):
    """True if any run exceeds hp_max or any full window leaves the GC band."""
    if naive_max_run(s) > hp_max:
        return True
    for i in range(len(s) - window + 1):
        g = sum(c in "GC" for c in s[i:i + window])
        if g * 1000 < gamma_lo * window or g * 1000 > gamma_hi * window:
            return True
    return False


def largest_remainder(weights, total):
    """Textbook largest-remainder apportionment with exact fractions."""
    from fractions import Fraction

    s = sum(weights)
    quotas = [Fraction(w * total, s) for w in weights]
    base = [math.floor(q) for q in quotas]
    left = total - sum(base)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - base[i]), -i))
    for i in order[:left]:
        base[i] += 1
    return base


def masked_entropy_monte_carlo(steps, trials, seed, **cfg):
    """Mean Shannon entropy (bits) of the masked uniform PMF per step.

    Bases are drawn from the masked distribution, so the visited states
    follow the same law as a coder fed uniform random bits.
    """
    rng = random.Random(seed)
    total_h = 0.0
    count = 0
    for _ in range(trials):
        s = ""
        for _ in range(steps):
            allowed, _ = naive_allowed(s, **cfg)
            total_h += math.log2(len(allowed))
            count += 1
            s += rng.choice(allowed)
    return total_h / count


def hand_simulate_uniform(bits):
    """Unconstrained uniform coding is a plain 2-bits-per-base mapping."""
    padded = list(bits) + [0] * 32
    padded += [0] * (len(padded) % 2)
    out = []
    for i in range(0, len(padded) - 1, 2):
        out.append("ATGC"[padded[i] * 2 + padded[i + 1]])
    return "".join(out)
