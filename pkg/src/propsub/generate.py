"""Seeded instance families."""

from __future__ import annotations

import random
from fractions import Fraction

from .instance import Instance

FAMILIES = ("uniform-rational", "identical-chores", "adversarial-halved")

MAX_SEED = 2**64 - 1


def generate(family: str, n: int, m: int, seed: int = 0) -> Instance:
    """Pure function of ``(family, n, m, seed)``.

    uniform-rational: random positive weights; each ``d_i(c) = k/1000`` with
        ``k`` uniform in ``1..1000``.
    identical-chores: equal weights, every disutility 1.
    adversarial-halved: equal weights, each ``d_i(c)`` independently 1 or 1/2.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if n < 1:
        raise ValueError("n must be at least 1")
    if m < 0:
        raise ValueError("m must be non-negative")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError("seed must be an unsigned 64-bit integer")
    rng = random.Random(seed)

    if family == "identical-chores":
        weights = [Fraction(1, n)] * n
        rows = [[Fraction(1)] * m for _ in range(n)]
    elif family == "adversarial-halved":
        weights = [Fraction(1, n)] * n
        rows = [[Fraction(1) if rng.random() < 0.5 else Fraction(1, 2) for _ in range(m)] for _ in range(n)]
    else:
        raw = [rng.randint(1, 20) for _ in range(n)]
        total = sum(raw)
        weights = [Fraction(w, total) for w in raw]
        rows = [[Fraction(rng.randint(1, 1000), 1000) for _ in range(m)] for _ in range(n)]
    return Instance(tuple(weights), tuple(tuple(r) for r in rows))
