"""Pinned pseudo-random generator used for every stochastic step.

All randomness in the toolkit (splits, folds, weight init, per-epoch
shuffles, tuner sampling) flows through :class:`Xoshiro256`, so results are
reproducible across platforms and across other implementations that follow
the same recipe:

* state seeding: four successive outputs of SplitMix64 started at
  ``seed mod 2**64``;
* generator: xoshiro256** (Blackman & Vigna);
* ``random()``: ``(next_u64() >> 11) * 2**-53``, uniform on [0, 1);
* ``below(n)``: rejection sampling on ``next_u64()`` with
  ``limit = 2**64 - (2**64 mod n)``, returning ``r mod n``;
* ``shuffle``: Fisher-Yates from the last index down, ``j = below(i + 1)``;
* ``normal()``: Box-Muller cosine branch, ``u1 = 1 - random()``,
  ``u2 = random()``, one variate per two uniforms (no caching).
"""

from __future__ import annotations

import math
from typing import MutableSequence

MASK64 = (1 << 64) - 1
_TWO64 = 1 << 64

_JUMP = (0x180EC6D33CFD0ABA, 0xD5A61266F0C9392C, 0xA9582618E03FC9AA, 0x39ABDC4529B1661C)


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a SplitMix64 state; return ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


class Xoshiro256:
    """xoshiro256** seeded through SplitMix64."""

    __slots__ = ("_s",)

    def __init__(self, seed: int) -> None:
        sm = seed & MASK64
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        x = (s1 * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self._s = [s0, s1, s2, s3]
        return result

    def jump(self) -> None:
        """Advance by 2**128 steps in place (equivalent to that many next_u64 calls)."""
        acc = [0, 0, 0, 0]
        for word in _JUMP:
            for b in range(64):
                if word & (1 << b):
                    for i in range(4):
                        acc[i] ^= self._s[i]
                self.next_u64()
        self._s = acc

    def jumped(self) -> "Xoshiro256":
        """Return an independent copy advanced by one jump."""
        other = Xoshiro256.__new__(Xoshiro256)
        other._s = list(self._s)
        other.jump()
        return other

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``; ``n`` may exceed 2**32."""
        if n <= 0:
            raise ValueError(f"below() needs a positive bound, got {n}")
        limit = _TWO64 - (_TWO64 % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def normal(self) -> float:
        u1 = 1.0 - self.random()
        u2 = self.random()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def shuffle(self, items: MutableSequence) -> None:
        # Same stream as repeated below() calls, with the generator inlined.
        s0, s1, s2, s3 = self._s
        for i in range(len(items) - 1, 0, -1):
            n = i + 1
            limit = _TWO64 - (_TWO64 % n)
            while True:
                x = (s1 * 5) & MASK64
                r = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
                t = (s1 << 17) & MASK64
                s2 ^= s0
                s3 ^= s1
                s1 ^= s2
                s0 ^= s3
                s2 ^= t
                s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
                if r < limit:
                    break
            j = r % n
            items[i], items[j] = items[j], items[i]
        self._s = [s0, s1, s2, s3]

    def permutation(self, n: int) -> list[int]:
        out = list(range(n))
        self.shuffle(out)
        return out
