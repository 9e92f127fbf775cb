"""Deterministic 64-bit RNG used by every randomized stage.

The same xorshift64* stream exists twice: here in pure Python and inside the
compiled kernels. Both are kept draw-for-draw identical so that a run produces
the same labels no matter which backend executed it. Seeds are mixed through
splitmix64, which also derives the per-estimation seeds from the base seed.
"""

MASK64 = (1 << 64) - 1

_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_STAR = 0x2545F4914F6CDD1D


def splitmix64(x: int) -> int:
    """One splitmix64 step on a 64-bit value."""
    z = (x + _GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_run_seed(base_seed: int, run_index: int) -> int:
    """Seed for independent estimation run `run_index`."""
    return splitmix64((base_seed + run_index) & MASK64)


class XorShift64Star:
    """xorshift64* generator; the state is bootstrapped through splitmix64.

    A zero state would be absorbing, so it is replaced by a fixed nonzero
    constant. The compiled twin applies the same rule.
    """

    def __init__(self, seed: int):
        state = splitmix64(seed & MASK64)
        self._state = state if state != 0 else _GAMMA

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x = (x ^ (x << 25)) & MASK64
        x ^= x >> 27
        self._state = x
        return (x * _STAR) & MASK64

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], both ends inclusive."""
        if hi < lo:
            raise ValueError(f"empty range [{lo}, {hi}]")
        return lo + self.next_u64() % (hi - lo + 1)
