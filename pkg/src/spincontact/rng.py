"""Deterministic pseudo-random numbers for reproducible reports.

The command-line sweeps must reproduce bit-for-bit across runs and across
independent implementations, so they use an explicitly specified generator
rather than whatever the host language provides: xoshiro256** seeded through
splitmix64.  The full algorithm is written out in the README so a report can
be regenerated anywhere.

Library-internal property tests are free to use numpy generators; only
report-visible draws route through this module.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def _splitmix64(state: int):
    """One splitmix64 step: returns (output, next_state)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31), state


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class Xoshiro256StarStar:
    """xoshiro256** generator, state seeded with four splitmix64 outputs."""

    def __init__(self, seed: int):
        state = seed & _MASK
        s = []
        for _ in range(4):
            out, state = _splitmix64(state)
            s.append(out)
        self._s = s

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1): top 53 bits of the next word."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def reals(self, count: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
        return np.array([self.uniform_in(lo, hi) for _ in range(count)])

    def complex_matrix(self, dim: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
        """Dense complex matrix with independent uniform real and imaginary parts.

        Entries are drawn row-major, real part before imaginary part, so the
        stream layout is implementation independent.
        """
        out = np.empty((dim, dim), dtype=complex)
        for r in range(dim):
            for c in range(dim):
                re = self.uniform_in(lo, hi)
                im = self.uniform_in(lo, hi)
                out[r, c] = re + 1j * im
        return out

    def separated_reals(self, count: int, lo: float, hi: float, min_gap: float,
                        max_tries: int = 1000) -> np.ndarray:
        """`count` reals in [lo, hi] whose pairwise distances all exceed min_gap."""
        for _ in range(max_tries):
            vals = self.reals(count, lo, hi)
            diffs = np.abs(vals[:, None] - vals[None, :])
            np.fill_diagonal(diffs, np.inf)
            if diffs.min() > min_gap:
                return vals
        raise RuntimeError("could not draw separated momenta; widen the interval")
