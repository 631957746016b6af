"""Counter-based pseudo-randomness for reproducible path simulation.

Every uniform draw is a pure function of (seed, path index, step index),
so results do not depend on chunking, thread count, or evaluation order.
The mixer is the SplitMix64 finalizer; the per-path keys are exactly the
output stream of a SplitMix64 generator seeded with the run seed, and
the per-step draws are the stream of a generator seeded with the key.
"""

from __future__ import annotations

import numpy as np

__all__ = ["mix64", "derive_key", "path_keys", "step_uniforms", "uniform"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# to 2^-53, so draws land in [0, 1) with full double precision
_SCALE = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= _MASK
    z = (z ^ (z >> 30)) * _M1 & _MASK
    z = (z ^ (z >> 27)) * _M2 & _MASK
    return z ^ (z >> 31)


def derive_key(seed: int, index: int) -> int:
    """Key for stream number `index` under `seed`.

    Equals the (index+1)-th output of SplitMix64 seeded with `seed`.
    """
    return mix64(seed + (index + 1) * _GOLDEN)


def _mix_array(z: np.ndarray) -> np.ndarray:
    # uint64 arithmetic wraps, which is exactly the mod-2^64 we want
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def path_keys(seed: int, first: int, count: int) -> np.ndarray:
    """Keys for paths first .. first+count-1 as a uint64 array."""
    idx = np.arange(first + 1, first + count + 1, dtype=np.uint64)
    z = np.uint64(seed & _MASK) + idx * np.uint64(_GOLDEN)
    return _mix_array(z)


def step_uniforms(keys: np.ndarray, step: int) -> np.ndarray:
    """One uniform in [0, 1) per key for the given step index."""
    z = keys + np.uint64(((step + 1) * _GOLDEN) & _MASK)
    bits = _mix_array(z) >> np.uint64(11)
    return bits.astype(np.float64) * _SCALE


def uniform(seed: int, path: int, step: int) -> float:
    """Scalar route to the same draw: matches step_uniforms(path_keys(...))."""
    key = derive_key(seed, path)
    return (mix64(key + (step + 1) * _GOLDEN) >> 11) * _SCALE
