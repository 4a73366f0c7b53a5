"""Keyed counter-based random streams.

Every random value drawn for a node pair is a function of ``(seed, purpose,
u, v)`` only. Pairs are mapped to a position in a Philox stream through their
colexicographic index ``v*(v-1)/2 + u``, which does not depend on the node
count, so the same pair receives the same value whatever graph it lives in and
whatever order pairs are evaluated in.
"""

from __future__ import annotations

from typing import Final, Literal

import numpy as np
import numpy.typing as npt

Purpose = Literal["tie", "sample", "batch", "perlin", "positions", "generic"]

_PURPOSE_TAGS: Final[dict[str, int]] = {
    "tie": 0x7469,
    "sample": 0x736D,
    "batch": 0x6274,
    "perlin": 0x7072,
    "positions": 0x706F,
    "generic": 0x6765,
}


def check_seed(seed: int) -> int:
    """Validate a user supplied seed and return it as a plain int."""
    if isinstance(seed, bool) or not isinstance(seed, int | np.integer):
        raise TypeError(f"Seed must be an integer, got {type(seed).__name__}")
    if seed < 0:
        raise ValueError(f"Seed must be non-negative, got {seed}")
    return int(seed)


def bit_generator(seed: int, purpose: Purpose) -> np.random.Philox:
    """Return a Philox bit generator keyed on ``seed`` and ``purpose``."""
    sequence = np.random.SeedSequence([check_seed(seed), _PURPOSE_TAGS[purpose]])
    return np.random.Philox(key=sequence.generate_state(2, dtype=np.uint64))


def generator(seed: int, purpose: Purpose) -> np.random.Generator:
    """Return a ``numpy`` Generator on the keyed Philox stream."""
    return np.random.Generator(bit_generator(seed, purpose))


def colex_index(u: npt.ArrayLike, v: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Index of the pair ``(u, v)``, ``u < v``, in colexicographic order."""
    u_arr = np.asarray(u, dtype=np.int64)
    v_arr = np.asarray(v, dtype=np.int64)
    return v_arr * (v_arr - 1) // 2 + u_arr


def pair_uniforms(
    seed: int,
    u: npt.ArrayLike,
    v: npt.ArrayLike,
    purpose: Purpose = "sample",
) -> npt.NDArray[np.float64]:
    """Uniform [0, 1) values, one per pair, keyed on ``(seed, u, v)``."""
    index = colex_index(u, v)
    if index.size == 0:
        return np.zeros(0, dtype=np.float64)
    stream = generator(seed, purpose).random(int(index.max()) + 1)
    return stream[index]


def pair_keys(
    seed: int,
    u: npt.ArrayLike,
    v: npt.ArrayLike,
    purpose: Purpose = "tie",
) -> npt.NDArray[np.uint64]:
    """Raw 64-bit values, one per pair, keyed on ``(seed, u, v)``."""
    index = colex_index(u, v)
    if index.size == 0:
        return np.zeros(0, dtype=np.uint64)
    stream = bit_generator(seed, purpose).random_raw(int(index.max()) + 1)
    return np.asarray(stream, dtype=np.uint64)[index]


def derive_seeds(seed: int, count: int, purpose: Purpose = "batch") -> list[int]:
    """Derive ``count`` independent run seeds from one stream seed."""
    if count < 0:
        raise ValueError(f"count must be non-negative, got {count}")
    sequence = np.random.SeedSequence([check_seed(seed), _PURPOSE_TAGS[purpose]])
    return [int(s) for s in sequence.generate_state(count, dtype=np.uint32)]
