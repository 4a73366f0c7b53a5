"""Perlin noise structure: the upper triangle of a noise image as pair costs."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from rankgraph.errors import ValidationError
from rankgraph.rank import pair_arrays, rank_from_costs
from rankgraph.streams import generator

if TYPE_CHECKING:
    from rankgraph.rank import RankModel

BASE_FREQUENCY = 4.0
"""Lattice periods across the image side for the first octave."""


def _fade(t: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    return t * t * t * (t * (t * 6 - 15) + 10)


def _lerp(
    t: npt.NDArray[np.float64], a: npt.NDArray[np.float64], b: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    return a + t * (b - a)


def _grad(
    hashes: npt.NDArray[np.int64], x: npt.NDArray[np.float64], y: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """Improved-noise gradient dot product, restricted to the z = 0 plane."""
    h = hashes & 15
    first = np.where(h < 8, x, y)
    second = np.where(h < 4, y, np.where((h == 12) | (h == 14), x, 0.0))
    return np.where(h & 1, -first, first) + np.where(h & 2, -second, second)


class PerlinNoise:
    """Improved Perlin gradient noise with a seeded permutation table."""

    def __init__(self, seed: int = 0) -> None:
        perm = generator(seed, "perlin").permutation(256).astype(np.int64)
        self._perm = np.concatenate([perm, perm])

    def noise(self, x: npt.ArrayLike, y: npt.ArrayLike) -> npt.NDArray[np.float64]:
        """Noise value at each ``(x, y)``, roughly in [-1, 1]."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        xi = np.floor(x).astype(np.int64) & 255
        yi = np.floor(y).astype(np.int64) & 255
        xf = x - np.floor(x)
        yf = y - np.floor(y)
        u = _fade(xf)
        v = _fade(yf)

        p = self._perm
        a = p[xi] + yi
        b = p[xi + 1] + yi
        aa, ab = p[a], p[a + 1]
        ba, bb = p[b], p[b + 1]

        bottom = _lerp(u, _grad(p[aa], xf, yf), _grad(p[ba], xf - 1, yf))
        top = _lerp(u, _grad(p[ab], xf, yf - 1), _grad(p[bb], xf - 1, yf - 1))
        return _lerp(v, bottom, top)

    def fractal(
        self,
        x: npt.ArrayLike,
        y: npt.ArrayLike,
        octaves: int = 1,
        persistence: float = 0.5,
    ) -> npt.NDArray[np.float64]:
        """Sum of ``octaves`` layers, each at twice the frequency and ``persistence`` the amplitude."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        total = np.zeros(np.broadcast(x, y).shape)
        amplitude = 1.0
        frequency = 1.0
        for _ in range(octaves):
            total += amplitude * self.noise(x * frequency, y * frequency)
            amplitude *= persistence
            frequency *= 2.0
        return total


def noise_image(
    n: int,
    octaves: int = 1,
    seed: int = 0,
    *,
    frequency: float = BASE_FREQUENCY,
) -> npt.NDArray[np.float64]:
    """``n x n`` noise image sampled at pixel centers."""
    if octaves < 1:
        raise ValidationError(f"octaves must be at least 1, got {octaves}")
    coords = (np.arange(n) + 0.5) * frequency / n
    rows, cols = np.meshgrid(coords, coords, indexing="ij")
    return PerlinNoise(seed).fractal(rows, cols, octaves)


def perlin(
    n: int,
    octaves: int = 1,
    seed: int = 0,
    *,
    frequency: float = BASE_FREQUENCY,
) -> RankModel:
    """cost(u, v) is the noise value of pixel (u, v) of an ``n x n`` image."""
    image = noise_image(n, octaves, seed, frequency=frequency)
    u, v = pair_arrays(n)
    return rank_from_costs(n, image[u, v], tie_seed=seed, name="perlin")
