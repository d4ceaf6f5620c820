"""Seeded, splittable random source with Box-Muller normals."""

import copy
import zlib
from typing import Any

import numpy as np
from numpy.typing import NDArray

from src.neuralcore.matrix import Matrix


def _tag_to_int(tag: int | str) -> int:
    if isinstance(tag, str):
        return zlib.crc32(tag.encode("utf-8"))
    return int(tag)


class Rng:
    """Deterministic PCG64 stream; identical seeds give identical streams.

    Gaussian draws use Box-Muller on pairs of uniforms so that every normal
    value is a pure function of the uniform stream.
    """

    def __init__(self, seed: int, *, _seed_sequence: np.random.SeedSequence | None = None):
        self.seed = int(seed)
        self._seed_sequence = _seed_sequence or np.random.SeedSequence(self.seed)
        self._generator = np.random.Generator(np.random.PCG64(self._seed_sequence))

    @classmethod
    def derive(cls, seed: int, *tags: int | str) -> "Rng":
        """Independent stream keyed by ``seed`` and ``tags``."""
        entropy = [int(seed)] + [_tag_to_int(t) for t in tags]
        return cls(seed, _seed_sequence=np.random.SeedSequence(entropy))

    def split(self, count: int) -> list["Rng"]:
        """Child streams for independent work; child i depends only on the parent and i.

        The parent's draws are unaffected. Each call spawns new children.
        """
        return [
            Rng(self.seed, _seed_sequence=child)
            for child in self._seed_sequence.spawn(count)
        ]

    def uniform(self, size: int | tuple[int, ...]) -> NDArray[np.float64]:
        return self._generator.random(size)

    def standard_normal(self, size: int | tuple[int, ...]) -> Matrix:
        shape = (size,) if isinstance(size, int) else tuple(size)
        count = int(np.prod(shape))
        pairs = (count + 1) // 2
        u = self._generator.random((pairs, 2))
        z0, z1 = box_muller(u[:, 0], u[:, 1])
        return np.column_stack([z0, z1]).reshape(-1)[:count].reshape(shape)

    def get_state(self) -> dict[str, Any]:
        return copy.deepcopy(self._generator.bit_generator.state)

    def set_state(self, state: dict[str, Any]) -> None:
        self._generator.bit_generator.state = copy.deepcopy(state)

    @classmethod
    def from_state(cls, seed: int, state: dict[str, Any]) -> "Rng":
        rng = cls(seed)
        rng.set_state(state)
        return rng


def box_muller(
    u1: NDArray[np.float64], u2: NDArray[np.float64]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Two independent standard normals per pair of uniforms on [0, 1)."""
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)


def sample_standard_normal(n: int, dim: int, rng: Rng) -> Matrix:
    """n x dim matrix of IID N(0, 1) entries."""
    if n <= 0 or dim <= 0:
        raise ValueError(f"n and dim must be positive, got n={n}, dim={dim}")
    return rng.standard_normal((n, dim))
