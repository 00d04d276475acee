"""Seeded random sources shared by generators and experiments."""
from __future__ import annotations

from typing import List

import numpy as np

#: Bit generator recorded in run metadata so every experiment is replayable.
PRNG_NAME = "PCG64"


def seeded_rng(seed: int) -> np.random.Generator:
    """Return a deterministic generator; equal seeds yield equal draw sequences."""

    return np.random.Generator(np.random.PCG64(seed))


def spawn_rngs(seed: int, count: int) -> List[np.random.Generator]:
    """Derive ``count`` independent generators from one seed.

    Children of a ``SeedSequence`` do not overlap, so e.g. concept draws and
    instance draws can be consumed at different rates without perturbing each other.
    """

    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


__all__ = ["PRNG_NAME", "seeded_rng", "spawn_rngs"]
