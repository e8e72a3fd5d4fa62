# utils/rng.py
"""Seed splitting.

Every random stream in the package is derived from a master seed by

    seed64 = int.from_bytes(blake2b(f"{master_seed}:{index}:{label_1}:...").digest()[:8], "little")
    stream = numpy.random.Generator(numpy.random.PCG64(seed64))

so replica ``i`` keeps its stream when replica counts change, and callers can
carve independent sub-streams by appending labels.
"""
import hashlib
from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, None]


def derive_seed(master_seed: int, index: int = 0, *labels: object) -> int:
    key = ":".join(str(part) for part in (int(master_seed), int(index)) + labels)
    digest = hashlib.blake2b(key.encode("utf-8"), digest_size=16).digest()
    return int.from_bytes(digest[:8], "little")


def derive_stream(master_seed: int, index: int = 0, *labels: object) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, index, *labels)))


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn_seed(rng: np.random.Generator) -> int:
    """Draw a master seed from an existing stream (for APIs that take a Generator)."""
    return int(rng.integers(0, 2**63 - 1))
