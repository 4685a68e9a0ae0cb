"""Deterministic, splittable random streams.

All randomness in the package flows through PCG64 generators keyed by a
64-bit seed plus a tuple of purpose tags.  Adding a new random consumer
with a fresh tag never perturbs the streams of existing consumers, and
identical (seed, tags) always reproduce the same stream on any platform.
"""

from __future__ import annotations

import hashlib

import numpy as np


def stable_hash64(*parts: int | float | str) -> int:
    """Platform-independent 64-bit hash of a tag tuple."""
    material = "\x1f".join(f"{type(p).__name__}:{p!r}" for p in parts)
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def substream(seed: int, *tags: int | float | str) -> np.random.Generator:
    """A PCG64 generator for the stream identified by (seed, *tags)."""
    digest = hashlib.sha256(
        "\x1f".join([f"seed:{int(seed)}"]
                    + [f"{type(t).__name__}:{t!r}" for t in tags]).encode("utf-8")
    ).digest()
    words = [int.from_bytes(digest[i:i + 8], "little") for i in range(0, 32, 8)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))
