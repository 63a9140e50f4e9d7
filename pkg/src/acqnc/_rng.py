"""Seeded random streams derived from one root seed and a tuple of labels.

Streams are counter-based (Philox), so a label path always yields the same
sequence regardless of the order in which streams are created.
"""

from __future__ import annotations

import zlib

import numpy as np


def _label_word(label) -> int:
    return zlib.crc32(repr(label).encode()) & 0xFFFFFFFF


def stream(seed: int, *labels) -> np.random.Generator:
    words = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [_label_word(x) for x in labels]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))
