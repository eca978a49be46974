"""Seed-derived random substreams.

Every generator in the package draws from a counter-based Philox stream keyed
by (seed, purpose_tag, index). Parallel tasks derive disjoint substreams from
the same master seed, so sweep results do not depend on scheduling or worker
count. Bit-identical reproducibility is promised within this implementation.
"""

import hashlib

import numpy as np

from .errors import ValidationError


def _tag_int(tag: str) -> int:
    digest = hashlib.blake2s(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    """Philox generator for (seed, tag, index), independent across tags/indices."""
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    if index < 0:
        raise ValidationError(f"substream index must be non-negative, got {index}")
    ss = np.random.SeedSequence([int(seed), _tag_int(tag), int(index)])
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(seed: int, tag: str, index: int = 0) -> int:
    """Collapse (seed, tag, index) to a single integer seed for a child task."""
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence([int(seed), _tag_int(tag), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])
