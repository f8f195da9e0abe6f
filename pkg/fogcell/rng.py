"""Seeded random streams for reproducible simulation.

Every stochastic operation in fogcell names a stream label. A substream seed is a
pure function of ``(master_seed, stream_label, *index)``:

    entropy = [master_seed, blake2b_64(stream_label), *index]
    seed    = numpy.random.SeedSequence(entropy).generate_state(1, uint64)[0]

and the stream itself is ``numpy.random.Generator(PCG64(seed))``. Gaussian samples
come from ``Generator.standard_normal`` (ziggurat), uniforms from
``Generator.random`` and exponentials from ``Generator.exponential``, so outputs are
bit-reproducible on one platform regardless of the order in which substreams are
consumed.
"""

from __future__ import annotations

import hashlib

import numpy as np

from fogcell.exceptions import InvalidParameterError

# Monte-Carlo trials are drawn in fixed-size blocks; block b of a stream uses index b.
MC_BLOCK = 4096

UINT64_MASK = (1 << 64) - 1

LINK_SHADOWING = "link-shadowing"
ROAD_PLACEMENT = "road-placement"
DEMANDS = "demands"
FOGSIM_ARRIVALS = "fogsim-arrivals"
FOGSIM_EPOCH = "fogsim-epoch"


def label_digest(stream_label: str) -> int:
    """64-bit digest of a stream label."""
    digest = hashlib.blake2b(stream_label.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(master_seed: int, stream_label: str, *index: int) -> int:
    """Map (master_seed, stream_label, index...) to a 64-bit substream seed."""
    if master_seed < 0:
        raise InvalidParameterError("seed", f"must be a non-negative 64-bit integer, got {master_seed}")
    entropy = [master_seed & UINT64_MASK, label_digest(stream_label)]
    for i in index:
        if i < 0:
            raise InvalidParameterError("index", f"stream indices must be >= 0, got {i}")
        entropy.append(int(i))
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)
    return int(state[0])


def stream(master_seed: int, stream_label: str, *index: int) -> np.random.Generator:
    """Independent generator for one labelled substream."""
    return np.random.Generator(np.random.PCG64(derive_seed(master_seed, stream_label, *index)))


def block_sizes(trials: int, block: int = MC_BLOCK) -> list[int]:
    """Split ``trials`` into consecutive blocks of ``block`` (last one partial)."""
    full, rest = divmod(trials, block)
    sizes = [block] * full
    if rest:
        sizes.append(rest)
    return sizes
