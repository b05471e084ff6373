"""Counter-based uniform deviates.

Deviate number ``t`` of stream ``(seed, stream)`` is word ``t`` of numpy's
Philox-4x64 generator keyed with ``[seed, stream]``; it depends on nothing
but those three integers.  Any slice of trials can therefore be drawn
independently, in any order, on any worker, with bit-identical results.
Uniforms are the top 53 bits of each word scaled into ``[0, 1)``.
"""
import numpy as np

from .exceptions import DomainError

CLICK_STREAM = 0
POLICY_STREAM = 1

_WORDS_PER_BLOCK = 4  # Philox-4x64 emits four words per counter value
_SEED_LIMIT = 2**64


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < _SEED_LIMIT:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def uniforms(seed: int, start: int, count: int, stream: int = CLICK_STREAM) -> np.ndarray:
    """Deviates ``start, ..., start + count - 1`` of the given stream."""
    if start < 0 or count < 0:
        raise DomainError("start and count must be >= 0")
    key = np.array([check_seed(seed), stream], dtype=np.uint64)
    gen = np.random.Philox(key=key)
    block, offset = divmod(int(start), _WORDS_PER_BLOCK)
    if block:
        gen.advance(block)
    raw = gen.random_raw(offset + int(count))[offset:]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 2**53)
