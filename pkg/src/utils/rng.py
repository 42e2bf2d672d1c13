"""Named, seedable random streams.

Every random draw in the package goes through :func:`make_rng`, which derives an
independent ``numpy.random.Generator`` from ``(seed, *stream)`` with
``SeedSequence(entropy=seed, spawn_key=stream)``. The same key always yields the same
stream, no matter which worker process or in which order it is evaluated.

>>> a = make_rng(7, STREAM_PERMUTATION, 3).permutation(5)
>>> b = make_rng(7, STREAM_PERMUTATION, 3).permutation(5)
>>> bool((a == b).all())
True
>>> child_seed((7, 1), 4)
(7, 1, 4)
"""

from typing import Sequence, Tuple, Union

import numpy as np

from src.utils.errors import ValidationError

SeedLike = Union[int, Sequence[int]]

STREAM_RESTART = 0
STREAM_PERMUTATION = 1
STREAM_ORDER = 2
STREAM_RRM = 3
STREAM_MENUS = 4
STREAM_SUBJECT = 5


def _split(seed: SeedLike) -> Tuple[int, Tuple[int, ...]]:
    if isinstance(seed, (int, np.integer)):
        parts = (int(seed),)
    else:
        parts = tuple(int(s) for s in seed)
    if not parts or any(p < 0 for p in parts):
        raise ValidationError(f"seed must be a non-negative integer or key, got {seed!r}")
    return parts[0], parts[1:]


def child_seed(seed: SeedLike, *stream: int) -> Tuple[int, ...]:
    """Extends a seed key with stream indices, without drawing anything."""
    entropy, prefix = _split(seed)
    return (entropy, *prefix, *(int(s) for s in stream))


def make_rng(seed: SeedLike, *stream: int) -> np.random.Generator:
    """Returns the generator owned by the stream ``(seed, *stream)``."""
    entropy, prefix = _split(seed)
    key = prefix + tuple(int(s) for s in stream)
    return np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=key))
