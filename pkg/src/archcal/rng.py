"""Counter-based random streams built on the SplitMix64 finalizer.

Every random quantity in the package is a pure function of a 64-bit key and
a draw counter, so results do not depend on the NumPy version, the platform
or the order in which repetitions are scheduled.

The k-th raw word of a stream with key ``s`` is ``mix64(s + (k + 1) * GAMMA)``
(this is exactly the SplitMix64 sequence seeded with ``s``).  Uniforms take the
top 53 bits and are centred in their bin, so they lie strictly inside (0, 1).

Child keys for repetitions and sub-streams are derived with :func:`derive`,
``derive(key, i) = mix64(key ^ mix64(i + GAMMA))``.
"""

import numpy as np
from scipy.special import ndtri

GAMMA = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _as_seed(seed) -> int:
    seed = int(seed)
    if seed < 0 or seed > _MASK:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def mix64(z):
    """SplitMix64 finalizer, vectorized over uint64 arrays."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        z = z ^ (z >> np.uint64(31))
    return z


def derive(seed, index) -> int:
    """Key of the ``index``-th child stream of ``seed``."""
    seed = _as_seed(seed)
    inner = int(mix64(np.array([(int(index) + GAMMA) & _MASK], dtype=np.uint64))[0])
    return int(mix64(np.array([seed ^ inner], dtype=np.uint64))[0])


class Stream:
    """Sequential reader over one counter-based stream.

    A stream owns a draw counter; two streams built from the same seed hand
    out identical values.  Streams are cheap, so create one per call instead
    of sharing them between threads.
    """

    def __init__(self, seed):
        self.seed = _as_seed(seed)
        self.counter = 0

    def raw(self, size: int) -> np.ndarray:
        size = int(size)
        k = np.arange(self.counter + 1, self.counter + size + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.seed) + k * np.uint64(GAMMA)
        self.counter += size
        return mix64(z)

    def uniform(self, shape) -> np.ndarray:
        shape = (shape,) if np.isscalar(shape) else tuple(shape)
        size = int(np.prod(shape, dtype=np.int64))
        bits = self.raw(size) >> np.uint64(11)
        return ((bits.astype(np.float64) + 0.5) * 2.0**-53).reshape(shape)

    def exponential(self, shape) -> np.ndarray:
        return -np.log(self.uniform(shape))

    def normal(self, shape) -> np.ndarray:
        # inversion keeps the mapping from counter to value explicit
        return ndtri(self.uniform(shape))

    def integers(self, high: int, shape) -> np.ndarray:
        """Integers uniform on ``0 .. high-1``."""
        idx = np.floor(self.uniform(shape) * high).astype(np.int64)
        return np.minimum(idx, high - 1)
