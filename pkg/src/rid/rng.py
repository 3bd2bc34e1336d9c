"""Counter-based random streams.

Every draw is a pure function of ``(seed, stream, counter)``: a splitmix64
finalizer is applied to a key derived from the seed and stream, combined with
the counter. Nothing is sequential, so a matrix can be filled in any order or
by any number of workers and still come out bit-for-bit identical.
"""

from dataclasses import dataclass

import numba as nb
import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

U_GOLDEN = np.uint64(_GOLDEN)
U_M1 = np.uint64(_M1)
U_M2 = np.uint64(_M2)
U30 = np.uint64(30)
U27 = np.uint64(27)
U31 = np.uint64(31)
U11 = np.uint64(11)
INV_2_53 = 1.0 / 9007199254740992.0


def splitmix64(z):
    """Reference splitmix64 finalizer on Python ints (used for keys and tests)."""
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


@nb.njit(nogil=True, cache=True)
def mix64(z):
    z = z + U_GOLDEN
    z = (z ^ (z >> U30)) * U_M1
    z = (z ^ (z >> U27)) * U_M2
    return z ^ (z >> U31)


@nb.njit(nogil=True, cache=True)
def draw_u64(key, counter):
    return mix64(key ^ mix64(counter))


@nb.njit(nogil=True, cache=True)
def to_unit_open(h):
    # (0, 1]: safe for log()
    return (np.float64(h >> U11) + 1.0) * INV_2_53


@nb.njit(nogil=True, cache=True)
def to_unit_halfopen(h):
    # [0, 1)
    return np.float64(h >> U11) * INV_2_53


# Domain tags keep the different consumers of one RngState apart.
TAG_GAUSSIAN = 0x6761757373
TAG_PHASES = 0x7068617365
TAG_ROWS = 0x726F7773
TAG_POWER = 0x706F776572


@dataclass(frozen=True)
class RngState:
    """Seed plus substream identifier; both unsigned 64-bit.

    Two states with the same ``(seed, stream)`` produce the same draws.
    """

    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= int(v) <= _MASK:
                raise ValueError(f"{name} must fit in an unsigned 64-bit integer, got {v}")
            object.__setattr__(self, name, int(v))

    def key(self, tag=0):
        """64-bit key for domain `tag` of this stream."""
        k = splitmix64(self.seed ^ splitmix64(self.stream ^ splitmix64(tag & _MASK)))
        return np.uint64(k)

    def derive(self, tag):
        """A fresh, independent substream labelled by `tag`."""
        return RngState(self.seed, splitmix64(self.stream ^ splitmix64((tag * _M1) & _MASK)))
