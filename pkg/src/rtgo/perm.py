"""Permutations and the deterministic random stream they are drawn from.

A permutation is a 1-D ``numpy.int64`` array holding each label ``1..n``
exactly once.  Positions are 1-based in every public signature; the array
itself is ordinary 0-based storage.  Arrays handed out by this module are
marked read-only so they can be shared without defensive copies.

Randomness comes from :class:`RngStream`, a small counter-free generator
(xoshiro256**) seeded through a splitmix64 expansion.  Independent
substreams are derived by hashing a parent seed together with integer
indices, which lets concurrent consumers draw reproducibly without
sharing mutable state.
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64

_GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX_A = U64(0xBF58476D1CE4E5B9)
_MIX_B = U64(0x94D049BB133111EB)

GENERATOR_NAME = "xoshiro256**"


@njit(cache=True, nogil=True)
def _mix64(z):
    # splitmix64 output function
    z = (z ^ (z >> U64(30))) * _MIX_A
    z = (z ^ (z >> U64(27))) * _MIX_B
    return z ^ (z >> U64(31))


@njit(cache=True, nogil=True)
def _seed_state(seed):
    # splitmix64 sequence expands one 64-bit seed into the 4-word state
    state = np.empty(4, np.uint64)
    s = U64(seed)
    for i in range(4):
        s = s + _GOLDEN
        state[i] = _mix64(s)
    return state


@njit(cache=True, nogil=True)
def _derive1(seed, x):
    # one link of the seed-derivation chain
    return _mix64((U64(seed) ^ _mix64(U64(x))) + _GOLDEN)


@njit(cache=True, nogil=True)
def _derive2(seed, a, b):
    return _derive1(_derive1(seed, a), b)


@njit(cache=True, nogil=True)
def _derive3(seed, a, b, c):
    return _derive1(_derive2(seed, a, b), c)


@njit(cache=True, nogil=True)
def _rotl(x, k):
    return (x << k) | (x >> (U64(64) - k))


@njit(cache=True, nogil=True)
def _next_u64(state):
    # xoshiro256** step, mutates state in place
    result = _rotl(state[1] * U64(5), U64(7)) * U64(9)
    t = state[1] << U64(17)
    state[2] ^= state[0]
    state[3] ^= state[1]
    state[1] ^= state[2]
    state[0] ^= state[3]
    state[2] ^= t
    state[3] = _rotl(state[3], U64(45))
    return result


@njit(cache=True, nogil=True)
def _below(state, n):
    # uniform integer in [0, n) by masked rejection, exact for any n >= 1
    if n <= 1:
        return np.int64(0)
    mask = U64(n - 1)
    mask |= mask >> U64(1)
    mask |= mask >> U64(2)
    mask |= mask >> U64(4)
    mask |= mask >> U64(8)
    mask |= mask >> U64(16)
    mask |= mask >> U64(32)
    bound = U64(n)
    while True:
        v = _next_u64(state) & mask
        if v < bound:
            return np.int64(v)


@njit(cache=True, nogil=True)
def _coin(state):
    # top bit of the next word
    return np.int64(_next_u64(state) >> U64(63))


@njit(cache=True, nogil=True)
def _shuffle(state, arr):
    # Fisher-Yates, consumes n-1 bounded draws
    for i in range(arr.size - 1, 0, -1):
        j = _below(state, i + 1)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@njit(cache=True, nogil=True)
def _rand_perm(state, n, out):
    for i in range(n):
        out[i] = i + 1
    _shuffle(state, out)


def derive_seed(seed: int, *indices: int) -> int:
    """Hash a parent seed with integer indices into a new 64-bit seed.

    The derivation is stateless: the same (seed, indices) always yields
    the same child seed, regardless of what has been drawn elsewhere.
    """
    h = seed % (1 << 64)
    for x in indices:
        # jitted calls return plain ints, so re-wrap before the next link
        h = _derive1(U64(h), U64(x % (1 << 64)))
    return int(h)


class RngStream:
    """Deterministic stream of 64-bit words with convenience draws.

    Two streams built from the same seed produce identical sequences.
    ``spawn`` derives an independent child stream from the stream's seed
    (not its current state), so spawning commutes with drawing.
    """

    __slots__ = ("seed", "_state")

    algorithm = GENERATOR_NAME

    def __init__(self, seed: int):
        if not isinstance(seed, (int, np.integer)):
            raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
        if not 0 <= int(seed) < (1 << 64):
            raise ValueError(f"seed must fit in 64 bits, got {seed}")
        self.seed = int(seed)
        self._state = _seed_state(U64(self.seed))

    @property
    def state(self) -> np.ndarray:
        """Raw 4-word state array, shared with the kernels that mutate it."""
        return self._state

    def next_u64(self) -> int:
        return int(_next_u64(self._state))

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``; ``n`` must be positive."""
        if n < 1:
            raise ValueError(f"below() needs n >= 1, got {n}")
        return int(_below(self._state, np.int64(n)))

    def coin(self) -> int:
        """Fair coin flip, 0 or 1."""
        return int(_coin(self._state))

    def shuffle(self, arr: np.ndarray) -> None:
        """Shuffle a 1-D int64 array in place (Fisher-Yates)."""
        _shuffle(self._state, arr)

    def permutation(self, n: int) -> np.ndarray:
        """Fresh writable permutation of the labels ``1..n``."""
        if n < 1:
            raise ValueError(f"permutation size must be >= 1, got {n}")
        out = np.empty(n, np.int64)
        _rand_perm(self._state, n, out)
        return out

    def spawn(self, *indices: int) -> "RngStream":
        """Independent child stream keyed by ``indices``."""
        return RngStream(derive_seed(self.seed, *indices))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed})"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def random_permutation(n: int, rng: RngStream) -> np.ndarray:
    """Uniformly random permutation of ``1..n``.

    Args:
        n: number of labels, at least 1.
        rng: stream supplying the shuffle draws.

    Returns:
        Read-only int64 array of length ``n``.
    """
    if n < 1:
        raise ValueError(f"permutation size must be >= 1, got {n}")
    return _frozen(rng.permutation(n))


def is_valid(p) -> bool:
    """True iff ``p`` holds each label ``1..len(p)`` exactly once.

    Total: any input yields True or False, never an exception.
    """
    try:
        arr = np.asarray(p)
    except Exception:
        return False
    if arr.ndim != 1 or arr.size < 1:
        return False
    if not np.issubdtype(arr.dtype, np.integer):
        return False
    n = arr.size
    seen = np.zeros(n, np.bool_)
    for v in arr:
        if v < 1 or v > n or seen[v - 1]:
            return False
        seen[v - 1] = True
    return True


def _check_position(n: int, pos: int, what: str) -> None:
    if not 1 <= pos <= n:
        raise IndexError(f"{what} must be in [1, {n}], got {pos}")


def insert_move(p: np.ndarray, source: int, target: int) -> np.ndarray:
    """Remove the element at 1-based ``source`` and reinsert it at ``target``.

    The element ends up occupying position ``target`` of the result; the
    relative order of everything else is preserved.
    """
    arr = np.asarray(p, np.int64)
    n = arr.size
    _check_position(n, source, "source position")
    _check_position(n, target, "target position")
    out = np.delete(arr, source - 1)
    out = np.insert(out, target - 1, arr[source - 1])
    return _frozen(out)


def swap_move(p: np.ndarray, i: int, j: int) -> np.ndarray:
    """Exchange the elements at 1-based positions ``i`` and ``j``."""
    arr = np.asarray(p, np.int64)
    n = arr.size
    _check_position(n, i, "position i")
    _check_position(n, j, "position j")
    out = arr.copy()
    out[i - 1], out[j - 1] = out[j - 1], out[i - 1]
    return _frozen(out)
