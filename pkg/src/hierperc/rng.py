"""Counter-keyed random streams usable from compiled kernels.

Every replicate owns an independent xoshiro256** stream whose 64-bit key is
a hash of (root seed, module tag, replicate index).  Nothing is shared across
replicates, so results do not depend on how replicates are scheduled.
"""

import hashlib

import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_U17 = np.uint64(17)
_TWO_M53 = 1.0 / 9007199254740992.0


def stream_key(seed, tag):
    """64-bit base key for the streams of one (seed, tag) family."""
    digest = hashlib.blake2b(f"{int(seed)}|{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@njit(cache=True)
def splitmix64(x):
    z = x + _GOLDEN
    z = (z ^ (z >> _U30)) * _MIX1
    z = (z ^ (z >> _U27)) * _MIX2
    return z ^ (z >> _U31)


@njit(cache=True)
def _rotl(x, k):
    return (x << np.uint64(k)) | (x >> np.uint64(64 - k))


@njit(cache=True)
def replicate_key(base_key, index):
    return splitmix64(np.uint64(base_key) ^ splitmix64(np.uint64(index) * _GOLDEN))


@njit(cache=True)
def seed_state(state, key):
    x = np.uint64(key)
    for i in range(4):
        x = x + _GOLDEN
        z = x
        z = (z ^ (z >> _U30)) * _MIX1
        z = (z ^ (z >> _U27)) * _MIX2
        state[i] = z ^ (z >> _U31)


@njit(cache=True)
def new_state(key):
    state = np.empty(4, dtype=np.uint64)
    seed_state(state, key)
    return state


@njit(cache=True)
def next_u64(s):
    result = _rotl(s[1] * np.uint64(5), 7) * np.uint64(9)
    t = s[1] << _U17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


@njit(cache=True)
def uniform(s):
    """Uniform double on [0, 1)."""
    return float(next_u64(s) >> _U11) * _TWO_M53


@njit(cache=True)
def uniform_pos(s):
    """Uniform double on (0, 1]."""
    return float((next_u64(s) >> _U11) + np.uint64(1)) * _TWO_M53


@njit(cache=True)
def randbelow(s, n):
    """Unbiased integer in [0, n) for 1 <= n < 2**63."""
    un = np.uint64(n)
    lim = (np.uint64(0) - un) % un
    while True:
        x = next_u64(s)
        if x >= lim:
            return np.int64(x % un)


@njit(cache=True)
def exponential(s):
    return -np.log(uniform_pos(s))


@njit(cache=True)
def _binomial_inversion(s, n, p):
    # sequential search from 0; expected cost ~ n*p, so only for small means
    q = 1.0 - p
    r = p / q
    f0 = np.exp(n * np.log1p(-p))
    while True:
        u = uniform(s)
        f = f0
        k = 0
        while u >= f:
            u -= f
            k += 1
            if k > n or f == 0.0:
                break
            f *= r * (n - k + 1.0) / k
        else:
            return k
        # ran off the end through rounding; redraw


@njit(cache=True)
def _binomial_waiting(s, n, p):
    # positions of successes via geometric gaps; cost ~ n*p
    lq = np.log1p(-p)
    pos = 0.0
    k = 0
    while True:
        pos += np.floor(np.log(uniform_pos(s)) / lq) + 1.0
        if pos > n:
            return k
        k += 1


@njit(cache=True)
def binomial(s, n, p):
    """Binomial(n, p) draw; ``n`` is a float so huge trial counts are allowed."""
    if n <= 0.0 or p <= 0.0:
        return 0
    if p >= 1.0:
        return np.int64(n)
    if p > 0.5:
        return np.int64(n) - binomial(s, n, 1.0 - p)
    if n * p < 16.0:
        return _binomial_inversion(s, n, p)
    return _binomial_waiting(s, n, p)


@njit(cache=True)
def binomial_positive(s, n, p):
    """Binomial(n, p) conditioned on being at least one."""
    if n * p > 1.0:
        while True:
            k = binomial(s, n, p)
            if k > 0:
                return k
    q = 1.0 - p
    r = p / q
    f0 = np.exp(n * np.log1p(-p))
    total = -np.expm1(n * np.log1p(-p))
    while True:
        u = uniform(s) * total
        f = f0 * r * n
        k = 1
        while u >= f:
            u -= f
            k += 1
            if k > n or f == 0.0:
                break
            f *= r * (n - k + 1.0) / k
        else:
            return k
