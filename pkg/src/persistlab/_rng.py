"""Counter-based random streams keyed on (seed, stream id, location index).

Every draw is a pure function of its key, so any slice of locations can be
generated on its own and agrees bit-for-bit with the full array. This is what
makes common-random-number counterfactuals and worker-count independence hold.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK64 = (1 << 64) - 1
_WORDS_PER_COUNTER = 4  # Philox4x64 emits four 64-bit words per counter value

# stream ids; s-process draws use S_PROCESS + period
TYPE = 1
TRAIT = 2
BENEFIT = 3
INSTRUMENT = 4
MARKOV = 5
EPS = 6
OUTCOME = 7
S_PROCESS = 1000


def _key(seed: int, stream: int) -> np.ndarray:
    return np.random.SeedSequence([seed & _MASK64, stream]).generate_state(2, np.uint64)


def uniforms(seed: int, stream: int, n: int, start: int = 0) -> np.ndarray:
    """Uniform(0, 1) draws for locations ``start .. start + n - 1``.

    Values lie strictly inside the unit interval.
    """
    if n < 0 or start < 0:
        raise ValueError("n and start must be nonnegative")
    bg = np.random.Philox(key=_key(seed, stream))
    bg.advance(start // _WORDS_PER_COUNTER)
    skip = start % _WORDS_PER_COUNTER
    raw = bg.random_raw(n + skip)[skip:]
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, stream: int, n: int, start: int = 0) -> np.ndarray:
    """Standard normal draws by inverse CDF, one uniform per location."""
    return ndtri(uniforms(seed, stream, n, start))


def derive_seed(seed: int, *path: int) -> int:
    """Child seed for e.g. a Monte Carlo replication index."""
    words = [seed & _MASK64, *(int(p) & _MASK64 for p in path)]
    return int(np.random.SeedSequence(words).generate_state(1, np.uint64)[0])
