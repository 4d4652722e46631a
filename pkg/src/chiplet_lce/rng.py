"""Counter-based random substreams.

Every Monte Carlo trial draws from its own SplitMix64 sequence whose starting
state is a hash of ``(seed, iteration_index)``. Draw ``j`` of trial ``i`` is a
pure function of ``(seed, i, j)``, so a batch of trials can be generated as one
vectorised array and still match, element for element, what
:func:`rng_stream` returns for a single trial. Results never depend on how the
trials are split across workers.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_STREAM_STEP = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / (1 << 53)


def mix64(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser on a ``uint64`` array (wrapping arithmetic)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return seed


def derive_seed(seed: int, index: int) -> int:
    """Child seed for sub-task ``index``; ``derive_seed(s, 0) == s``."""
    seed = _check_seed(seed)
    return (seed + int(index) * int(_GOLDEN)) & MASK64


def stream_states(seed: int, iteration_indices) -> np.ndarray:
    """Initial SplitMix64 state for each requested iteration."""
    seed = _check_seed(seed)
    idx = np.asarray(iteration_indices, dtype=np.uint64)
    base = mix64(np.uint64(seed))
    with np.errstate(over="ignore"):
        return mix64(base + idx * _STREAM_STEP)


def uniforms(seed: int, iteration_indices, n_draws: int, offset: int = 0) -> np.ndarray:
    """Uniform [0, 1) draws, shape ``(len(iteration_indices), n_draws)``.

    Row ``r`` holds draws ``offset .. offset + n_draws - 1`` of the substream
    for ``iteration_indices[r]``.
    """
    states = stream_states(seed, iteration_indices)
    with np.errstate(over="ignore"):
        steps = np.arange(offset + 1, offset + n_draws + 1, dtype=np.uint64) * _GOLDEN
        out = mix64(states[:, None] + steps[None, :])
    return (out >> _S11).astype(np.float64) * _INV53


class Substream:
    """Sequential view of one trial's substream."""

    def __init__(self, seed: int, iteration_index: int):
        self.seed = _check_seed(seed)
        if iteration_index < 0:
            raise ValueError("iteration_index must be >= 0")
        self.iteration_index = int(iteration_index)
        self._position = 0

    def random(self, size: int | None = None):
        """Next ``size`` uniforms in [0, 1); a float when ``size`` is None."""
        n = 1 if size is None else int(size)
        draws = uniforms(self.seed, [self.iteration_index], n, self._position)[0]
        self._position += n
        return float(draws[0]) if size is None else draws

    def bernoulli(self, p, size: int | None = None):
        """True with probability ``p`` for each draw."""
        return self.random(size) < p


def rng_stream(seed: int, iteration_index: int) -> Substream:
    """Deterministic substream for one Monte Carlo trial."""
    return Substream(seed, iteration_index)
