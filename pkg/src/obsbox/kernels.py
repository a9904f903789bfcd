"""Bulk numeric kernels, jitted when numba is available.

Each kernel has a pure-numpy implementation (suffix _np) and a jitted twin
(suffix _nb). The dispatching wrappers pick the jitted path unless numba is
missing or the OBSBOX_NO_NUMBA environment variable is set. Both paths are
written with identical floating-point operation order so their outputs are
bit-identical; tests assert this.
"""

from __future__ import annotations

import os

import numpy as np

from .rng import GOLDEN_GAMMA, MASK64, UNIT_SCALE

try:
    from numba import njit

    _HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    _HAS_NUMBA = False

_GAMMA = np.uint64(GOLDEN_GAMMA)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_U64_MAX = np.uint64(0xFFFFFFFFFFFFFFFF)
_ONE = np.uint64(1)


def numba_available() -> bool:
    return _HAS_NUMBA


def using_numba() -> bool:
    """True when the dispatching wrappers take the jitted path."""
    return _HAS_NUMBA and not os.environ.get("OBSBOX_NO_NUMBA")


def _norm_seed(seed: int) -> int:
    return int(seed) & MASK64


# -- raw stream blocks -------------------------------------------------------


def splitmix64_block_np(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs start..start+count-1 of the SplitMix64 stream as uint64."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    z = np.uint64(_norm_seed(seed)) + idx * _GAMMA
    z = (z ^ (z >> _S30)) * _MIX_A
    z = (z ^ (z >> _S27)) * _MIX_B
    return z ^ (z >> _S31)


if _HAS_NUMBA:

    @njit(cache=True)
    def _splitmix64_block_jit(seed, start, count):  # pragma: no cover - jitted
        out = np.empty(count, dtype=np.uint64)
        for i in range(count):
            z = seed + (np.uint64(start + i) + _ONE) * _GAMMA
            z = (z ^ (z >> _S30)) * _MIX_A
            z = (z ^ (z >> _S27)) * _MIX_B
            out[i] = z ^ (z >> _S31)
        return out

    def splitmix64_block_nb(seed: int, start: int, count: int) -> np.ndarray:
        return _splitmix64_block_jit(np.uint64(_norm_seed(seed)), start, count)


def splitmix64_block(seed: int, start: int, count: int) -> np.ndarray:
    if using_numba():
        return splitmix64_block_nb(seed, start, count)
    return splitmix64_block_np(seed, start, count)


# -- unit uniforms -----------------------------------------------------------


def unit_uniforms_np(seed: int, start: int, count: int) -> np.ndarray:
    """count floats in [0, 1), 53 random bits each."""
    raw = splitmix64_block_np(seed, start, count)
    return (raw >> _S11).astype(np.float64) * UNIT_SCALE


if _HAS_NUMBA:

    @njit(cache=True)
    def _unit_uniforms_jit(seed, start, count):  # pragma: no cover - jitted
        out = np.empty(count, dtype=np.float64)
        for i in range(count):
            z = seed + (np.uint64(start + i) + _ONE) * _GAMMA
            z = (z ^ (z >> _S30)) * _MIX_A
            z = (z ^ (z >> _S27)) * _MIX_B
            z = z ^ (z >> _S31)
            out[i] = np.float64(z >> _S11) * UNIT_SCALE
        return out

    def unit_uniforms_nb(seed: int, start: int, count: int) -> np.ndarray:
        return _unit_uniforms_jit(np.uint64(_norm_seed(seed)), start, count)


def unit_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    if using_numba():
        return unit_uniforms_nb(seed, start, count)
    return unit_uniforms_np(seed, start, count)


# -- bounded integers (modulo with tail rejection) ---------------------------
#
# The stream is consumed sequentially: each output draws u64 values until one
# falls below the rejection threshold. Draw k's value therefore depends on how
# many raw values earlier draws consumed, which both implementations replicate
# by construction (they take the first `count` accepted values in stream
# order).


def uniform_indices_np(seed: int, nvalues: int, count: int) -> np.ndarray:
    if nvalues <= 0:
        raise ValueError("nvalues must be positive")
    tail = (1 << 64) % nvalues
    accept_max = np.uint64(MASK64 - tail)
    nv = np.uint64(nvalues)
    out = np.empty(count, dtype=np.int64)
    filled = 0
    start = 0
    while filled < count:
        need = count - filled
        chunk = max(1024, need + (need >> 4) + 16)
        raw = splitmix64_block_np(seed, start, chunk)
        start += chunk
        good = raw[raw <= accept_max]
        take = min(good.size, need)
        out[filled:filled + take] = (good[:take] % nv).astype(np.int64)
        filled += take
    return out


if _HAS_NUMBA:

    @njit(cache=True)
    def _uniform_indices_jit(seed, nv, count):  # pragma: no cover - jitted
        tail = (np.uint64(0) - nv) % nv
        accept_max = _U64_MAX - tail
        out = np.empty(count, dtype=np.int64)
        pos = np.uint64(0)
        filled = 0
        while filled < count:
            pos += _ONE
            z = seed + pos * _GAMMA
            z = (z ^ (z >> _S30)) * _MIX_A
            z = (z ^ (z >> _S27)) * _MIX_B
            z = z ^ (z >> _S31)
            if z <= accept_max:
                out[filled] = np.int64(z % nv)
                filled += 1
        return out

    def uniform_indices_nb(seed: int, nvalues: int, count: int) -> np.ndarray:
        if nvalues <= 0:
            raise ValueError("nvalues must be positive")
        return _uniform_indices_jit(
            np.uint64(_norm_seed(seed)), np.uint64(nvalues), count
        )


def uniform_indices(seed: int, nvalues: int, count: int) -> np.ndarray:
    """count uniform draws from [0, nvalues) as int64."""
    if using_numba():
        return uniform_indices_nb(seed, nvalues, count)
    return uniform_indices_np(seed, nvalues, count)


# -- inverse-CDF interpolation ------------------------------------------------


def sample_icdf_np(xs: np.ndarray, cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map uniforms in [0, 1) through the tabulated CDF by linear interpolation."""
    j = np.searchsorted(cdf, u, side="right") - 1
    j = np.clip(j, 0, cdf.size - 2)
    c0 = cdf[j]
    denom = cdf[j + 1] - c0
    safe = np.where(denom > 0.0, denom, 1.0)
    t = np.where(denom > 0.0, (u - c0) / safe, 0.0)
    return xs[j] + t * (xs[j + 1] - xs[j])


if _HAS_NUMBA:

    @njit(cache=True)
    def _sample_icdf_jit(xs, cdf, u):  # pragma: no cover - jitted
        n = cdf.size
        out = np.empty(u.size, dtype=np.float64)
        for k in range(u.size):
            v = u[k]
            lo = 0
            hi = n
            while lo < hi:
                mid = (lo + hi) >> 1
                if cdf[mid] <= v:
                    lo = mid + 1
                else:
                    hi = mid
            j = lo - 1
            if j < 0:
                j = 0
            elif j > n - 2:
                j = n - 2
            c0 = cdf[j]
            denom = cdf[j + 1] - c0
            if denom > 0.0:
                t = (v - c0) / denom
            else:
                t = 0.0
            out[k] = xs[j] + t * (xs[j + 1] - xs[j])
        return out

    def sample_icdf_nb(xs: np.ndarray, cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
        return _sample_icdf_jit(
            np.ascontiguousarray(xs, dtype=np.float64),
            np.ascontiguousarray(cdf, dtype=np.float64),
            np.ascontiguousarray(u, dtype=np.float64),
        )


def sample_icdf(xs: np.ndarray, cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    if using_numba():
        return sample_icdf_nb(xs, cdf, u)
    return sample_icdf_np(xs, cdf, u)
