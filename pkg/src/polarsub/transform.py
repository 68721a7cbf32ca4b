"""Polarizing transform: in-place butterfly encoder, bit reversal, shortening.

The transform matrix is the m-fold Kronecker power of [[1,0],[1,1]] followed
by the bit-reversal permutation.  It is never materialized; encoding runs the
m-stage xor butterfly and applies the permutation to the output index map.
The transform is an involution over GF(2), which the tests exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_LEVELS = 20


@dataclass(frozen=True)
class TransformParams:
    """Number of polarization levels; block length is 2**m."""

    m: int

    def __post_init__(self):
        if not 1 <= self.m <= MAX_LEVELS:
            raise ValueError(f"m must be in [1, {MAX_LEVELS}], got {self.m}")

    @property
    def full_length(self) -> int:
        return 1 << self.m


def bit_reverse(i: int, m: int) -> int:
    """Reverse the m-bit binary expansion of i."""
    if not 0 <= i < (1 << m):
        raise ValueError(f"index {i} out of range for m={m}")
    out = 0
    for _ in range(m):
        out = (out << 1) | (i & 1)
        i >>= 1
    return out


@lru_cache(maxsize=None)
def bit_reverse_permutation(m: int) -> np.ndarray:
    """Array p with p[i] = bit_reverse(i, m).  Cached; treat as read-only."""
    p = np.array([bit_reverse(i, m) for i in range(1 << m)], dtype=np.int64)
    p.setflags(write=False)
    return p


def _infer_m(n: int) -> int:
    m = (n - 1).bit_length()
    if n != (1 << m) or n < 2:
        raise ValueError(f"input length {n} is not a power of two >= 2")
    return m


def encode(u: np.ndarray) -> np.ndarray:
    """Apply the polarizing transform along the last axis.

    Accepts a single vector or a batch (..., 2**m) of 0/1 values and returns
    the codeword(s) before shortening.
    """
    u = np.asarray(u, dtype=np.uint8)
    n = u.shape[-1]
    m = _infer_m(n)
    x = u.copy()
    flat = x.reshape(-1, n)
    for s in range(m):
        step = 2 << s
        v = flat.reshape(flat.shape[0], n // step, step)
        v[:, :, : step // 2] ^= v[:, :, step // 2 :]
    perm = bit_reverse_permutation(m)
    return flat[:, perm].reshape(u.shape)


def encode_involution_check(u: np.ndarray) -> np.ndarray:
    """Round-trip helper: encode twice.  Equals the input for any u."""
    return encode(encode(u))


@lru_cache(maxsize=None)
def removed_positions(m: int, n: int) -> np.ndarray:
    """Output positions deleted when shortening 2**m down to n (sorted)."""
    full = 1 << m
    if not 1 <= n <= full:
        raise ValueError(f"target length {n} out of range for m={m}")
    pos = np.array(sorted(bit_reverse(i, m) for i in range(n, full)), dtype=np.int64)
    pos.setflags(write=False)
    return pos


@lru_cache(maxsize=None)
def surviving_positions(m: int, n: int) -> np.ndarray:
    """Output positions kept after shortening, in original order."""
    full = 1 << m
    keep = np.ones(full, dtype=bool)
    keep[removed_positions(m, n)] = False
    pos = np.nonzero(keep)[0]
    pos.setflags(write=False)
    return pos


def shorten_output(c: np.ndarray, n: int) -> np.ndarray:
    """Drop the provably-zero output positions to reach length n.

    The inputs feeding the dropped positions must have been zero; a nonzero
    value there means an upstream constraint was violated and raises.
    """
    c = np.asarray(c, dtype=np.uint8)
    full = c.shape[-1]
    m = _infer_m(full)
    if not 1 <= n <= full:
        raise ValueError(f"target length {n} out of range for m={m}")
    if n == full:
        return c.copy()
    dropped = removed_positions(m, n)
    if np.any(c[..., dropped]):
        raise ValueError("shortened output position is nonzero; constraints violated upstream")
    return c[..., surviving_positions(m, n)]
