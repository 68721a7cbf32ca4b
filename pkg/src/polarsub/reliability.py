"""Subchannel reliability estimates for AWGN/BPSK via Gaussian approximation.

Density evolution tracks the mean LLR of each synthetic subchannel through
the polarization recursion.  Check-node steps use the standard two-piece
approximation of phi(x) = 1 - E[tanh(x/2)] under a N(x, 2x) input; the
variable-node step adds means.  Shortened output positions enter as
saturated (perfectly known) channels, which the recursion propagates.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .transform import removed_positions

# Mean-LLR saturation standing in for "perfectly reliable".  Kept finite so
# the phi recursions never see infinities; all combiners clamp to it.
MEAN_LLR_CAP = 1.0e6

# The small-x piece exp(-0.4527 x^0.86 + 0.0218) and the asymptotic piece
# sqrt(pi/x) e^(-x/4) (1 - 10/(7x)) cross here; switching at the crossing
# keeps phi continuous and strictly decreasing, which bisection relies on.
_PHI_SEAM = 14.394352942168442

_PHI_INV_REL_TOL = 1e-9


@dataclass(frozen=True)
class ChannelModel:
    """AWGN channel with BPSK modulation, parameterized by design Eb/N0."""

    ebno_db: float
    rate: float
    kind: str = "awgn-bpsk"

    def __post_init__(self):
        if self.kind != "awgn-bpsk":
            raise ValueError(f"unsupported channel kind {self.kind!r}")
        if not 0.0 < self.rate <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate}")

    def noise_variance(self) -> float:
        """sigma^2 = 1 / (2 * rate * 10^(ebno_db/10))."""
        var = 1.0 / (2.0 * self.rate * 10.0 ** (self.ebno_db / 10.0))
        if not var > 0.0:
            raise ValueError("noise variance must be positive")
        return var


def phi(x: np.ndarray | float) -> np.ndarray:
    """Two-piece approximation of the check-node mean-LLR functional."""
    x = np.asarray(x, dtype=np.float64)
    with np.errstate(under="ignore"):
        small = np.exp(-0.4527 * np.power(np.maximum(x, 0.0), 0.86) + 0.0218)
        big_x = np.maximum(x, _PHI_SEAM)
        big = np.sqrt(np.pi / big_x) * np.exp(-big_x / 4.0) * (1.0 - 10.0 / (7.0 * big_x))
    out = np.where(x < _PHI_SEAM, small, big)
    # the small-x piece slightly exceeds 1 near zero; pin to the valid range
    return np.where(x <= 0.0, 1.0, np.minimum(out, 1.0))


def phi_inv(y: np.ndarray | float) -> np.ndarray:
    """Inverse of phi by bisection on [0, MEAN_LLR_CAP]."""
    y = np.atleast_1d(np.asarray(y, dtype=np.float64))
    lo = np.zeros_like(y)
    hi = np.full_like(y, MEAN_LLR_CAP)
    floor = phi(MEAN_LLR_CAP)
    done_hi = y <= floor
    done_lo = y >= 1.0
    for _ in range(200):
        gap = hi - lo
        if np.all(gap <= _PHI_INV_REL_TOL * np.maximum(lo, 1e-30)):
            break
        mid = 0.5 * (lo + hi)
        above = phi(mid) > y
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    out = 0.5 * (lo + hi)
    out = np.where(done_hi, MEAN_LLR_CAP, out)
    out = np.where(done_lo, 0.0, out)
    return out


def _check_node(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Mean LLR of the degraded (xor) combination of two branches."""
    return phi_inv(1.0 - (1.0 - phi(a)) * (1.0 - phi(b)))


def _variable_node(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Mean LLR of the upgraded combination; means add, clamped at the cap."""
    return np.minimum(a + b, MEAN_LLR_CAP)


def _evolve(means: np.ndarray) -> np.ndarray:
    """Subchannel mean LLRs, in input-index order, from per-output-position means.

    Recurses on the two output halves first, then pairs their subchannels:
    the even input index takes the degraded combination, the odd the
    upgraded one, mirroring the decoder's recursion.
    """
    if means.size == 1:
        return means
    half = means.size // 2
    a = _evolve(means[:half])
    b = _evolve(means[half:])
    out = np.empty_like(means)
    out[0::2] = _check_node(a, b)
    out[1::2] = _variable_node(a, b)
    return out


def _q_func(x: np.ndarray) -> np.ndarray:
    return np.array([0.5 * math.erfc(v / math.sqrt(2.0)) for v in x])


def _enforce_degradation_order(means: np.ndarray, m: int) -> np.ndarray:
    """Clamp means to the universal degradation partial order.

    Setting an extra input-index bit, or moving a set bit to a more
    significant position, can only upgrade a subchannel, for any symmetric
    channel.  The approximate recursion can violate this by a small margin
    at low SNR; clamping each index's mean to at most that of every
    dominating successor removes those artifacts (ties are then resolved by
    index downstream).  Indices are processed successors-first.
    """
    out = means.copy()
    order = sorted(range(out.size), key=lambda i: (i.bit_count(), i), reverse=True)
    for i in order:
        best = out[i]
        for b in range(m):
            if not (i >> b) & 1:
                cand = out[i | (1 << b)]
                if cand < best:
                    best = cand
            elif b + 1 < m and not (i >> (b + 1)) & 1:
                cand = out[i + (1 << b)]
                if cand < best:
                    best = cand
        out[i] = best
    return out


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-subchannel mean LLRs and error-probability estimates.

    `mean_llrs` and `p_error` have length 2**m and are indexed by input
    position.  Shortened input positions (>= code length) carry the
    perfectly-reliable sentinel.
    """

    m: int
    shortened_count: int
    mean_llrs: np.ndarray = field(repr=False)
    p_error: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.mean_llrs.setflags(write=False)
        self.p_error.setflags(write=False)


@lru_cache(maxsize=None)
def evolve_reliabilities(channel: ChannelModel, m: int, n: int) -> ReliabilityProfile:
    """Gaussian-approximation density evolution, shortening-aware.

    The n transmitted output positions start at mean 2/sigma^2; the 2^m - n
    shortened output positions start saturated.  Results are cached per
    (channel, m, n).
    """
    full = 1 << m
    if not 1 <= n <= full:
        raise ValueError(f"code length {n} out of range for m={m}")
    sigma_sq = channel.noise_variance()
    init = np.full(full, min(2.0 / sigma_sq, MEAN_LLR_CAP), dtype=np.float64)
    if n < full:
        init[removed_positions(m, n)] = MEAN_LLR_CAP
    means = _enforce_degradation_order(_evolve(init), m)
    p = _q_func(np.sqrt(means / 2.0))
    # shortened input positions are frozen to zero and never in doubt
    means[n:] = MEAN_LLR_CAP
    p[n:] = 0.0
    return ReliabilityProfile(m=m, shortened_count=full - n, mean_llrs=means, p_error=p)


def order_by_reliability(profile: ReliabilityProfile, n: int) -> np.ndarray:
    """Indices 0..n-1 from least to most reliable; ties break by index."""
    p = profile.p_error[:n]
    return np.lexsort((np.arange(n), -p))


def dump_profile_csv(profile: ReliabilityProfile, out: io.TextIOBase) -> None:
    """Write `index,mean_llr,p_error` lines."""
    out.write("index,mean_llr,p_error\n")
    for i in range(profile.mean_llrs.size):
        out.write(f"{i},{profile.mean_llrs[i]:.6e},{profile.p_error[i]:.6e}\n")
