"""Shared independent oracles for the test suite.

These deliberately avoid the library's decoder kernels: the recursive
min-sum reference below is a direct transcription of the combine rules, and
the genie simulator only uses the library for encoding and LLR layout.
"""

import numpy as np

from polarsub import transform
from polarsub.decoders import LLR_SATURATION, forced_decision_llrs


def naive_leaf_llr(chan_llr: np.ndarray, u_prefix: np.ndarray, i: int) -> float:
    """Leaf LLR for phase i given decided bits, by direct recursion.

    chan_llr is the full-length decoder input in transform-natural order.
    """

    def rec(llrs: np.ndarray, bits: np.ndarray, phase: int) -> float:
        n = llrs.size
        if n == 1:
            return float(llrs[0])
        half = n // 2
        a = llrs[:half]
        b = llrs[half:]
        if phase < half:
            sub = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
            return rec(sub, bits, phase)
        left_cw = transform_plain(bits[:half])
        sub = np.where(left_cw == 0, a, -a) + b
        return rec(sub, bits[half:], phase - half)

    return rec(chan_llr, u_prefix, i)


def transform_plain(u: np.ndarray) -> np.ndarray:
    """Butterfly without the bit-reversal output map (partial-sum domain)."""
    x = np.asarray(u, dtype=np.uint8).copy()
    n = x.size
    step = 2
    while step <= n:
        v = x.reshape(n // step, step)
        v[:, : step // 2] ^= v[:, step // 2 :]
        step *= 2
    return x.reshape(-1)


def naive_forced_llrs(chan_llr: np.ndarray, u: np.ndarray) -> np.ndarray:
    """All leaf LLRs along a forced path, via the direct recursion."""
    n = u.size
    out = np.empty(n)
    for i in range(n):
        out[i] = naive_leaf_llr(chan_llr, u[:i], i)
    return out


def expand_llrs(m: int, n: int, llr: np.ndarray) -> np.ndarray:
    """Length-n channel LLRs -> full-length decoder input (natural order)."""
    full = np.full(1 << m, LLR_SATURATION)
    full[transform.surviving_positions(m, n)] = llr
    return full[transform.bit_reverse_permutation(m)]


def genie_bit_error_rates(m: int, n: int, ebno_db: float, rate: float,
                          trials: int, seed: int) -> np.ndarray:
    """Per-phase decision error rates of genie-aided SC, Monte Carlo."""
    full = 1 << m
    sigma = float(np.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))))
    rng = np.random.default_rng(seed)
    errors = np.zeros(full, dtype=np.int64)
    perm = transform.bit_reverse_permutation(m)
    removed = transform.removed_positions(m, n)
    done = 0
    while done < trials:
        batch = min(20000, trials - done)
        u = rng.integers(0, 2, size=(batch, full), dtype=np.uint8)
        u[:, n:] = 0
        c = transform.encode(u)
        y = (1.0 - 2.0 * c.astype(np.float64)) + sigma * rng.standard_normal((batch, full))
        llr_c = (2.0 / sigma**2) * y
        llr_c[:, removed] = LLR_SATURATION
        leaf = forced_decision_llrs(llr_c[:, perm], u)
        errors += ((leaf < 0).astype(np.uint8) != u).sum(axis=0)
        done += batch
    return errors / trials


def dual_generator(gen: np.ndarray) -> np.ndarray:
    """Generator of the dual code (null space of the given generator)."""
    from polarsub.gf2 import GF2Matrix
    from polarsub.weights import null_space

    k, n = gen.shape
    mat = GF2Matrix(k, n)
    for r, c in zip(*np.nonzero(gen)):
        mat.set(int(r), int(c))
    return null_space(mat)


def _krawtchouk(n: int, i: int, j: int) -> int:
    from math import comb

    return sum((-1) ** l * comb(j, l) * comb(n - j, i - l) for l in range(i + 1))


def exact_weight_spectrum(gen: np.ndarray) -> np.ndarray:
    """Exact weight histogram of the code, via the dual when k is large.

    Direct enumeration up to 2^20 messages; beyond that the dual code is
    enumerated and transformed back (MacWilliams), all in exact integers.
    """
    from polarsub.weights import generator_weight_histogram

    k, n = gen.shape
    if k <= 20:
        return generator_weight_histogram(gen)
    dual = dual_generator(gen)
    assert dual.shape[0] == n - k
    a = generator_weight_histogram(dual)
    hist = np.zeros(n + 1, dtype=object)
    denom = 1 << (n - k)
    for i in range(n + 1):
        total = sum(int(a[j]) * _krawtchouk(n, i, j) for j in range(n + 1))
        assert total % denom == 0
        hist[i] = total // denom
    return hist.astype(np.int64)


def min_weight_and_count(gen: np.ndarray) -> tuple[int, int]:
    hist = exact_weight_spectrum(gen)
    for w in range(1, hist.size):
        if hist[w]:
            return w, int(hist[w])
    raise ValueError("degenerate code: no nonzero codeword")
