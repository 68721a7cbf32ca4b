"""Codeword weight analysis: closed forms, brute force, and low-weight search.

Three routes to weight information, used to cross-check each other:

  * `polar_error_coefficient` -- closed-form minimum distance and number of
    minimum-weight codewords of a classical polar code, straight from the
    frozen set.
  * `exact_weight_enumerator` -- brute force over all 2^k messages (small
    codes only).
  * `low_weight_search` -- iterated information-set search on large codes:
    random column permutation, reduction to systematic form, enumeration of
    all single rows and row pairs.  Counts are lower bounds on the true
    spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from . import transform
from .construction import CodeSpec
from .gf2 import GF2Matrix

EXACT_ENUM_MAX_DIMENSION = 24
_ENUM_CHUNK = 4096


@dataclass(frozen=True)
class WeightRecord:
    """Number of codewords at one weight; `exact` is False for search bounds."""

    weight: int
    count: int
    exact: bool


def polar_error_coefficient(frozen_set, m: int) -> tuple[int, int]:
    """Minimum distance and minimum-weight codeword count of a polar code.

    For frozen set F over inputs [0, 2^m), the minimum distance is 2^r with
    r the least binary weight among unfrozen indices, and the count sums
    2^(m-r) * 2^|lambda_g| over unfrozen g of weight r, where lambda_g lists
    the zero-bit positions (i_0 < i_1 < ...) of g and |lambda_g| is
    sum_j (i_j - j).
    """
    full = 1 << m
    frozen = set(int(i) for i in frozen_set)
    if not all(0 <= i < full for i in frozen):
        raise ValueError("frozen index out of range")
    unfrozen = [g for g in range(full) if g not in frozen]
    if not unfrozen:
        raise ValueError("no unfrozen positions")
    r = min(g.bit_count() for g in unfrozen)
    total = 0
    for g in unfrozen:
        if g.bit_count() != r:
            continue
        zeros = [b for b in range(m) if not (g >> b) & 1]
        lam = sum(z - j for j, z in enumerate(zeros))
        total += 1 << lam
    return 1 << r, (1 << (m - r)) * total


def expected_subcode_spectrum(base_count: int, k: int, t: int) -> float:
    """Expected codeword count at one weight for a random k-dim subcode.

    A uniformly random k-dimensional subspace of a (k+t)-dimensional code
    keeps each nonzero codeword with probability (2^k - 1)/(2^(k+t) - 1),
    roughly 2^-t.
    """
    return float(Fraction(base_count) * Fraction((1 << k) - 1, (1 << (k + t)) - 1))


def _message_blocks(k: int):
    total = 1 << k
    shifts = np.arange(k, dtype=np.uint32)
    for start in range(0, total, _ENUM_CHUNK):
        idx = np.arange(start, min(start + _ENUM_CHUNK, total), dtype=np.uint32)
        yield ((idx[:, None] >> shifts) & 1).astype(np.uint8)


def exact_weight_enumerator(spec: CodeSpec) -> list[WeightRecord]:
    """Full weight spectrum by enumerating every message."""
    if spec.k > EXACT_ENUM_MAX_DIMENSION:
        raise ValueError(f"dimension {spec.k} too large for brute force")
    return [
        WeightRecord(weight=w, count=int(c), exact=True)
        for w, c in enumerate(generator_weight_histogram(spec.generator_matrix))
        if c
    ]


def generator_weight_histogram(gen: np.ndarray) -> np.ndarray:
    """Histogram of codeword weights over all messages of a generator matrix."""
    k, n = gen.shape
    if k > EXACT_ENUM_MAX_DIMENSION:
        raise ValueError(f"dimension {k} too large for brute force")
    hist = np.zeros(n + 1, dtype=np.int64)
    gen16 = gen.astype(np.int16)
    for msgs in _message_blocks(k):
        weights = ((msgs.astype(np.int16) @ gen16) & 1).sum(axis=1)
        hist += np.bincount(weights, minlength=n + 1)
    return hist


def null_space(matrix: GF2Matrix) -> np.ndarray:
    """Basis of the right null space over GF(2) as a (dim, cols) 0/1 array."""
    a = matrix.to_array().copy()
    rows, cols = a.shape
    pivot_of_col = np.full(cols, -1, dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hit = np.nonzero(a[r:, c])[0]
        if hit.size == 0:
            continue
        pr = r + int(hit[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        others = np.nonzero(a[:, c])[0]
        others = others[others != r]
        if others.size:
            a[others] ^= a[r]
        pivot_of_col[c] = r
        r += 1
    free_cols = np.nonzero(pivot_of_col < 0)[0]
    basis = np.zeros((free_cols.size, cols), dtype=np.uint8)
    for bi, fc in enumerate(free_cols):
        basis[bi, fc] = 1
        for c in range(cols):
            pr = pivot_of_col[c]
            if pr >= 0 and a[pr, fc]:
                basis[bi, c] = 1
    return basis


def constraint_generator_matrix(spec: CodeSpec) -> np.ndarray:
    """(k, n) generator derived from the constraint null space.

    Independent of the message-driven encoder: input-vector solutions of the
    constraint system are completed to a basis and pushed through the
    transform.
    """
    basis = null_space(spec.constraints)
    if basis.shape[0] != spec.k:
        raise ValueError(
            f"constraint system has nullity {basis.shape[0]}, expected {spec.k}"
        )
    return transform.shorten_output(transform.encode(basis), spec.n)


@dataclass(frozen=True)
class LowWeightSearchConfig:
    """Budgeted information-set search parameters."""

    weight_threshold: int
    iterations: int
    seed: int
    depth: int = 2

    def __post_init__(self):
        if self.depth not in (1, 2):
            raise ValueError("enumeration depth must be 1 or 2")
        if self.iterations <= 0:
            raise ValueError("iteration budget must be positive")
        if self.weight_threshold < 1:
            raise ValueError("weight threshold must be >= 1")


@njit(cache=True)
def _popcount_row(row):
    total = 0
    for t in range(row.shape[0]):
        x = row[t]
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        total += int((x * np.uint64(0x0101010101010101)) >> np.uint64(56))
    return total


@njit(cache=True)
def _systematic_form(mat):
    """In-place Gauss-Jordan on packed rows; returns rank."""
    k, w = mat.shape
    r = 0
    cols = w * 64
    for c in range(cols):
        if r == k:
            break
        wi = c >> 6
        bi = np.uint64(c & 63)
        pivot = -1
        for row in range(r, k):
            if (mat[row, wi] >> bi) & np.uint64(1):
                pivot = row
                break
        if pivot < 0:
            continue
        if pivot != r:
            for t in range(w):
                tmp = mat[r, t]
                mat[r, t] = mat[pivot, t]
                mat[pivot, t] = tmp
        for row in range(k):
            if row != r and ((mat[row, wi] >> bi) & np.uint64(1)):
                for t in range(w):
                    mat[row, t] ^= mat[r, t]
        r += 1
    return r


@njit(cache=True)
def _enumerate_combos(mat, threshold, depth, out):
    """Row singles/pairs with weight <= threshold; returns number found."""
    k = mat.shape[0]
    cap = out.shape[0]
    found = 0
    for i in range(k):
        if _popcount_row(mat[i]) <= threshold:
            if found < cap:
                out[found, 0] = i
                out[found, 1] = -1
            found += 1
    if depth >= 2:
        w = mat.shape[1]
        row = np.empty(w, np.uint64)
        for i in range(k):
            for j in range(i + 1, k):
                for t in range(w):
                    row[t] = mat[i, t] ^ mat[j, t]
                if _popcount_row(row) <= threshold:
                    if found < cap:
                        out[found, 0] = i
                        out[found, 1] = j
                    found += 1
    return found


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[1]
    pad = (-n) % 64
    if pad:
        bits = np.concatenate([bits, np.zeros((bits.shape[0], pad), dtype=np.uint8)], axis=1)
    packed = np.ascontiguousarray(np.packbits(bits, axis=1, bitorder="little"))
    return packed.view(np.uint64)


def search_low_weight_codewords(spec: CodeSpec, cfg: LowWeightSearchConfig) -> np.ndarray:
    """Distinct codewords of weight <= threshold found within the budget.

    Deterministic for a given seed: per-iteration permutations derive from
    (seed, iteration).  Returns a (count, n) 0/1 array sorted by weight then
    bytes; a lower bound on the true low-weight set.
    """
    gen = constraint_generator_matrix(spec)
    k, n = gen.shape
    found: dict[bytes, np.ndarray] = {}
    combo_buf = np.empty((8192, 2), dtype=np.int64)
    for it in range(cfg.iterations):
        rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, it)))
        perm = rng.permutation(n)
        work = _pack_rows(gen[:, perm])
        rank = _systematic_form(work)
        if rank != k:
            raise ValueError("generator matrix lost rank; broken code spec")
        n_found = _enumerate_combos(work, cfg.weight_threshold, cfg.depth, combo_buf)
        if n_found > combo_buf.shape[0]:
            raise RuntimeError("low-weight combination buffer overflow")
        if n_found == 0:
            continue
        rows = np.unpackbits(work.view(np.uint8), axis=1, bitorder="little")[:, :n]
        inv = np.empty(n, dtype=np.int64)
        inv[perm] = np.arange(n)
        for ci in range(n_found):
            i, j = combo_buf[ci]
            word_perm = rows[i] if j < 0 else rows[i] ^ rows[j]
            word = word_perm[inv]
            found.setdefault(word.tobytes(), word)
    words = sorted(found.values(), key=lambda w: (int(w.sum()), w.tobytes()))
    if not words:
        return np.zeros((0, n), dtype=np.uint8)
    return np.array(words, dtype=np.uint8)


def low_weight_search(spec: CodeSpec, cfg: LowWeightSearchConfig) -> list[WeightRecord]:
    """Lower-bound weight records from the information-set search."""
    words = search_low_weight_codewords(spec, cfg)
    if words.shape[0] == 0:
        return []
    weights = words.sum(axis=1)
    return [
        WeightRecord(weight=int(w), count=int((weights == w).sum()), exact=False)
        for w in np.unique(weights)
    ]
