"""Bit-packed vectors and matrices over GF(2).

Vectors are packed little-endian into 64-bit words: bit ``i`` lives at bit
``i % 64`` of word ``i // 64``.  Bits beyond the declared length are kept
zero so raw words can be compared and hashed directly.  The packing is an
internal detail; every external format speaks in explicit column indices.
"""

from __future__ import annotations

import numpy as np

WORD_BITS = 64
_WORD_MASK = np.uint64(0xFFFFFFFFFFFFFFFF)


def _n_words(n_bits: int) -> int:
    return (n_bits + WORD_BITS - 1) // WORD_BITS


class BitVec:
    """Fixed-length bit vector packed into 64-bit words."""

    __slots__ = ("length", "words")

    def __init__(self, length: int, words: np.ndarray | None = None):
        length = int(length)
        if length < 0:
            raise ValueError("length must be non-negative")
        self.length = length
        if words is None:
            self.words = np.zeros(_n_words(length), dtype=np.uint64)
        else:
            words = np.ascontiguousarray(words, dtype=np.uint64)
            if words.shape != (_n_words(length),):
                raise ValueError("word count does not match length")
            self.words = words
            self._mask_tail()

    def _mask_tail(self) -> None:
        rem = self.length % WORD_BITS
        if rem and self.words.size:
            self.words[-1] &= np.uint64((1 << rem) - 1)

    @classmethod
    def from_bits(cls, bits) -> "BitVec":
        arr = np.asarray(bits, dtype=np.uint8)
        v = cls(arr.size)
        for i in np.nonzero(arr)[0]:
            v.set(int(i))
        return v

    @classmethod
    def from_indices(cls, length: int, indices) -> "BitVec":
        v = cls(length)
        for i in indices:
            v.set(int(i))
        return v

    def copy(self) -> "BitVec":
        return BitVec(self.length, self.words.copy())

    def get(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(f"bit index {i} out of range [0, {self.length})")
        return int(self.words[i // WORD_BITS] >> np.uint64(i % WORD_BITS)) & 1

    def set(self, i: int, value: int = 1) -> None:
        if not 0 <= i < self.length:
            raise IndexError(f"bit index {i} out of range [0, {self.length})")
        w, b = divmod(i, WORD_BITS)
        if value & 1:
            self.words[w] |= np.uint64(1) << np.uint64(b)
        else:
            self.words[w] &= ~(np.uint64(1) << np.uint64(b))

    def to_array(self) -> np.ndarray:
        """Unpack to a uint8 array of 0/1 values."""
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return bits[: self.length]

    def indices(self) -> list[int]:
        """Positions of set bits, ascending."""
        return [int(i) for i in np.nonzero(self.to_array())[0]]

    def weight(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def __xor__(self, other: "BitVec") -> "BitVec":
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVec(self.length, self.words ^ other.words)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitVec)
            and self.length == other.length
            and bool(np.array_equal(self.words, other.words))
        )

    def __hash__(self) -> int:
        return hash((self.length, self.words.tobytes()))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"BitVec({self.length}, bits={''.join(map(str, self.to_array()))})"


def xor_into(dst: BitVec, src: BitVec) -> BitVec:
    """In-place xor: dst ^= src.  Lengths must match."""
    if dst.length != src.length:
        raise ValueError(f"length mismatch: {dst.length} != {src.length}")
    dst.words ^= src.words
    return dst


def last_set_position(v: BitVec) -> int | None:
    """Largest index with a set bit, or None for the zero vector."""
    nz = np.nonzero(v.words)[0]
    if nz.size == 0:
        return None
    w = int(nz[-1])
    return w * WORD_BITS + int(v.words[w]).bit_length() - 1


class GF2Matrix:
    """Dense GF(2) matrix stored as one packed row per matrix row."""

    __slots__ = ("n_rows", "n_cols", "data")

    def __init__(self, n_rows: int, n_cols: int, data: np.ndarray | None = None):
        self.n_rows = int(n_rows)
        self.n_cols = int(n_cols)
        words = _n_words(self.n_cols)
        if data is None:
            self.data = np.zeros((self.n_rows, words), dtype=np.uint64)
        else:
            data = np.ascontiguousarray(data, dtype=np.uint64)
            if data.shape != (self.n_rows, words):
                raise ValueError("data shape does not match matrix dimensions")
            self.data = data

    @classmethod
    def from_rows(cls, rows: list[BitVec]) -> "GF2Matrix":
        if not rows:
            raise ValueError("need at least one row")
        n_cols = rows[0].length
        if any(r.length != n_cols for r in rows):
            raise ValueError("all rows must have identical length")
        m = cls(len(rows), n_cols)
        for i, r in enumerate(rows):
            m.data[i] = r.words
        return m

    def row(self, i: int) -> BitVec:
        """Copy of row i as a BitVec."""
        return BitVec(self.n_cols, self.data[i].copy())

    def get(self, r: int, c: int) -> int:
        if not (0 <= r < self.n_rows and 0 <= c < self.n_cols):
            raise IndexError("matrix index out of range")
        return int(self.data[r, c // WORD_BITS] >> np.uint64(c % WORD_BITS)) & 1

    def set(self, r: int, c: int, value: int = 1) -> None:
        if not (0 <= r < self.n_rows and 0 <= c < self.n_cols):
            raise IndexError("matrix index out of range")
        w, b = divmod(c, WORD_BITS)
        if value & 1:
            self.data[r, w] |= np.uint64(1) << np.uint64(b)
        else:
            self.data[r, w] &= ~(np.uint64(1) << np.uint64(b))

    def copy(self) -> "GF2Matrix":
        return GF2Matrix(self.n_rows, self.n_cols, self.data.copy())

    def to_array(self) -> np.ndarray:
        """Unpack to a (rows, cols) uint8 array."""
        bits = np.unpackbits(self.data.view(np.uint8), axis=1, bitorder="little")
        return bits[:, : self.n_cols]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GF2Matrix)
            and self.n_rows == other.n_rows
            and self.n_cols == other.n_cols
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self) -> int:
        return hash((self.n_rows, self.n_cols, self.data.tobytes()))


def rank(matrix: GF2Matrix) -> int:
    """GF(2) rank via Gaussian elimination on a scratch copy."""
    work = matrix.data.copy()
    n_rows, n_cols = matrix.n_rows, matrix.n_cols
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        w, b = divmod(c, WORD_BITS)
        colbits = (work[r:, w] >> np.uint64(b)) & np.uint64(1)
        hits = np.nonzero(colbits)[0]
        if hits.size == 0:
            continue
        pivot = r + int(hits[0])
        if pivot != r:
            work[[r, pivot]] = work[[pivot, r]]
        # after the swap the rows still carrying the column are r + hits[1:]
        elim = r + hits[1:]
        if elim.size:
            work[elim] ^= work[r]
        r += 1
    return r
