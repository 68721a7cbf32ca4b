import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarsub.gf2 import BitVec, GF2Matrix, last_set_position, rank, xor_into


def bitvec(bits):
    return BitVec.from_bits(bits)


class TestXorInto:
    def test_zero_identity(self):
        a = bitvec([0, 0, 0, 0])
        xor_into(a, bitvec([0, 0, 0, 0]))
        assert a.to_array().tolist() == [0, 0, 0, 0]

    def test_basic(self):
        a = bitvec([1, 0, 1, 0])
        xor_into(a, bitvec([0, 1, 1, 0]))
        assert a.to_array().tolist() == [1, 1, 0, 0]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            xor_into(bitvec([1, 0]), bitvec([1, 0, 0]))

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=200))
    def test_self_inverse(self, bits):
        v = bitvec(bits)
        xor_into(v, bitvec(bits))
        assert v.weight() == 0


class TestLastSetPosition:
    def test_zero_vector(self):
        assert last_set_position(bitvec([0, 0, 0, 0])) is None

    def test_single_bit(self):
        assert last_set_position(BitVec.from_indices(4, [1])) == 1

    def test_examples(self):
        assert last_set_position(bitvec([1, 0, 1, 1])) == 3

    @given(st.lists(st.integers(0, 1), min_size=1, max_size=300))
    def test_matches_definition(self, bits):
        v = bitvec(bits)
        expected = max((i for i, b in enumerate(bits) if b), default=None)
        assert last_set_position(v) == expected

    @given(
        st.integers(2, 120).flatmap(
            lambda n: st.tuples(
                st.just(n),
                st.integers(0, n - 1),
                st.lists(st.integers(0, 1), min_size=n, max_size=n),
                st.lists(st.integers(0, 1), min_size=n, max_size=n),
            )
        )
    )
    def test_xor_cancels_shared_terminus(self, args):
        n, pos, abits, bbits = args
        a = bitvec(abits)
        b = bitvec(bbits)
        a.set(pos, 1)
        b.set(pos, 1)
        for i in range(pos + 1, n):
            a.set(i, 0)
            b.set(i, 0)
        out = last_set_position(a ^ b)
        assert out is None or out < pos


def _reference_rank(arr: np.ndarray) -> int:
    """Textbook elimination over a dense 0/1 array (independent oracle)."""
    a = arr.copy() % 2
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        pivots = [i for i in range(r, rows) if a[i, c]]
        if not pivots:
            continue
        a[[r, pivots[0]]] = a[[pivots[0], r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


class TestRank:
    def test_identity(self):
        m = GF2Matrix(3, 3)
        for i in range(3):
            m.set(i, i)
        assert rank(m) == 3

    def test_duplicate_row(self):
        m = GF2Matrix(2, 2)
        m.set(0, 0)
        m.set(1, 0)
        assert rank(m) == 1

    def test_input_not_mutated(self):
        m = GF2Matrix(2, 2)
        m.set(0, 1)
        m.set(1, 0)
        before = m.data.copy()
        rank(m)
        assert np.array_equal(m.data, before)

    @given(st.integers(0, 9999))
    def test_against_oracle(self, seed):
        rng = np.random.default_rng(seed)
        arr = rng.integers(0, 2, size=(5, 8)).astype(np.uint8)
        m = GF2Matrix(5, 8)
        for r, c in zip(*np.nonzero(arr)):
            m.set(int(r), int(c))
        assert rank(m) == _reference_rank(arr)

    @given(st.integers(0, 999), st.integers(1, 12), st.integers(1, 80))
    def test_bounded(self, seed, rows, cols):
        rng = np.random.default_rng(seed)
        arr = rng.integers(0, 2, size=(rows, cols)).astype(np.uint8)
        m = GF2Matrix(rows, cols)
        for r, c in zip(*np.nonzero(arr)):
            m.set(int(r), int(c))
        got = rank(m)
        assert got <= min(rows, cols)
        assert got == _reference_rank(arr)


class TestPacking:
    def test_tail_bits_zero(self):
        v = BitVec(70)
        v.set(69)
        assert v.words[1] == np.uint64(1) << np.uint64(5)
        v.set(69, 0)
        assert v.weight() == 0

    def test_round_trip(self):
        bits = [1, 0, 1, 1, 0, 0, 1]
        assert bitvec(bits).to_array().tolist() == bits

    def test_indices(self):
        assert BitVec.from_indices(10, [9, 2, 5]).indices() == [2, 5, 9]
