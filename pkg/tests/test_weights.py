import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarsub.construction import construct, deserialize
from polarsub.gf2 import GF2Matrix, rank
from polarsub.reliability import ChannelModel, evolve_reliabilities, order_by_reliability
from polarsub.weights import (
    LowWeightSearchConfig,
    WeightRecord,
    constraint_generator_matrix,
    exact_weight_enumerator,
    expected_subcode_spectrum,
    generator_weight_histogram,
    low_weight_search,
    null_space,
    polar_error_coefficient,
    search_low_weight_codewords,
)


def classical_spec(m, frozen, design=1.5):
    n = 1 << m
    text = f"polar-subcode-v1\nm={m} n={n} k={n - len(frozen)} t=0 q=0 seed=0 design_ebno_db={design:.6f}\n"
    for f in sorted(frozen):
        text += f"row static : {f}\n"
    return deserialize(text)


class TestErrorCoefficient:
    def test_rm13_fixture(self):
        assert polar_error_coefficient({0, 1, 2, 4}, 3) == (4, 14)

    def test_repetition(self):
        for m in (1, 2, 4, 6):
            frozen = set(range((1 << m) - 1))
            assert polar_error_coefficient(frozen, m) == (1 << m, 1)

    def test_empty_unfrozen_raises(self):
        with pytest.raises(ValueError):
            polar_error_coefficient(set(range(8)), 3)

    def test_full_code(self):
        # nothing frozen: distance 1, and the 4 unit vectors are codewords
        assert polar_error_coefficient(set(), 2) == (1, 4)

    @pytest.mark.parametrize("m", [2, 3, 4])
    @pytest.mark.parametrize("snr", [0.0, 1.5, 3.0])
    def test_matches_enumeration(self, m, snr):
        n = 1 << m
        profile = evolve_reliabilities(ChannelModel(ebno_db=snr, rate=0.5), m, n)
        order = order_by_reliability(profile, n)
        for k in range(1, n):
            frozen = order[: n - k].tolist()
            spec = classical_spec(m, frozen, design=snr)
            d_formula, w_formula = polar_error_coefficient(frozen, m)
            records = exact_weight_enumerator(spec)
            nonzero = [r for r in records if r.weight > 0]
            assert nonzero[0].weight == d_formula
            assert nonzero[0].count == w_formula


class TestExpectedSpectrum:
    def test_t_zero_identity(self):
        assert expected_subcode_spectrum(537, 20, 0) == 537.0

    def test_halving(self):
        assert expected_subcode_spectrum(53440, 512, 1) == pytest.approx(26720.0)

    def test_deep_thinning(self):
        assert round(expected_subcode_spectrum(66752, 512, 10), 1) == 65.2

    def test_close_to_power_approximation(self):
        exact = expected_subcode_spectrum(1000, 30, 5)
        assert exact == pytest.approx(1000 * 2**-5, rel=1e-6)


class TestExactEnumerator:
    def test_rm13(self):
        spec = classical_spec(3, {0, 1, 2, 4})
        assert [(r.weight, r.count) for r in exact_weight_enumerator(spec)] == [
            (0, 1),
            (4, 14),
            (8, 1),
        ]

    def test_n2_repetition(self):
        spec = classical_spec(1, {0})
        assert [(r.weight, r.count) for r in exact_weight_enumerator(spec)] == [(0, 1), (2, 1)]

    def test_total_is_2k(self):
        spec = construct(32, 12, t=4, q=6, seed=5, design_ebno_db=1.5)
        records = exact_weight_enumerator(spec)
        assert sum(r.count for r in records) == 1 << 12
        assert all(r.exact for r in records)

    def test_dimension_guard(self):
        spec = construct(64, 32, t=0, q=0, seed=0, design_ebno_db=1.5)
        with pytest.raises(ValueError):
            exact_weight_enumerator(spec)


class TestNullSpace:
    @given(st.integers(0, 5000))
    @settings(max_examples=30, deadline=None)
    def test_basis_annihilates(self, seed):
        rng = np.random.default_rng(seed)
        rows, cols = 5, 12
        arr = rng.integers(0, 2, size=(rows, cols)).astype(np.uint8)
        mat = GF2Matrix(rows, cols)
        for r, c in zip(*np.nonzero(arr)):
            mat.set(int(r), int(c))
        basis = null_space(mat)
        assert basis.shape[0] == cols - rank(mat)
        prod = (arr.astype(np.int64) @ basis.T.astype(np.int64)) % 2
        assert not prod.any()
        if basis.shape[0]:
            b = GF2Matrix(basis.shape[0], cols)
            for r, c in zip(*np.nonzero(basis)):
                b.set(int(r), int(c))
            assert rank(b) == basis.shape[0]

    def test_generator_spans_same_code(self):
        spec = construct(32, 16, t=5, q=5, seed=13, design_ebno_db=1.5)
        # null-space route and message route must produce the same codebook
        g_null = constraint_generator_matrix(spec)
        g_msg = spec.generator_matrix
        words_null = {
            w.tobytes()
            for w in (
                (((np.arange(1 << 16, dtype=np.uint32)[:, None] >> np.arange(16)) & 1)
                 .astype(np.int64) @ g_null.astype(np.int64)) % 2
            ).astype(np.uint8)
        }
        words_msg = {
            w.tobytes()
            for w in (
                (((np.arange(1 << 16, dtype=np.uint32)[:, None] >> np.arange(16)) & 1)
                 .astype(np.int64) @ g_msg.astype(np.int64)) % 2
            ).astype(np.uint8)
        }
        assert words_null == words_msg


class TestLowWeightSearch:
    def test_finds_all_rm13(self):
        spec = classical_spec(3, {0, 1, 2, 4})
        cfg = LowWeightSearchConfig(weight_threshold=4, iterations=60, seed=3)
        records = low_weight_search(spec, cfg)
        assert records == [WeightRecord(weight=4, count=14, exact=False)]

    def test_below_distance_empty(self):
        spec = classical_spec(3, {0, 1, 2, 4})
        cfg = LowWeightSearchConfig(weight_threshold=3, iterations=40, seed=3)
        assert low_weight_search(spec, cfg) == []

    def test_matches_enumerator_random_spec(self):
        spec = construct(32, 16, t=5, q=5, seed=21, design_ebno_db=1.5)
        exact = {r.weight: r.count for r in exact_weight_enumerator(spec)}
        d = min(w for w in exact if w > 0)
        thresh = d + 2
        cfg = LowWeightSearchConfig(weight_threshold=thresh, iterations=400, seed=5)
        found = {r.weight: r.count for r in low_weight_search(spec, cfg)}
        for w in range(1, thresh + 1):
            assert found.get(w, 0) == exact.get(w, 0)

    def test_found_words_are_codewords(self):
        spec = construct(64, 32, t=6, q=10, seed=2, design_ebno_db=1.5)
        cfg = LowWeightSearchConfig(weight_threshold=12, iterations=150, seed=8)
        words = search_low_weight_codewords(spec, cfg)
        from polarsub import transform

        for w in words:
            assert w.sum() <= 12
            full = np.zeros(spec.full_length, dtype=np.uint8)
            full[transform.surviving_positions(spec.m, spec.n)] = w
            u = transform.encode(full)  # involution recovers the input vector
            assert spec.check_input_vector(u)

    def test_deterministic(self):
        spec = construct(64, 32, t=6, q=10, seed=2, design_ebno_db=1.5)
        cfg = LowWeightSearchConfig(weight_threshold=12, iterations=80, seed=8)
        a = search_low_weight_codewords(spec, cfg)
        b = search_low_weight_codewords(spec, cfg)
        assert np.array_equal(a, b)

    def test_depth_one_subset(self):
        spec = construct(32, 16, t=5, q=5, seed=21, design_ebno_db=1.5)
        c1 = LowWeightSearchConfig(weight_threshold=8, iterations=100, seed=4, depth=1)
        c2 = LowWeightSearchConfig(weight_threshold=8, iterations=100, seed=4, depth=2)
        w1 = {w.tobytes() for w in search_low_weight_codewords(spec, c1)}
        w2 = {w.tobytes() for w in search_low_weight_codewords(spec, c2)}
        assert w1 <= w2

    def test_config_validation(self):
        with pytest.raises(ValueError):
            LowWeightSearchConfig(weight_threshold=4, iterations=0, seed=1)
        with pytest.raises(ValueError):
            LowWeightSearchConfig(weight_threshold=4, iterations=5, seed=1, depth=3)
