import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

import oracles
from dirhyper.cube_fn import (
    BiasedMeasure,
    CubeFunction,
    Spectrum,
    biased_fourier,
    biased_fourier_array,
    check_bias,
    check_dim,
    chi,
    expectation,
    hamming_weights,
    inverse_fourier,
    inverse_fourier_array,
    lower_half_mask,
    measure_weight,
    measure_weights,
    norm,
    upper_half_mask,
)
from dirhyper.errors import CapacityError, InvalidParameterError

biases = st.floats(0.02, 0.98)
dims = st.integers(0, 7)


def random_f(rng, d):
    return CubeFunction(d, rng.uniform(-1, 1, size=1 << d))


class TestMeasure:
    @pytest.mark.parametrize("x", range(8))
    def test_uniform(self, x):
        assert measure_weight(0.5, x, 3) == pytest.approx(0.125)

    def test_single_bit(self):
        assert measure_weight(0.3, 1, 1) == pytest.approx(0.3)

    def test_product(self):
        # bit 0 set, bit 1 clear
        assert measure_weight(0.3, 0b01, 2) == pytest.approx(0.21)

    @given(p=biases, d=dims)
    def test_weights_sum_to_one(self, p, d):
        assert measure_weights(p, d).sum() == pytest.approx(1.0, abs=1e-12)

    def test_weights_match_oracle(self):
        assert_allclose(measure_weights(0.37, 5), [oracles.kappa(0.37, x, 5) for x in range(32)], rtol=1e-13)

    def test_biased_measure_object(self):
        m = BiasedMeasure(0.2)
        assert m.pbar == pytest.approx(0.2)
        assert m.weight(0b11, 2) == pytest.approx(0.04)

    @pytest.mark.parametrize("d", range(1, 13))
    def test_half_cube_measure_comparison(self, d):
        lo, hi = lower_half_mask(d), upper_half_mask(d)
        half = measure_weights(0.5, d)
        for p in (0.5, 0.6, 0.75, 0.9, 0.99):
            assert np.all(measure_weights(p, d)[lo] <= half[lo] * (1 + 1e-12))
            assert np.all(measure_weights(1 - p, d)[hi] <= half[hi] * (1 + 1e-12))


class TestValidation:
    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
    def test_bias_rejected(self, p):
        with pytest.raises(InvalidParameterError):
            check_bias(p)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            check_dim(27)

    def test_negative_dim(self):
        with pytest.raises(InvalidParameterError):
            check_dim(-1)

    def test_bad_length(self):
        with pytest.raises(InvalidParameterError):
            CubeFunction(2, np.zeros(3))
        with pytest.raises(InvalidParameterError):
            CubeFunction.from_values(np.zeros(6))

    def test_non_finite(self):
        with pytest.raises(InvalidParameterError):
            CubeFunction(1, [0.0, math.inf])

    def test_immutable_copy(self):
        src = np.zeros(4)
        f = CubeFunction(2, src)
        src[0] = 5
        assert f(0) == 0
        with pytest.raises(ValueError):
            f.values[0] = 1

    def test_norm_exponent_below_one(self):
        with pytest.raises(InvalidParameterError):
            norm(CubeFunction.constant(2), 0.5, 0.5)


class TestExpectationNorm:
    @given(c=st.floats(-5, 5), p=biases, d=dims)
    def test_constant(self, c, p, d):
        assert expectation(CubeFunction.constant(d, c), p) == pytest.approx(c, abs=1e-12)

    @pytest.mark.parametrize("d", [1, 3, 6])
    def test_marginal(self, d):
        f = CubeFunction(d, (np.arange(1 << d) & 1).astype(float))
        assert expectation(f, 0.3) == pytest.approx(0.3)

    def test_naive_sum(self, rng):
        f = random_f(rng, 3)
        assert expectation(f, 0.3) == pytest.approx(oracles.expectation(f.values, 0.3), rel=1e-13)

    @given(p=biases, j=st.floats(1, 6))
    def test_norm_of_one(self, p, j):
        assert norm(CubeFunction.constant(4), p, j) == pytest.approx(1.0)

    @pytest.mark.parametrize("j", [1.0, 1.5, 2.0, 3.7])
    def test_indicator_norm(self, rng, j):
        d = 6
        A = rng.choice(64, size=20, replace=False)
        assert norm(CubeFunction.indicator(d, A), 0.5, j) == pytest.approx((20 / 64) ** (1 / j))

    def test_norm_naive(self, rng):
        f = random_f(rng, 3)
        assert norm(f, 0.4, 1.7) == pytest.approx(oracles.norm(f.values, 0.4, 1.7), rel=1e-13)

    def test_norm_uses_absolute_value(self):
        f = CubeFunction(1, [-1.0, 1.0])
        assert norm(f, 0.5, 1.5) == pytest.approx(1.0)


class TestCharacters:
    def test_uniform_parity(self):
        assert chi(0.5, 1, 0) == pytest.approx(1.0)
        assert chi(0.5, 1, 1) == pytest.approx(-1.0)

    def test_biased_value(self):
        assert chi(0.8, 1, 0) == pytest.approx(2.0)

    def test_matches_oracle(self):
        for S in range(16):
            for x in range(16):
                assert chi(0.3, S, x) == pytest.approx(oracles.chi(0.3, S, x, 4))

    @pytest.mark.parametrize("p", [0.5, 0.2, 0.85])
    def test_orthonormal_brute_force(self, p):
        d = 4
        for S in range(16):
            for T in range(16):
                ip = sum(oracles.kappa(p, x, d) * chi(p, S, x) * chi(p, T, x) for x in range(16))
                assert ip == pytest.approx(float(S == T), abs=1e-12)


class TestFourier:
    @given(p=biases, d=dims, seed=st.integers(0, 2**32 - 1))
    def test_empty_coefficient_is_mean(self, p, d, seed):
        f = random_f(np.random.default_rng(seed), d)
        assert biased_fourier(f, p).coeffs[0] == pytest.approx(expectation(f, p), abs=1e-12)

    @pytest.mark.parametrize("T", [0, 1, 5, 12, 15])
    def test_character_spectrum(self, T):
        p, d = 0.27, 4
        f = CubeFunction(d, [chi(p, T, x) for x in range(16)])
        assert_allclose(biased_fourier(f, p).coeffs, np.eye(16)[T], atol=1e-12)

    def test_naive_d8(self, rng):
        f = random_f(rng, 8)
        assert_allclose(biased_fourier(f, 0.35).coeffs, oracles.fourier(f.values, 0.35), atol=1e-12)

    @given(p=biases, d=st.integers(0, 4), seed=st.integers(0, 2**32 - 1))
    def test_naive_small(self, p, d, seed):
        f = random_f(np.random.default_rng(seed), d)
        assert_allclose(biased_fourier(f, p).coeffs, oracles.fourier(f.values, p), atol=1e-11)

    def test_zero_spectrum(self):
        assert np.all(inverse_fourier(Spectrum(3, 0.4, np.zeros(8))).values == 0)

    def test_empty_spectrum_is_one(self):
        assert_allclose(inverse_fourier(Spectrum(3, 0.4, np.eye(8)[0])).values, 1.0)

    @pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_round_trip_d10(self, rng, p):
        f = random_f(rng, 10)
        assert_allclose(inverse_fourier(biased_fourier(f, p)).values, f.values, rtol=1e-10, atol=1e-12)

    @given(p=biases, d=st.integers(0, 10), seed=st.integers(0, 2**32 - 1))
    def test_parseval(self, p, d, seed):
        f = random_f(np.random.default_rng(seed), d)
        c = biased_fourier(f, p)
        assert c.energy() == pytest.approx(norm(f, p, 2) ** 2, rel=1e-10)

    def test_batched_matches_single(self, rng):
        F = rng.uniform(size=(3, 2, 64))
        batch = biased_fourier_array(F, 0.2)
        for idx in np.ndindex(3, 2):
            assert_allclose(batch[idx], biased_fourier_array(F[idx], 0.2), rtol=0, atol=0)
        assert_allclose(inverse_fourier_array(batch, 0.2), F, atol=1e-12)

    def test_bitwise_deterministic(self, rng):
        f = random_f(rng, 9)
        assert np.array_equal(biased_fourier(f, 0.31).coeffs, biased_fourier(f, 0.31).coeffs)

    def test_level_weights(self, rng):
        f = random_f(rng, 5)
        c = biased_fourier(f, 0.4)
        lw = c.level_weights()
        assert len(lw) == 6
        assert lw.sum() == pytest.approx(c.energy())
        assert lw[0] == pytest.approx(c.coeffs[0] ** 2)


class TestHalves:
    def test_lower_half_d2(self):
        assert list(np.flatnonzero(lower_half_mask(2))) == [0, 1, 2]

    def test_lower_half_d3(self):
        assert set(np.flatnonzero(lower_half_mask(3))) == {0, 1, 2, 4}

    def test_weights(self):
        assert list(hamming_weights(3)) == [0, 1, 1, 2, 1, 2, 2, 3]
