import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metafidelity import errors
from metafidelity.divergence import kd_loss, kl_divergence, kl_divergence_rows, softmax

from oracles import kd_loss_oracle_highprec, kl_oracle_highprec


def simplex(draw_weights):
    w = np.array(draw_weights, dtype=float)
    return w / w.sum()


class TestSoftmax:
    def test_symmetric_logits(self):
        np.testing.assert_allclose(softmax([0.0, 0.0]), [0.5, 0.5], atol=1e-15)

    def test_analytic_log2(self):
        np.testing.assert_allclose(
            softmax([math.log(2), 0.0]), [2 / 3, 1 / 3], atol=1e-15
        )

    def test_no_overflow_for_huge_logits(self):
        p = softmax([1000.0, 0.0])
        assert np.all(np.isfinite(p))
        assert p[0] >= 1 - 1e-300
        assert p[1] < 1e-300

    def test_rejects_nonpositive_temperature(self):
        with pytest.raises(errors.NonPositiveTemperature):
            softmax([1.0, 2.0], temperature=0.0)

    def test_rejects_nonfinite_logits(self):
        with pytest.raises(errors.NonFinite):
            softmax([float("nan"), 0.0])

    @given(
        st.lists(st.floats(-50, 50).map(lambda x: round(x, 3)), min_size=2, max_size=8),
        st.floats(0.1, 10.0),
    )
    def test_argmax_preserving(self, logits, temperature):
        # logits quantized to 1e-3 so float rounding cannot collapse a gap
        assert np.argmax(logits) == np.argmax(softmax(logits, temperature))

    @given(
        st.lists(st.floats(-50, 50), min_size=2, max_size=8),
        st.floats(-100, 100),
        st.floats(0.1, 10.0),
    )
    def test_shift_invariance(self, logits, shift, temperature):
        base = softmax(logits, temperature)
        shifted = softmax(np.asarray(logits) + shift, temperature)
        np.testing.assert_allclose(base, shifted, atol=1e-12)


class TestKlDivergence:
    def test_identity_is_zero(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            p = rng.dirichlet(np.ones(rng.integers(2, 6)))
            assert abs(kl_divergence(p, p)) <= 1e-12

    def test_zero_mass_convention_ln2(self):
        assert abs(kl_divergence([1.0, 0.0], [0.5, 0.5]) - math.log(2)) <= 1e-12

    def test_derived_value_against_highprec_oracle(self):
        # frozen from the mpmath oracle for p=[0.9,0.1], q=[0.5,0.5]
        expected = kl_oracle_highprec([0.9, 0.1], [0.5, 0.5])
        assert abs(expected - 0.36806420716849666) < 1e-15
        assert abs(kl_divergence([0.9, 0.1], [0.5, 0.5]) - expected) <= 1e-12

    def test_asymmetry_witness(self):
        pq = kl_divergence([0.9, 0.1], [0.5, 0.5])
        qp = kl_divergence([0.5, 0.5], [0.9, 0.1])
        assert abs(pq - qp) > 0.1

    def test_nonnegative_on_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(2000):
            k = rng.integers(2, 6)
            p = rng.dirichlet(np.ones(k))
            q = rng.dirichlet(np.ones(k))
            assert kl_divergence(p, q) >= 0.0

    def test_near_zero_iff_nearly_equal(self):
        rng = np.random.default_rng(13)
        for _ in range(500):
            k = int(rng.integers(2, 6))
            p = rng.dirichlet(np.ones(k))
            q = rng.dirichlet(np.ones(k))
            kl = kl_divergence(p, q)
            if np.max(np.abs(p - q)) > 1e-6:
                assert kl > 1e-12
            assert kl_divergence(p, p) <= 1e-12

    def test_length_mismatch(self):
        with pytest.raises(errors.LengthMismatch):
            kl_divergence([0.5, 0.5], [0.3, 0.3, 0.4])

    def test_rows_matches_scalar(self):
        rng = np.random.default_rng(17)
        P = rng.dirichlet(np.ones(4), size=10)
        Q = rng.dirichlet(np.ones(4), size=10)
        rows = kl_divergence_rows(P, Q)
        for i in range(10):
            assert rows[i] == pytest.approx(kl_divergence(P[i], Q[i]), abs=1e-15)


class TestKdLoss:
    def test_uniform_cross_entropy(self):
        assert kd_loss([[0.0, 0.0]], [[0.0, 0.0]], 1.0) == pytest.approx(
            math.log(2), abs=1e-12
        )

    def test_temperature_squared_scaling(self):
        assert kd_loss([[0.0, 0.0]], [[0.0, 0.0]], 2.0) == pytest.approx(
            4 * math.log(2), abs=1e-12
        )

    def test_derived_value_against_highprec_oracle(self):
        # frozen from the mpmath oracle for logits p=[5,0], q=[0,5], T=1
        expected = kd_loss_oracle_highprec([[5.0, 0.0]], [[0.0, 5.0]], 1.0)
        assert abs(expected - 4.973251093867694) < 1e-12
        assert kd_loss([[5.0, 0.0]], [[0.0, 5.0]], 1.0) == pytest.approx(
            expected, abs=1e-12
        )

    def test_batch_mean(self):
        single_a = kd_loss([[1.0, 2.0]], [[0.5, 0.5]], 1.5)
        single_b = kd_loss([[3.0, -1.0]], [[2.0, 2.0]], 1.5)
        both = kd_loss([[1.0, 2.0], [3.0, -1.0]], [[0.5, 0.5], [2.0, 2.0]], 1.5)
        assert both == pytest.approx((single_a + single_b) / 2, abs=1e-12)

    def test_shape_and_temperature_errors(self):
        with pytest.raises(errors.LengthMismatch):
            kd_loss([[0.0, 0.0]], [[0.0, 0.0, 0.0]], 1.0)
        with pytest.raises(errors.NonPositiveTemperature):
            kd_loss([[0.0, 0.0]], [[0.0, 0.0]], -1.0)
