import numpy as np
import pytest

from paretonav import (
    SingularityError,
    as_ensemble,
    complex_cosine,
    energy_distance,
    make_criterion,
    non_uniformity,
    weighted_distance,
)
from oracles import finite_difference_gradient


def check_gradient(fn, x, atol=1e-7, rtol=1e-5):
    value, grad = fn(x)
    fd = finite_difference_gradient(lambda y: fn(y)[0], x)
    np.testing.assert_allclose(grad, fd, rtol=rtol, atol=atol)


class TestWeightedDistance:
    def test_zero_at_reference(self):
        assert weighted_distance([0.2, 0.8], [0.2, 0.8]).value == 0.0

    def test_single_offset(self):
        value = weighted_distance([0.4, 0.8], [0.2, 0.8]).value
        assert abs(value - 0.2) <= 1e-15

    def test_gradient_value(self):
        grad = weighted_distance([0.4, 0.8], [0.2, 0.8]).grad
        np.testing.assert_allclose(grad, [2.0, 0.0], atol=1e-15)

    def test_zero_iff_at_reference(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            r = rng.uniform(0.1, 1.0, size=3)
            L = r + rng.normal(scale=0.2, size=3)
            value = weighted_distance(L, r).value
            assert (value == 0.0) == bool(np.allclose(L, r, atol=0))

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            r = rng.uniform(0.1, 1.0, size=4)
            L = rng.uniform(0.05, 1.5, size=4)
            check_gradient(lambda x: weighted_distance(x, r), L)

    def test_rejects_nonpositive_reference(self):
        with pytest.raises(ValueError):
            weighted_distance([0.5, 0.5], [0.5, 0.0])


class TestComplexCosine:
    def test_value_at_reference(self):
        assert abs(complex_cosine([0.3, 0.6], [0.3, 0.6]).value - 3.0) <= 1e-15

    def test_value_at_unit_offset(self):
        value = complex_cosine([1.3, 0.6], [0.3, 0.6]).value
        assert abs(value - 4.0) <= 1e-12

    def test_gradient_stationary_at_reference(self):
        grad = complex_cosine([0.3, 0.6], [0.3, 0.6]).grad
        np.testing.assert_allclose(grad, [0.0, 0.0], atol=1e-12)

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            r = rng.uniform(-1.0, 1.0, size=2)
            L = rng.uniform(-1.0, 1.0, size=2)
            check_gradient(lambda x: complex_cosine(x, r), L)

    def test_requires_two_losses(self):
        with pytest.raises(ValueError):
            complex_cosine([0.1, 0.2, 0.3], [0.1, 0.2, 0.3])


class TestNonUniformity:
    def test_zero_on_uniform_profile(self):
        assert abs(non_uniformity([0.5, 0.5], [1.0, 1.0]).value) <= 1e-15

    def test_known_value(self):
        value = non_uniformity([0.75, 0.25], [1.0, 1.0]).value
        expected = 0.75 * np.log(1.5) + 0.25 * np.log(0.5)
        assert abs(value - expected) <= 1e-12
        assert abs(value - 0.130812) <= 1e-6

    def test_zero_when_weighted_losses_agree(self):
        assert abs(non_uniformity([0.4, 0.2], [0.5, 1.0]).value) <= 1e-15

    def test_nonnegative_and_zero_only_on_agreement(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            r = rng.uniform(0.2, 1.0, size=3)
            L = rng.uniform(0.05, 1.0, size=3)
            value = non_uniformity(L, r).value
            assert value >= 0.0
            weighted = r * L
            if np.max(np.abs(weighted - weighted[0])) <= 1e-12:
                assert value <= 1e-12

    def test_scale_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            r = rng.uniform(0.2, 1.0, size=3)
            L = rng.uniform(0.05, 1.0, size=3)
            c = float(rng.uniform(0.1, 10.0))
            base = non_uniformity(L, r).value
            scaled = non_uniformity(c * L, r).value
            assert abs(base - scaled) <= 1e-12

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            r = rng.uniform(0.2, 1.0, size=3)
            L = rng.uniform(0.1, 1.0, size=3)
            check_gradient(lambda x: non_uniformity(x, r), L)

    def test_rejects_nonpositive_weighted_loss(self):
        with pytest.raises(ValueError):
            non_uniformity([0.0, 0.5], [1.0, 1.0])


class TestEnergyDistance:
    def test_two_points(self):
        value = energy_distance([[0.0, 0.0], [1.0, 0.0]]).value
        assert abs(value - 2.0) <= 1e-15

    def test_three_points(self):
        value = energy_distance([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).value
        assert abs(value - 5.0) <= 1e-12

    def test_equilateral_gradients_sum_to_zero(self):
        pts = np.array(
            [[0.0, 0.0], [1.0, 0.0], [0.5, np.sqrt(3.0) / 2.0]]
        )
        grads = energy_distance(pts).grads
        np.testing.assert_allclose(grads.sum(axis=0), [0.0, 0.0], atol=1e-12)

    def test_translation_invariance_and_symmetry(self):
        rng = np.random.default_rng(6)
        pts = rng.normal(size=(4, 2))
        base = energy_distance(pts).value
        shifted = energy_distance(pts + np.array([3.0, -1.0])).value
        assert abs(base - shifted) <= 1e-9 * max(1.0, abs(base))
        permuted = energy_distance(pts[::-1]).value
        assert abs(base - permuted) <= 1e-12 * max(1.0, abs(base))

    def test_gradients_sum_to_zero(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            pts = rng.normal(size=(5, 3))
            grads = energy_distance(pts).grads
            np.testing.assert_allclose(grads.sum(axis=0), np.zeros(3), atol=1e-10)

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            pts = rng.normal(size=(3, 2))
            flat = pts.ravel()

            def value_of(x):
                return energy_distance(x.reshape(3, 2)).value

            fd = finite_difference_gradient(value_of, flat)
            grads = energy_distance(pts).grads.ravel()
            np.testing.assert_allclose(grads, fd, rtol=1e-5, atol=1e-6)

    def test_coincident_points_raise(self):
        with pytest.raises(SingularityError):
            energy_distance([[0.1, 0.1], [0.1, 0.1], [0.5, 0.5]])

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            energy_distance([[0.1, 0.1]])


class TestCriterionObjects:
    def test_factory_dispatch(self):
        crit = make_criterion("weighted-distance", [0.2, 0.8])
        result = crit.evaluate([0.4, 0.8])
        assert abs(result.value - 0.2) <= 1e-15

    def test_factory_rejects_unknown(self):
        with pytest.raises(ValueError):
            make_criterion("mystery", [1.0])

    def test_energy_takes_no_reference(self):
        with pytest.raises(ValueError):
            make_criterion("energy-distance", [0.5, 0.5])

    def test_single_point_needs_reference(self):
        with pytest.raises(ValueError):
            make_criterion("non-uniformity")

    def test_as_ensemble_sums_over_points(self):
        crit = make_criterion("weighted-distance", [0.5, 0.5])
        lifted = as_ensemble(crit)
        Ls = np.array([[0.6, 0.5], [0.5, 0.7]])
        value, grads = lifted.evaluate(Ls)
        expected = crit.evaluate(Ls[0]).value + crit.evaluate(Ls[1]).value
        assert abs(value - expected) <= 1e-15
        np.testing.assert_array_equal(grads[0], crit.evaluate(Ls[0]).grad)

    def test_as_ensemble_is_identity_on_ensembles(self):
        crit = make_criterion("energy-distance")
        assert as_ensemble(crit) is crit
