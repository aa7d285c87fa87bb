import numpy as np
import pytest

from paretonav import (
    Dominance,
    EvaluationError,
    ObjectiveSet,
    dominates,
    evaluate_jacobian,
    evaluate_losses,
    toy_problem,
    weakly_dominates,
)
from paretonav.problems import toy_eta


class TestEvaluateLosses:
    def test_toy_at_origin(self):
        toy = toy_problem(10)
        losses = evaluate_losses(toy, np.zeros(10))
        expected = 1.0 - np.exp(-1.0)
        np.testing.assert_allclose(losses, [expected, expected], rtol=1e-12)

    def test_toy_at_first_center(self):
        toy = toy_problem(10)
        losses = evaluate_losses(toy, toy_eta(10))
        np.testing.assert_allclose(losses, [0.0, 1.0 - np.exp(-4.0)], atol=1e-15)

    def test_constant_objectives(self):
        objs = ObjectiveSet(
            n=3,
            losses=(lambda t: 2.5, lambda t: -1.0),
            gradients=(lambda t: np.zeros(3), lambda t: np.zeros(3)),
        )
        np.testing.assert_array_equal(evaluate_losses(objs, np.ones(3)), [2.5, -1.0])

    def test_dimension_mismatch(self):
        toy = toy_problem(10)
        with pytest.raises(EvaluationError, match="length"):
            evaluate_losses(toy, np.zeros(7))

    def test_non_finite_loss_aborts(self):
        objs = ObjectiveSet(
            n=2,
            losses=(lambda t: float("nan"),),
            gradients=(lambda t: np.zeros(2),),
        )
        with pytest.raises(EvaluationError, match="non-finite"):
            evaluate_losses(objs, np.zeros(2))

    def test_non_finite_theta_rejected(self):
        toy = toy_problem(10)
        theta = np.zeros(10)
        theta[3] = np.inf
        with pytest.raises(EvaluationError):
            evaluate_losses(toy, theta)


class TestEvaluateJacobian:
    def test_toy_rows_opposite_at_origin(self):
        toy = toy_problem(10)
        J = evaluate_jacobian(toy, np.zeros(10))
        eta = toy_eta(10)
        np.testing.assert_allclose(J[0], -2.0 * np.exp(-1.0) * eta, rtol=1e-12)
        np.testing.assert_allclose(J[1], 2.0 * np.exp(-1.0) * eta, rtol=1e-12)
        np.testing.assert_allclose(J[0], -J[1], rtol=1e-12)

    def test_linear_objective_gradient_is_constant(self):
        a = np.array([1.0, -2.0, 0.5])
        objs = ObjectiveSet(
            n=3,
            losses=(lambda t: float(a @ t),),
            gradients=(lambda t: a.copy(),),
        )
        rng = np.random.default_rng(0)
        for _ in range(5):
            J = evaluate_jacobian(objs, rng.normal(size=3))
            np.testing.assert_array_equal(J[0], a)

    def test_gradient_vanishes_at_minimizer(self):
        toy = toy_problem(10)
        J = evaluate_jacobian(toy, toy_eta(10))
        np.testing.assert_allclose(J[0], np.zeros(10), atol=1e-15)

    def test_bad_gradient_shape(self):
        objs = ObjectiveSet(
            n=3,
            losses=(lambda t: 0.0,),
            gradients=(lambda t: np.zeros(2),),
        )
        with pytest.raises(EvaluationError, match="shape"):
            evaluate_jacobian(objs, np.zeros(3))

    def test_non_finite_gradient_aborts(self):
        objs = ObjectiveSet(
            n=2,
            losses=(lambda t: 0.0,),
            gradients=(lambda t: np.array([np.inf, 0.0]),),
        )
        with pytest.raises(EvaluationError, match="non-finite"):
            evaluate_jacobian(objs, np.zeros(2))


class TestDominates:
    def test_strict(self):
        assert dominates([1.0, 1.0], [1.0, 0.0]) is Dominance.STRICT

    def test_weak_equal(self):
        assert dominates([1.0, 1.0], [1.0, 1.0]) is Dominance.WEAK_EQUAL

    def test_incomparable(self):
        assert dominates([1.0, 0.0], [0.0, 1.0]) is Dominance.INCOMPARABLE

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dominates([1.0, 0.0], [0.0, 1.0, 2.0])

    def test_reflexive(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            a = rng.normal(size=4)
            assert dominates(a, a) is Dominance.WEAK_EQUAL

    def test_antisymmetric_up_to_equality(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            a = rng.normal(size=3)
            b = a + rng.choice([0.0, 0.5], size=3)
            if weakly_dominates(a, b) and weakly_dominates(b, a):
                np.testing.assert_array_equal(a, b)

    def test_transitive_on_weak_form(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            b = rng.normal(size=4)
            a = b + np.abs(rng.normal(size=4))  # b <= a: b dominates a
            c = b - np.abs(rng.normal(size=4))  # c <= b: c dominates b
            assert weakly_dominates(a, b)
            assert weakly_dominates(b, c)
            assert weakly_dominates(a, c)


class TestObjectiveSet:
    def test_m_property(self):
        assert toy_problem(4).m == 2

    def test_requires_paired_gradients(self):
        with pytest.raises(ValueError):
            ObjectiveSet(n=2, losses=(lambda t: 0.0,), gradients=())

    def test_requires_objectives(self):
        with pytest.raises(ValueError):
            ObjectiveSet(n=2, losses=(), gradients=())

    def test_methods_match_functions(self):
        toy = toy_problem(5)
        theta = np.linspace(-1, 1, 5)
        np.testing.assert_array_equal(
            toy.evaluate_losses(theta), evaluate_losses(toy, theta)
        )
        np.testing.assert_array_equal(
            toy.evaluate_jacobian(theta), evaluate_jacobian(toy, theta)
        )
