from __future__ import annotations

import unittest

import numpy as np
from scipy import integrate

from plugins.mixtures.models import (
    GaussianComponent,
    GaussianMixture,
    cholesky_factor,
    eval_density,
    log_density,
    mahalanobis,
    mixture_from_points,
    product_integral,
)


class DensityTests(unittest.TestCase):
    def test_known_values(self) -> None:
        self.assertAlmostEqual(eval_density([0.0], [0.0], [[1.0]]), 0.3989422804, places=10)
        self.assertAlmostEqual(eval_density([0.0, 0.0], [0.0, 0.0], np.eye(2)), 0.1591549431, places=10)
        self.assertAlmostEqual(eval_density([1.0], [0.0], [[1.0]]), 0.2419707245, places=10)

    def test_log_density_matches_density(self) -> None:
        P = np.array([[2.0, 0.3], [0.3, 0.5]])
        x, m = np.array([0.4, -1.0]), np.array([0.1, 0.2])
        self.assertAlmostEqual(np.exp(log_density(x, m, P)), eval_density(x, m, P), places=14)

    def test_symmetric_in_x_and_mean(self) -> None:
        P = np.array([[1.5, -0.2], [-0.2, 0.7]])
        a, b = np.array([0.3, 1.1]), np.array([-0.8, 0.25])
        self.assertEqual(eval_density(a, b, P), eval_density(b, a, P))

    def test_integrates_to_one(self) -> None:
        one_d, _ = integrate.quad(lambda x: eval_density([x], [0.5], [[0.7]]), -15.0, 15.0)
        self.assertAlmostEqual(one_d, 1.0, delta=1e-6)

        P = np.array([[1.0, 0.3], [0.3, 0.5]])
        two_d, _ = integrate.dblquad(
            lambda y, x: eval_density([x, y], [0.0, 0.0], P), -8.0, 8.0, -8.0, 8.0, epsabs=1e-9
        )
        self.assertAlmostEqual(two_d, 1.0, delta=1e-6)

    def test_non_spd_covariance_is_named(self) -> None:
        with self.assertRaisesRegex(ValueError, "P"):
            eval_density([0.0, 0.0], [0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
        with self.assertRaisesRegex(ValueError, "symmetric"):
            cholesky_factor([[1.0, 0.1], [0.0, 1.0]], "Q")


class ProductIntegralTests(unittest.TestCase):
    def test_known_values(self) -> None:
        unit = GaussianComponent(1.0, [0.0], [[1.0]])
        self.assertAlmostEqual(product_integral(unit, unit), 0.2820947918, places=10)
        two = GaussianComponent(2.0, [0.0], [[1.0]])
        three = GaussianComponent(3.0, [0.0], [[1.0]])
        self.assertAlmostEqual(product_integral(two, three), 1.6925687506, places=10)

    def test_matches_quadrature_in_one_dimension(self) -> None:
        c1 = GaussianComponent(1.0, [0.0], [[1.0]])
        c2 = GaussianComponent(1.0, [2.0], [[1.0]])
        expected, _ = integrate.quad(
            lambda x: eval_density([x], [0.0], [[1.0]]) * eval_density([x], [2.0], [[1.0]]),
            -10.0,
            12.0,
            epsabs=1e-13,
        )
        self.assertAlmostEqual(product_integral(c1, c2), expected, delta=1e-8)

    def test_matches_quadrature_on_random_pairs(self) -> None:
        rng = np.random.default_rng(3)
        for _ in range(3):
            w1, w2 = rng.uniform(0.5, 2.0, size=2)
            m1, m2 = rng.uniform(-1.0, 1.0, size=2)
            v1, v2 = rng.uniform(0.3, 1.5, size=2)
            c1 = GaussianComponent(w1, [m1], [[v1]])
            c2 = GaussianComponent(w2, [m2], [[v2]])
            expected, _ = integrate.quad(
                lambda x: w1 * w2 * eval_density([x], [m1], [[v1]]) * eval_density([x], [m2], [[v2]]),
                -12.0,
                12.0,
                epsabs=1e-13,
            )
            self.assertAlmostEqual(product_integral(c1, c2), expected, delta=1e-8)

        P1 = np.array([[0.8, 0.2], [0.2, 0.6]])
        P2 = np.array([[0.5, -0.1], [-0.1, 0.9]])
        c1 = GaussianComponent(1.0, [0.2, -0.1], P1)
        c2 = GaussianComponent(1.0, [-0.3, 0.4], P2)
        expected, _ = integrate.dblquad(
            lambda y, x: eval_density([x, y], c1.mean, P1) * eval_density([x, y], c2.mean, P2),
            -7.0,
            7.0,
            -7.0,
            7.0,
            epsabs=1e-11,
        )
        self.assertAlmostEqual(product_integral(c1, c2), expected, delta=1e-8)

    def test_symmetric_exactly(self) -> None:
        c1 = GaussianComponent(0.7, [0.2, 1.0], [[1.0, 0.1], [0.1, 0.4]])
        c2 = GaussianComponent(1.9, [-0.5, 0.0], [[0.6, 0.0], [0.0, 0.6]])
        self.assertEqual(product_integral(c1, c2), product_integral(c2, c1))

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(ValueError):
            product_integral(GaussianComponent(1.0, [0.0], [[1.0]]), GaussianComponent(1.0, [0.0, 0.0], np.eye(2)))


class MahalanobisTests(unittest.TestCase):
    def test_known_values(self) -> None:
        self.assertEqual(mahalanobis([1.0, 2.0], [1.0, 2.0], np.eye(2)), 0.0)
        self.assertAlmostEqual(mahalanobis([3.0, 4.0], [0.0, 0.0], np.eye(2)), 5.0, places=12)
        self.assertAlmostEqual(mahalanobis([3.0], [1.0], [[4.0]]), 1.0, places=12)

    def test_positive_away_from_mean(self) -> None:
        self.assertGreater(mahalanobis([0.0, 1e-6], [0.0, 0.0], np.eye(2)), 0.0)


class MixtureTypeTests(unittest.TestCase):
    def test_component_validation(self) -> None:
        with self.assertRaises(ValueError):
            GaussianComponent(-1.0, [0.0], [[1.0]])
        with self.assertRaises(ValueError):
            GaussianComponent(1.0, [0.0, 0.0], [[1.0]])
        with self.assertRaises(ValueError):
            GaussianComponent(1.0, [np.nan], [[1.0]])

    def test_components_are_immutable(self) -> None:
        component = GaussianComponent(1.0, [0.0, 1.0], np.eye(2))
        with self.assertRaises(ValueError):
            component.mean[0] = 5.0

    def test_empty_mixture_keeps_dimension(self) -> None:
        empty = GaussianMixture((), dim=4)
        self.assertEqual(len(empty), 0)
        self.assertEqual(empty.means.shape, (0, 4))
        self.assertEqual(empty.total_weight, 0.0)
        with self.assertRaises(ValueError):
            empty.require_nonempty()
        with self.assertRaises(ValueError):
            GaussianMixture(())

    def test_mixed_dimensions_are_rejected(self) -> None:
        with self.assertRaises(ValueError):
            GaussianMixture((GaussianComponent(1.0, [0.0], [[1.0]]), GaussianComponent(1.0, [0.0, 0.0], np.eye(2))))

    def test_array_round_trip_and_helpers(self) -> None:
        mix = GaussianMixture.from_arrays([1.0, 2.0], [[0.0, 0.0], [1.0, 1.0]], [np.eye(2), 2 * np.eye(2)])
        self.assertEqual(mix.dim, 2)
        self.assertAlmostEqual(mix.total_weight, 3.0)
        np.testing.assert_array_equal(mix.scaled(2.0).weights, [2.0, 4.0])
        moved = mix.with_means([[5.0, 5.0], [6.0, 6.0]])
        np.testing.assert_array_equal(moved.means, [[5.0, 5.0], [6.0, 6.0]])
        np.testing.assert_array_equal(moved.covs, mix.covs)
        self.assertEqual(len(mix.concat(moved)), 4)
        np.testing.assert_array_equal(mix.permuted([1, 0]).weights, [2.0, 1.0])

    def test_density_sums_weighted_terms(self) -> None:
        mix = mixture_from_points([[0.0], [2.0]], [[1.0]], weight=2.0)
        expected = 2.0 * eval_density([1.0], [0.0], [[1.0]]) + 2.0 * eval_density([1.0], [2.0], [[1.0]])
        self.assertAlmostEqual(mix.density([1.0]), expected, places=14)


if __name__ == "__main__":
    unittest.main()
