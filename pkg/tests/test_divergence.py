from __future__ import annotations

import unittest

import numpy as np
from scipy import integrate

from plugins.control.optimizer import finite_difference_gradient
from plugins.mixtures.divergence import (
    CostKind,
    cauchy_schwarz,
    cost_gradient,
    evaluate_cost,
    l2_distance,
    l2_quadratic,
    surface_grid,
    target_only_term,
)
from plugins.mixtures.models import GaussianComponent, GaussianMixture, mixture_from_points


def _unit_1d(mean: float, weight: float = 1.0) -> GaussianMixture:
    return GaussianMixture((GaussianComponent(weight, [mean], [[1.0]]),))


def _random_mixture(rng: np.random.Generator, count: int, dim: int = 2) -> GaussianMixture:
    components = []
    for _ in range(count):
        root = rng.normal(size=(dim, dim))
        cov = root @ root.T + 0.5 * np.eye(dim)
        components.append(GaussianComponent(rng.uniform(0.5, 1.5), rng.uniform(-1.0, 1.0, size=dim), cov))
    return GaussianMixture(tuple(components))


def _case2_geometry() -> tuple[GaussianMixture, GaussianMixture]:
    cov = np.diag([0.05, 0.05, 0.01, 0.01])
    starts = [[3, 3, 0, 0], [-3, 3, 0, 0], [-3, -3, 0, 0], [3, -3, 0, 0]]
    targets = [[1, 1, 0, 0], [-1, 1, 0, 0], [-1, -1, 0, 0], [1, -1, 0, 0]]
    return mixture_from_points(starts, cov), mixture_from_points(targets, cov)


class CostKindTests(unittest.TestCase):
    def test_parse_names(self) -> None:
        self.assertIs(CostKind.parse("cs"), CostKind.CAUCHY_SCHWARZ)
        self.assertIs(CostKind.parse("L2"), CostKind.L2)
        self.assertIs(CostKind.parse("l2-quad"), CostKind.L2_QUADRATIC)
        self.assertIs(CostKind.parse(CostKind.L2), CostKind.L2)
        with self.assertRaisesRegex(ValueError, "kl"):
            CostKind.parse("kl")


class L2DistanceTests(unittest.TestCase):
    def test_identical_mixtures_have_zero_distance(self) -> None:
        mix = _random_mixture(np.random.default_rng(0), 3)
        self.assertAlmostEqual(l2_distance(mix, mix).total, 0.0, delta=1e-12)

    def test_two_unit_components(self) -> None:
        expected = 2.0 / np.sqrt(4.0 * np.pi) * (1.0 - np.exp(-1.0))
        result = l2_distance(_unit_1d(0.0), _unit_1d(2.0))
        self.assertAlmostEqual(result.total, expected, places=12)
        self.assertAlmostEqual(result.total, 0.35663583, places=8)

        def squared_difference(x: float) -> float:
            return (_unit_1d(0.0).density([x]) - _unit_1d(2.0).density([x])) ** 2

        oracle, _ = integrate.quad(squared_difference, -10.0, 12.0, epsabs=1e-13)
        self.assertAlmostEqual(result.total, oracle, delta=1e-8)

    def test_far_apart_mixtures_have_no_overlap(self) -> None:
        result = l2_distance(_unit_1d(0.0), _unit_1d(100.0))
        self.assertLess(result.fg_term, 1e-30)
        self.assertAlmostEqual(result.total, result.ff_term + result.gg_term, places=14)

    def test_symmetric_and_nonnegative(self) -> None:
        rng = np.random.default_rng(1)
        f, g = _random_mixture(rng, 3), _random_mixture(rng, 2)
        self.assertAlmostEqual(l2_distance(f, g).total, l2_distance(g, f).total, places=12)
        self.assertGreaterEqual(l2_distance(f, g).total, -1e-12)

    def test_permutation_invariant(self) -> None:
        rng = np.random.default_rng(2)
        f, g = _random_mixture(rng, 3), _random_mixture(rng, 2)
        self.assertAlmostEqual(
            l2_distance(f, g).total, l2_distance(f.permuted([2, 0, 1]), g.permuted([1, 0])).total, places=12
        )

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(ValueError):
            l2_distance(_unit_1d(0.0), _random_mixture(np.random.default_rng(0), 1))
        with self.assertRaises(ValueError):
            l2_distance(GaussianMixture((), dim=1), _unit_1d(0.0))


class CauchySchwarzTests(unittest.TestCase):
    def test_identical_and_scaled_mixtures(self) -> None:
        mix = _random_mixture(np.random.default_rng(4), 3)
        self.assertAlmostEqual(cauchy_schwarz(mix, mix), 0.0, delta=1e-12)
        self.assertAlmostEqual(cauchy_schwarz(mix, mix.scaled(7.5)), 0.0, delta=1e-12)

    def test_two_unit_components(self) -> None:
        self.assertAlmostEqual(cauchy_schwarz(_unit_1d(0.0), _unit_1d(2.0)), 1.0, places=12)

    def test_breakdown_is_in_log_domain(self) -> None:
        result = evaluate_cost("cs", _unit_1d(0.0), _unit_1d(2.0))
        self.assertAlmostEqual(result.ff_term, 0.5 * np.log(1.0 / np.sqrt(4.0 * np.pi)), places=12)
        self.assertAlmostEqual(result.total, -result.fg_term + result.ff_term + result.gg_term, places=14)

    def test_nonnegative_on_random_mixtures(self) -> None:
        rng = np.random.default_rng(5)
        for _ in range(5):
            self.assertGreaterEqual(cauchy_schwarz(_random_mixture(rng, 3), _random_mixture(rng, 2)), -1e-12)

    def test_zero_norm_is_rejected(self) -> None:
        with self.assertRaisesRegex(ValueError, "zero norm"):
            cauchy_schwarz(_unit_1d(0.0, weight=0.0), _unit_1d(0.0))


class L2QuadraticTests(unittest.TestCase):
    def test_single_unit_pair(self) -> None:
        result = l2_quadratic(_unit_1d(0.0), _unit_1d(0.0))
        self.assertAlmostEqual(result.total, -np.log(1.0 / np.sqrt(4.0 * np.pi)), places=12)
        self.assertAlmostEqual(result.total, 1.2655121, places=7)
        self.assertAlmostEqual(result.ff_term + result.gg_term - 2.0 * result.fg_term, 0.0, delta=1e-12)

    def test_log_term_grows_without_bound(self) -> None:
        g = _unit_1d(0.0)
        previous = l2_quadratic(_unit_1d(10.0), g).total
        for offset in (100.0, 1000.0):
            current = l2_quadratic(_unit_1d(offset), g).total
            self.assertGreater(current, previous)
            previous = current
        self.assertGreater(previous, 1e5)
        plain = l2_distance(_unit_1d(1000.0), g)
        self.assertAlmostEqual(plain.total, plain.ff_term + plain.gg_term, places=14)

    def test_not_below_l2_for_broad_components(self) -> None:
        rng = np.random.default_rng(6)
        f, g = _random_mixture(rng, 2), _random_mixture(rng, 2)
        for a in f:
            for b in g:
                self.assertGreaterEqual(np.linalg.det(a.cov + b.cov), (2.0 * np.pi) ** -2)
        self.assertGreaterEqual(l2_quadratic(f, g).total, l2_distance(f, g).total)


class GradientTests(unittest.TestCase):
    def test_zero_at_symmetric_single_pair(self) -> None:
        mix = GaussianMixture((GaussianComponent(1.0, [0.5, -0.5], np.eye(2)),))
        for kind in CostKind:
            np.testing.assert_allclose(cost_gradient(kind, mix, mix), 0.0, atol=1e-10)

    def test_matches_finite_differences(self) -> None:
        rng = np.random.default_rng(7)
        for instance in range(100):
            f, g = _random_mixture(rng, 3), _random_mixture(rng, 2)
            for kind in CostKind:
                analytic = cost_gradient(kind, f, g).reshape(-1)

                def total(flat: np.ndarray, kind=kind, f=f, g=g) -> float:
                    return evaluate_cost(kind, f.with_means(flat.reshape(3, 2)), g).total

                numeric = finite_difference_gradient(total, f.means.reshape(-1), step=1e-5)
                error = np.linalg.norm(analytic - numeric)
                self.assertLessEqual(
                    error, 1e-4 * max(1.0, np.linalg.norm(numeric)), msg=f"{kind.value} instance {instance}"
                )

    def test_quadratic_term_points_away_from_target(self) -> None:
        f = GaussianMixture((GaussianComponent(1.0, [5.0, 0.0], np.eye(2)),))
        g = GaussianMixture((GaussianComponent(1.0, [0.0, 0.0], np.eye(2)),))
        grad = cost_gradient(CostKind.L2_QUADRATIC, f, g)
        self.assertGreater(grad[0, 0], 0.0)
        self.assertAlmostEqual(grad[0, 1], 0.0, places=12)


class SurfaceGridTests(unittest.TestCase):
    def test_current_position_reproduces_cost(self) -> None:
        f, g = _case2_geometry()
        for kind in CostKind:
            values = surface_grid(kind, f, g, 1, [f.means[1, 0]], [f.means[1, 1]])
            self.assertEqual(values.shape, (1, 1))
            self.assertAlmostEqual(values[0, 0], evaluate_cost(kind, f, g).total, places=12)

    def test_shape_is_rows_by_columns(self) -> None:
        f, g = _case2_geometry()
        values = surface_grid("l2", f, g, 0, np.linspace(-1, 1, 5), np.linspace(-1, 1, 3))
        self.assertEqual(values.shape, (3, 5))

    def test_l2_minimum_sits_on_a_target(self) -> None:
        f, g = _case2_geometry()
        xs = ys = np.linspace(-4.0, 4.0, 81)
        values = surface_grid(CostKind.L2, f, g, 0, xs, ys)
        row, col = np.unravel_index(np.argmin(values), values.shape)
        distances = np.linalg.norm(g.means[:, :2] - np.array([xs[col], ys[row]]), axis=1)
        self.assertLessEqual(distances.min(), 0.1 * np.sqrt(2.0) + 1e-9)

    def test_l2_quadratic_far_corner_is_higher_than_grid(self) -> None:
        f, g = _case2_geometry()
        grid = surface_grid(CostKind.L2_QUADRATIC, f, g, 0, np.linspace(-4, 4, 9), np.linspace(-4, 4, 9))
        for x, y in ((10.0, 10.0), (-10.0, 10.0), (-10.0, -10.0), (10.0, -10.0)):
            corner = surface_grid(CostKind.L2_QUADRATIC, f, g, 0, [x], [y])[0, 0]
            self.assertGreater(corner, grid.max())

    def test_cs_hills_sit_beside_other_densities(self) -> None:
        # sitting exactly on another density doubles its overlap with the targets,
        # so the crest lands one cell further from them
        f, g = _case2_geometry()
        xs = ys = np.linspace(-4.0, 4.0, 81)
        values = surface_grid(CostKind.CAUCHY_SCHWARZ, f, g, 0, xs, ys)
        for other in range(1, len(f)):
            col = int(np.argmin(np.abs(xs - f.means[other, 0])))
            row = int(np.argmin(np.abs(ys - f.means[other, 1])))
            hills = []
            for r in range(row - 1, row + 2):
                for c in range(col - 1, col + 2):
                    around = values[r - 1:r + 2, c - 1:c + 2].copy()
                    around[1, 1] = -np.inf
                    if values[r, c] > around.max():
                        hills.append((r, c))
            self.assertEqual(len(hills), 1, msg=f"density {other}")
            r, c = hills[0]
            outward = np.sign(f.means[other, :2])
            np.testing.assert_allclose([xs[c], ys[r]], f.means[other, :2] + 0.1 * outward, atol=1e-9)

    def test_invalid_requests(self) -> None:
        f, g = _case2_geometry()
        with self.assertRaisesRegex(ValueError, "probe index"):
            surface_grid("l2", f, g, 4, [0.0], [0.0])
        with self.assertRaisesRegex(ValueError, "two state coordinates"):
            surface_grid("l2", _unit_1d(0.0), _unit_1d(1.0), 0, [0.0], [0.0])


class TargetTermTests(unittest.TestCase):
    def test_target_terms_only_shift_the_total(self) -> None:
        rng = np.random.default_rng(8)
        f, g = _random_mixture(rng, 2), _random_mixture(rng, 3)
        for kind in CostKind:
            full = evaluate_cost(kind, f, g).total
            partial = evaluate_cost(kind, f, g, include_target_terms=False).total
            self.assertAlmostEqual(full - partial, target_only_term(kind, g), places=12)


if __name__ == "__main__":
    unittest.main()
