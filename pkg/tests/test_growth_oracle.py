import unittest
from math import comb

from closed_forms import fit_from_shells
from config import Budgets, BudgetExceededError
from cyclotomic_builder import build
from exact_core import IntPolynomial, IntVector, is_palindromic
from growth_oracle import (
    ShellCounts,
    bfs_shells,
    dilate_point_count,
    normality_check,
    shell_points,
    shells_match_polynomial,
    shells_negation_symmetric,
)
from hull_engine import enumerate_facets


class TestBFSShells(unittest.TestCase):
    def test_small_cases(self):
        self.assertEqual(bfs_shells(build(6), 3).counts, (1, 6, 12, 18))
        self.assertEqual(bfs_shells(build(2), 4).counts, (1, 2, 2, 2, 2))
        self.assertEqual(bfs_shells(build(15), 2).counts, (1, 15, 120))

    def test_modes_agree(self):
        for m, depth in [(6, 8), (10, 6), (12, 5)]:
            V = build(m)
            with self.subTest(m=m):
                self.assertEqual(
                    bfs_shells(V, depth, mode="packed"), bfs_shells(V, depth, mode="reference")
                )

    def test_matches_series(self):
        cases = [
            (6, 8, (1, 4, 1)),
            (10, 6, (1, 6, 16, 6, 1)),
            (12, 5, (1, 8, 18, 8, 1)),
            (15, 4, (1, 7, 28, 79, 130, 79, 28, 7, 1)),
        ]
        for m, depth, h in cases:
            V = build(m)
            with self.subTest(m=m):
                self.assertTrue(shells_match_polynomial(bfs_shells(V, depth), IntPolynomial(h), V.dim))

    def test_depth_zero(self):
        self.assertEqual(bfs_shells(build(5), 0).counts, (1,))

    def test_budget_keeps_completed_shells(self):
        for mode in ("packed", "reference"):
            with self.subTest(mode=mode):
                with self.assertRaises(BudgetExceededError) as ctx:
                    bfs_shells(build(6), 8, Budgets(bfs_points=60), mode)
                self.assertEqual(ctx.exception.budget_name, "bfs_points")
                self.assertEqual(ctx.exception.partial, ShellCounts(6, 2, (1, 6, 12)))

    def test_budget_refuses_hopeless_depth(self):
        with self.assertRaises(BudgetExceededError) as ctx:
            bfs_shells(build(105), 49, Budgets())
        self.assertIsNone(ctx.exception.partial)

    def test_bad_arguments(self):
        with self.assertRaises(ValueError):
            bfs_shells(build(6), -1)
        with self.assertRaises(ValueError):
            bfs_shells(build(6), 2, mode="dfs")


class TestShellStructure(unittest.TestCase):
    def test_finite_differences_vanish(self):
        for m in (6, 10, 12):
            V = build(m)
            r = V.dim
            shells = bfs_shells(V, r + 3)
            S = shells.counts
            with self.subTest(m=m):
                for n in range(1, shells.max_n - r + 1):
                    self.assertEqual(sum((-1) ** i * comb(r, i) * S[n + i] for i in range(r + 1)), 0)
                h = fit_from_shells(shells, r)
                self.assertTrue(shells_match_polynomial(shells, h, r))
                self.assertTrue(is_palindromic(h))

    def test_even_m_shells_are_symmetric(self):
        for m, depth in [(2, 4), (6, 5), (10, 4), (12, 3)]:
            V = build(m)
            with self.subTest(m=m):
                shells = shell_points(V, depth)
                self.assertEqual(tuple(len(s) for s in shells), bfs_shells(V, depth).counts)
                self.assertTrue(shells_negation_symmetric(shells))

    def test_odd_m_first_shell_is_not_symmetric(self):
        shells = shell_points(build(3), 2)
        self.assertEqual(shells[1], frozenset({IntVector((1, 0)), IntVector((0, 1)), IntVector((-1, -1))}))
        self.assertFalse(shells_negation_symmetric(shells))

    def test_shell_points_budget(self):
        with self.assertRaises(BudgetExceededError):
            shell_points(build(6), 8, Budgets(bfs_points=60))
        with self.assertRaises(ValueError):
            shell_points(build(6), -1)


class TestShellCounts(unittest.TestCase):
    def test_ball_sizes(self):
        self.assertEqual(ShellCounts(6, 3, (1, 6, 12, 18)).ball_sizes(), [1, 7, 19, 37])

    def test_validation(self):
        with self.assertRaises(ValueError):
            ShellCounts(6, 3, (1, 6, 12))
        with self.assertRaises(ValueError):
            ShellCounts(6, 1, (2, 6))

    def test_round_trip(self):
        shells = bfs_shells(build(10), 3)
        self.assertEqual(ShellCounts.from_dict(shells.to_dict()), shells)


class TestDilates(unittest.TestCase):
    def test_hexagon_dilates(self):
        facets = enumerate_facets(build(6))
        self.assertEqual(dilate_point_count(facets, 2, 1), 7)
        self.assertEqual(dilate_point_count(facets, 2, 2), 19)
        with self.assertRaises(ValueError):
            dilate_point_count(facets, 2, 0)

    def test_dilate_budget(self):
        facets = enumerate_facets(build(15))
        with self.assertRaises(BudgetExceededError):
            dilate_point_count(facets, 8, 1, Budgets(dilate_points=100))

    def test_normality(self):
        for m in (6, 10, 12):
            V = build(m)
            with self.subTest(m=m):
                self.assertTrue(normality_check(V, enumerate_facets(V), 3))


if __name__ == "__main__":
    unittest.main()
