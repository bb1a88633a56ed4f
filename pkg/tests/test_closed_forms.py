import unittest
from math import comb

from config import BudgetExceededError
from closed_forms import (
    ClosedFormResult,
    Provenance,
    coordinator,
    face_count_2p,
    facet_count_2p,
    fit_from_shells,
    h_fifteen,
    h_prime,
    h_two_p,
    opposite_free_subsets,
    table_entry,
)
from cyclotomic_builder import build
from exact_core import IntPolynomial, is_palindromic
from growth_oracle import ShellCounts, bfs_shells
from hull_engine import build_face_lattice, enumerate_facets
from utils import load_fixtures


class TestClosedForms(unittest.TestCase):
    def test_h_prime(self):
        self.assertEqual(h_prime(2).to_list(), [1, 1])
        self.assertEqual(h_prime(5).to_list(), [1, 1, 1, 1, 1])
        self.assertEqual(h_prime(13).degree, 12)
        with self.assertRaises(ValueError):
            h_prime(9)

    def test_h_two_p(self):
        cases = {
            3: [1, 4, 1],
            5: [1, 6, 16, 6, 1],
            7: [1, 8, 29, 64, 29, 8, 1],
            11: [1, 12, 67, 232, 562, 1024, 562, 232, 67, 12, 1],
        }
        for p, h in cases.items():
            with self.subTest(p=p):
                self.assertEqual(h_two_p(p).to_list(), h)
        with self.assertRaises(ValueError):
            h_two_p(2)

    def test_h_two_p_shape(self):
        for p in (3, 5, 7, 11, 13):
            h = h_two_p(p)
            half = (p - 1) // 2
            with self.subTest(p=p):
                self.assertTrue(is_palindromic(h))
                self.assertEqual(h.coeffs[half], 2 ** (p - 1))
                self.assertEqual(list(h.coeffs[:half + 1]), [sum(comb(p, k) for k in range(j + 1)) for j in range(half + 1)])
                self.assertEqual(h(1), facet_count_2p(p))
        self.assertEqual(facet_count_2p(11), 2772)
        self.assertEqual(facet_count_2p(13), 12012)

    def test_h_fifteen(self):
        self.assertEqual(h_fifteen()(1), 360)

    def test_face_counts(self):
        self.assertEqual(face_count_2p(7, 3), 280)
        self.assertEqual([facet_count_2p(p) for p in (3, 5, 7)], [6, 30, 140])
        with self.assertRaises(ValueError):
            face_count_2p(7, 4)

    def test_opposite_free_subsets(self):
        self.assertEqual(opposite_free_subsets(3, 1), [(j,) for j in range(6)])
        self.assertEqual(len(opposite_free_subsets(7, 3)), face_count_2p(7, 3))
        self.assertNotIn((0, 3), opposite_free_subsets(3, 2))

    def test_opposite_free_subsets_are_the_low_faces(self):
        for p in (5, 7):
            V = build(2 * p)
            lattice = build_face_lattice(enumerate_facets(V), V)
            for k in range(1, (p - 1) // 2 + 1):
                with self.subTest(p=p, k=k):
                    self.assertEqual(lattice.faces_of_dim(k - 1), opposite_free_subsets(p, k))


class TestFitFromShells(unittest.TestCase):
    def test_fit(self):
        self.assertEqual(fit_from_shells(bfs_shells(build(6), 3), 2).to_list(), [1, 4, 1])

    def test_too_few_shells(self):
        with self.assertRaises(ValueError):
            fit_from_shells(ShellCounts(6, 1, (1, 6)), 2)

    def test_inconsistent_shells(self):
        with self.assertRaises(ValueError):
            fit_from_shells(ShellCounts(6, 3, (1, 6, 12, 19)), 2)


class TestCoordinator(unittest.TestCase):
    def test_auto_prefers_closed_forms(self):
        for m, provenance in [(7, Provenance.PRIME), (10, Provenance.TWO_P), (15, Provenance.FIFTEEN)]:
            with self.subTest(m=m):
                self.assertEqual(coordinator(m).provenance, provenance)

    def test_prime_three(self):
        self.assertEqual(coordinator(3).h.to_list(), [1, 1, 1])

    def test_factor_power(self):
        result = coordinator(20)
        self.assertEqual(result.h, IntPolynomial((1, 6, 16, 6, 1)) ** 2)
        self.assertEqual(result.h.to_list(), [1, 12, 68, 204, 330, 204, 68, 12, 1])
        self.assertEqual(result.provenance, Provenance.FACTOR_POWER)
        self.assertEqual(result.base_provenance, Provenance.TWO_P)
        self.assertEqual((result.sqrt_m, result.power), (10, 2))
        self.assertEqual(coordinator(18).h.to_list(), [1, 12, 51, 88, 51, 12, 1])
        self.assertEqual(coordinator(8).h.to_list(), [1, 4, 6, 4, 1])

    def test_pipelines_agree(self):
        for m in (6, 10, 12, 14, 15):
            expected = coordinator(m, "closed").h
            for strategy in ("triangulation", "bfs"):
                with self.subTest(m=m, strategy=strategy):
                    self.assertEqual(coordinator(m, strategy).h, expected)

    def test_base_provenance_follows_strategy(self):
        result = coordinator(12, "triangulation")
        self.assertEqual(result.base_provenance, Provenance.TRIANGULATION)
        self.assertEqual(coordinator(12, "bfs").base_provenance, Provenance.BFS_FIT)

    def test_three_odd_primes_unavailable(self):
        result = coordinator(105)
        self.assertFalse(result.available)
        self.assertEqual(result.provenance, Provenance.UNAVAILABLE)
        self.assertIn("three odd prime factors", result.note)
        self.assertIn("bfs", result.note)

    def test_explicit_strategy_propagates_budget_errors(self):
        with self.assertRaises(BudgetExceededError):
            coordinator(105, "bfs")
        self.assertFalse(coordinator(105, "closed").available)

    def test_bad_input(self):
        with self.assertRaises(ValueError):
            coordinator(1)
        with self.assertRaises(ValueError):
            coordinator(6, "guess")


class TestClosedFormResult(unittest.TestCase):
    def test_degree_must_be_phi(self):
        with self.assertRaises(ValueError):
            ClosedFormResult(6, IntPolynomial((1, 1)), Provenance.PRIME, 6, 1)
        with self.assertRaises(ValueError):
            ClosedFormResult(6, None, Provenance.PRIME, 6, 1)

    def test_round_trip(self):
        for result in (coordinator(20), coordinator(105, "closed"), coordinator(7)):
            with self.subTest(m=result.m):
                self.assertEqual(ClosedFormResult.from_dict(result.to_dict()), result)

    def test_table_entry(self):
        fixtures = load_fixtures()
        result = table_entry(30, fixtures)
        self.assertEqual(result.provenance, Provenance.TABLE)
        self.assertEqual(result.h(1), 3690)
        with self.assertRaises(ValueError):
            table_entry(33, fixtures)


if __name__ == "__main__":
    unittest.main()
