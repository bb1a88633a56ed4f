import unittest

from config import Budgets, BudgetExceededError
from cyclotomic_builder import build, build_prime
from hull_engine import enumerate_facets
from transport_dual import (
    TransportVertex,
    count_spanning_trees,
    enumerate_vertices_2d,
    facet_from_vertex,
    iter_spanning_trees,
    solve_tree_flows,
    verify_duality,
)


class TestSpanningTrees(unittest.TestCase):
    def test_counts(self):
        self.assertEqual(count_spanning_trees(2, 3), 12)
        self.assertEqual(count_spanning_trees(3, 5), 2025)

    def test_iterator_matches_count(self):
        for p, q in [(2, 3), (2, 5), (3, 5)]:
            trees = list(iter_spanning_trees(p, q))
            with self.subTest(p=p, q=q):
                self.assertEqual(len(trees), count_spanning_trees(p, q))
                self.assertEqual(len(set(trees)), len(trees))
                self.assertTrue(all(len(t) == p + q - 1 for t in trees))
                self.assertEqual(trees, sorted(trees))

    def test_tree_flows(self):
        table = solve_tree_flows(2, 3, [(0, 0), (0, 1), (1, 1), (1, 2)])
        self.assertEqual(table, ((2, 1, 0), (0, 1, 2)))

    def test_non_trees(self):
        self.assertIsNone(solve_tree_flows(2, 3, [(0, 0), (0, 1)]))
        self.assertIsNone(solve_tree_flows(2, 3, [(0, 0), (0, 1), (1, 0), (1, 1)]))


class TestVertices(unittest.TestCase):
    def test_vertex_counts_match_facet_counts(self):
        for p, q, count in [(2, 3, 6), (2, 5, 30), (2, 7, 140), (3, 5, 360)]:
            with self.subTest(p=p, q=q):
                self.assertEqual(len(enumerate_vertices_2d(p, q)), count)

    def test_vertices_are_sorted_and_valid(self):
        vertices = enumerate_vertices_2d(2, 3)
        self.assertEqual(vertices, sorted(vertices, key=TransportVertex.flattened))
        self.assertIn(TransportVertex(2, 3, ((2, 1, 0), (0, 1, 2))), vertices)
        self.assertTrue(all(len(v.support) == 4 for v in vertices))

    def test_table_validation(self):
        with self.assertRaises(ValueError):
            TransportVertex(2, 3, ((3, 0, 0), (0, 1, 2)))
        with self.assertRaises(ValueError):
            TransportVertex(2, 3, ((2, 2, -1), (0, 0, 3)))

    def test_round_trip(self):
        v = enumerate_vertices_2d(2, 5)[0]
        self.assertEqual(TransportVertex.from_dict(v.to_dict()), v)

    def test_pair_validation(self):
        for p, q in [(2, 2), (2, 4), (1, 3)]:
            with self.subTest(p=p, q=q):
                with self.assertRaises(ValueError):
                    enumerate_vertices_2d(p, q)

    def test_budget(self):
        with self.assertRaises(BudgetExceededError):
            enumerate_vertices_2d(3, 5, Budgets(spanning_trees=100))


class TestDuality(unittest.TestCase):
    def test_facet_from_vertex(self):
        v = TransportVertex(2, 3, ((2, 1, 0), (0, 1, 2)))
        facet = facet_from_vertex(v, build_prime(2), build_prime(3))
        self.assertEqual(facet.incident, (2, 3))
        self.assertEqual((facet.normal.numerators, facet.normal.denominator), ((-1, 0), 1))
        self.assertIn(facet, enumerate_facets(build(6)))

    def test_mismatched_factors(self):
        v = TransportVertex(2, 3, ((2, 1, 0), (0, 1, 2)))
        with self.assertRaises(ValueError):
            facet_from_vertex(v, build_prime(3), build_prime(2))

    def test_verify_duality(self):
        for p, q in [(2, 3), (2, 5), (2, 7), (3, 5), (5, 3)]:
            with self.subTest(p=p, q=q):
                self.assertTrue(verify_duality(p, q))


if __name__ == "__main__":
    unittest.main()
