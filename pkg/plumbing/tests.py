from dataclasses import replace

import numpy as np
from django.test import SimpleTestCase

from penner.exceptions import PlumbingError

from .catalog import random_penner_graph, running_example, two_positive_one_negative, two_sphere
from .models import FixedSurfaceGraph, Gluing, PlumbingGraph, PlumbingPoint, Sign, Sphere
from .serializers import graph_from_document, graph_to_document, validate_document
from .services import fixed_surface, incidence_matrix, isomorphic, validate


class ValidateTests(SimpleTestCase):
    def test_two_point_torus_is_valid(self):
        graph = two_sphere(points=2, n=1, gluings=[Gluing.F, Gluing.F])
        self.assertTrue(validate(graph).is_valid)

    def test_running_example_is_valid(self):
        self.assertTrue(validate(running_example()).is_valid)

    def test_single_sphere_without_points_is_degenerate(self):
        graph = PlumbingGraph(n=1, spheres=(Sphere("0", Sign.POSITIVE),), points=())
        report = validate(graph)
        self.assertFalse(report.is_valid)
        self.assertIn("degenerate", report.codes)

    def test_two_positive_spheres_clash(self):
        graph = PlumbingGraph(
            n=1,
            spheres=(Sphere("0", Sign.POSITIVE), Sphere("1", Sign.POSITIVE)),
            points=(PlumbingPoint("p", "0", "1"),),
        )
        self.assertIn("sign_clash", validate(graph).codes)

    def test_disconnected_graph(self):
        graph = PlumbingGraph(
            n=2,
            spheres=(
                Sphere("0", Sign.POSITIVE), Sphere("1", Sign.NEGATIVE),
                Sphere("2", Sign.POSITIVE), Sphere("3", Sign.NEGATIVE),
            ),
            points=(PlumbingPoint("p", "0", "1"), PlumbingPoint("q", "2", "3")),
        )
        self.assertEqual(validate(graph).codes, {"disconnected"})

    def test_duplicate_point_id(self):
        graph = running_example()
        graph = replace(graph, points=(graph.points[0], replace(graph.points[1], id="p")))
        self.assertIn("duplicate_point", validate(graph).codes)

    def test_unknown_sphere_reference(self):
        graph = running_example()
        graph = replace(graph, points=graph.points + (PlumbingPoint("r", "0", "9", pos_a=2),))
        self.assertIn("unknown_sphere", validate(graph).codes)

    def test_generated_graphs_pass_and_single_faults_fail(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            graph = random_penner_graph(rng, positives=2, negatives=3, extra_points=2)
            self.assertTrue(validate(graph).is_valid, graph)

            clash = replace(graph.points[0], b=graph.points[0].a)
            mutated = replace(graph, points=(clash,) + graph.points[1:])
            self.assertFalse(validate(mutated).is_valid)

            duplicated = replace(graph, spheres=graph.spheres + (graph.spheres[0],))
            self.assertIn("duplicate_sphere", validate(duplicated).codes)

            isolated = replace(graph, spheres=graph.spheres + (Sphere("lonely", Sign.NEGATIVE),))
            self.assertIn("disconnected", validate(isolated).codes)


class FixedSurfaceTests(SimpleTestCase):
    def test_two_sphere_reduces_to_circles(self):
        surface = fixed_surface(two_sphere(points=1, n=2))
        self.assertIsInstance(surface, FixedSurfaceGraph)
        self.assertEqual(surface.n, 1)
        self.assertEqual(surface.graph.point_ids, ["p"])

    def test_idempotent(self):
        once = fixed_surface(running_example(n=3))
        self.assertEqual(fixed_surface(once), once)
        self.assertEqual(fixed_surface(once.graph), once)

    def test_dimension_one_is_unchanged(self):
        graph = two_sphere(points=2, n=1)
        self.assertEqual(fixed_surface(graph).graph, graph)

    def test_structure_preserved(self):
        graph = running_example(n=3)
        surface = fixed_surface(graph)
        self.assertEqual(surface.graph.point_ids, ["p", "q"])
        self.assertTrue(isomorphic(graph, surface.graph))
        self.assertFalse(isomorphic(graph, surface.graph, compare_dimension=True))

    def test_invalid_graph_rejected(self):
        graph = PlumbingGraph(n=2, spheres=(Sphere("0", Sign.POSITIVE),), points=())
        with self.assertRaises(PlumbingError):
            fixed_surface(graph)


class IncidenceMatrixTests(SimpleTestCase):
    def test_single_point(self):
        np.testing.assert_array_equal(incidence_matrix(two_sphere(1)), [[0, 1], [1, 0]])

    def test_two_points(self):
        np.testing.assert_array_equal(incidence_matrix(two_sphere(2)), [[0, 2], [2, 0]])

    def test_running_example_row(self):
        matrix = incidence_matrix(running_example())
        np.testing.assert_array_equal(matrix[0], [0, 1, 1])
        np.testing.assert_array_equal(matrix, matrix.T)

    def test_sign_blocks_are_zero(self):
        matrix = incidence_matrix(two_positive_one_negative())
        self.assertEqual(matrix[0, 1], 0)
        self.assertEqual(matrix[2, 2], 0)


class IsomorphismTests(SimpleTestCase):
    def test_relabelled_graph_is_isomorphic(self):
        graph = running_example()
        relabelled = PlumbingGraph(
            n=2,
            spheres=(Sphere("b", Sign.NEGATIVE), Sphere("a", Sign.POSITIVE), Sphere("c", Sign.NEGATIVE)),
            points=(PlumbingPoint("x", "a", "c"), PlumbingPoint("y", "b", "a")),
        )
        self.assertTrue(isomorphic(graph, relabelled))

    def test_sign_swap_is_not_isomorphic(self):
        self.assertFalse(isomorphic(running_example(), two_positive_one_negative()))


class DocumentTests(SimpleTestCase):
    def test_document_round_trip(self):
        graph = running_example()
        document = graph_to_document(graph)
        validate_document(document)
        self.assertEqual(graph_from_document(document), graph)

    def test_positions_default_to_input_order(self):
        document = {
            "n": 1,
            "spheres": [{"id": "0", "sign": "positive"}, {"id": "1", "sign": "negative"}],
            "points": [{"id": "p", "a": "0", "b": "1"}, {"id": "q", "a": "0", "b": "1"}],
        }
        graph = graph_from_document(document)
        self.assertEqual([p.pos_a for p in graph.points], [0, 1])
        self.assertEqual(graph.points[0].gluing, Gluing.F)

    def test_bad_sign_rejected(self):
        document = {"n": 1, "spheres": [{"id": "0", "sign": "up"}], "points": []}
        with self.assertRaises(PlumbingError):
            graph_from_document(document)
        with self.assertRaises(PlumbingError):
            validate_document(document)
