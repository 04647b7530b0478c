import math

import numpy as np
import sympy
from django.test import SimpleTestCase

from penner.exceptions import SurfaceError
from plumbing.catalog import running_example, two_positive_one_negative, two_sphere
from twistsys.models import Orientation
from twistsys.services import invariant_track, parse_word

from .curves import NormalCurve, RibbonGraph, curve_after_word, growth_rate, intersection_sequence
from .services import (
    cone_coordinates,
    cone_word_matrix,
    core_weights,
    floer_dims,
    intersection_form,
    intersection_number,
    intersection_report,
    invariant_weights,
    stretch_factor,
    stretch_report,
    switch_violations,
    twist_weight_matrix,
    word_weight_matrix,
    zero_weights,
)

GOLDEN_SQUARE = (3 + math.sqrt(5)) / 2

STANDARD_WORDS = [
    (two_sphere(1), "t0 s1^-1"),
    (two_sphere(2), "t0 s1^-1"),
    (two_sphere(2), "s1^-2 t0"),
    (running_example(), "t0 s1^-1 s2^-1"),
    (running_example(), "s2^-1 t0^2 s1^-1"),
    (two_positive_one_negative(), "t0 s2^-1 t1"),
]


def tracks(graph, standard, opposite):
    return (
        invariant_track(parse_word(standard, graph), graph, Orientation.STANDARD),
        invariant_track(parse_word(opposite, graph), graph, Orientation.OPPOSITE),
    )


class CoreWeightTests(SimpleTestCase):
    def test_core_of_single_point_torus(self):
        graph = two_sphere(1)
        dc, _ = tracks(graph, "t0 s1^-1", "t0^-1 s1")
        w = core_weights("0", dc, graph)
        self.assertEqual(w["0'"], 1)
        self.assertEqual(w["1'"], 0)
        self.assertEqual(switch_violations(w, graph), [])
        self.assertEqual(list(cone_coordinates(w, graph)), [1, 0])

    def test_zero_weights(self):
        graph = running_example()
        dc, _ = tracks(graph, "t0 s1^-1 s2^-1", "t0^-1 s1 s2")
        self.assertTrue(zero_weights(dc, graph).is_zero())

    def test_unknown_core(self):
        graph = two_sphere(1)
        dc, _ = tracks(graph, "t0 s1^-1", "t0^-1 s1")
        with self.assertRaises(SurfaceError):
            core_weights("7", dc, graph)


class WeightMatrixTests(SimpleTestCase):
    def test_images_of_cores_are_carried(self):
        for graph, text in STANDARD_WORDS:
            matrix = word_weight_matrix(text, graph)
            for sid in graph.sphere_ids:
                image = matrix.apply(core_weights(sid, matrix.source, graph))
                self.assertEqual(switch_violations(image, graph), [], f"{text} on core {sid}")

    def test_invariant_track_is_preserved(self):
        graph = running_example()
        matrix = word_weight_matrix("t0 s1^-1 s2^-1", graph)
        self.assertEqual(matrix.source, matrix.target)

    def test_twist_fixes_disjoint_core(self):
        graph = running_example()
        dc, _ = tracks(graph, "t0 s1^-1 s2^-1", "t0^-1 s1 s2")
        generator = parse_word("s2^-1", graph).factors[0]
        matrix = twist_weight_matrix(generator, dc, graph)
        image = matrix.apply(core_weights("1", dc, graph))
        self.assertEqual(list(cone_coordinates(image, graph)), [0, 1, 0])

    def test_wrong_direction_twist(self):
        graph = running_example()
        dc, _ = tracks(graph, "t0 s1^-1 s2^-1", "t0^-1 s1 s2")
        generator = parse_word("s2", graph).factors[0]
        with self.assertRaises(SurfaceError) as ctx:
            twist_weight_matrix(generator, dc, graph)
        self.assertEqual(ctx.exception.code, "sign_mismatch")

    def test_weights_predict_crossings_with_cores(self):
        for graph, text in STANDARD_WORDS:
            word = parse_word(text, graph)
            matrix = word_weight_matrix(word, graph)
            omega = intersection_form(graph)
            ribbon = RibbonGraph(graph)
            for start in graph.sphere_ids:
                image = matrix.apply(core_weights(start, matrix.source, graph))
                predicted = omega * cone_coordinates(image, graph)
                curve = NormalCurve.core(ribbon, start).apply_word(word)
                for j, sid in enumerate(graph.sphere_ids):
                    self.assertEqual(
                        curve.intersection(NormalCurve.core(ribbon, sid)),
                        predicted[j],
                        f"{text}: image of {start} against {sid}",
                    )


class StretchFactorTests(SimpleTestCase):
    def test_single_point_torus(self):
        graph = two_sphere(1)
        self.assertEqual(cone_word_matrix("t0 s1^-1", graph), sympy.Matrix([[2, 1], [1, 1]]))
        self.assertAlmostEqual(stretch_factor("t0 s1^-1", graph), GOLDEN_SQUARE, delta=1e-7)

    def test_cross_checks_agree(self):
        report = stretch_report("t0 s1^-1 s2^-1", running_example())
        self.assertAlmostEqual(report.eigvals, report.stretch_factor, delta=1e-7)
        self.assertAlmostEqual(report.charpoly_root, report.stretch_factor, delta=1e-7)
        self.assertGreater(report.stretch_factor, 1)

    def test_power_squares_stretch(self):
        for graph, text in STANDARD_WORDS:
            word = parse_word(text, graph)
            lam = stretch_factor(word, graph)
            self.assertAlmostEqual(stretch_factor(word.power(2), graph), lam ** 2, delta=1e-6 * lam ** 2)

    def test_growth_of_intersections(self):
        graph = two_sphere(1)
        word = parse_word("t0 s1^-1", graph)
        self.assertEqual(intersection_sequence(word, graph, "1", "0", iterations=4), [1, 2, 5, 13])
        self.assertAlmostEqual(growth_rate(word, graph, "1", "0"), math.log(stretch_factor(word, graph)), delta=1e-3)

    def test_growth_rate_is_logarithmic(self):
        graph = two_sphere(1)
        rate = growth_rate(parse_word("t0 s1^-1", graph), graph, "1", "0")
        self.assertAlmostEqual(rate, math.log((3 + math.sqrt(5)) / 2), delta=1e-6)
        self.assertAlmostEqual(rate, 0.9624236501, delta=1e-6)

    def test_growth_on_running_example(self):
        graph = running_example()
        word = parse_word("t0 s1^-1 s2^-1", graph)
        self.assertAlmostEqual(
            growth_rate(word, graph, "1", "0", iterations=8), math.log(stretch_factor(word, graph)), delta=1e-3
        )

    def test_invariant_weights_are_an_eigenvector(self):
        graph = running_example()
        word = parse_word("t0 s1^-1 s2^-1", graph)
        w = invariant_weights(word, graph)
        matrix = word_weight_matrix(word, graph)
        column = np.array([float(v) for v in w.column()])
        image = np.array(matrix.matrix.tolist(), dtype=float) @ column
        np.testing.assert_allclose(image, stretch_factor(word, graph) * column, rtol=1e-6)


class IntersectionTests(SimpleTestCase):
    def setUp(self):
        self.graph = two_sphere(1)
        self.standard, self.opposite = tracks(self.graph, "t0 s1^-1", "t0^-1 s1")

    def test_dual_cores_meet_once(self):
        w0 = core_weights("0", self.standard, self.graph)
        w1 = core_weights("1", self.opposite, self.graph)
        report = intersection_report(w0, w1, self.graph)
        self.assertEqual(report.intersection, 1)
        self.assertEqual(report.warnings, [])

    def test_shared_core_reports_raw_count(self):
        w0 = core_weights("0", self.standard, self.graph)
        w1 = core_weights("0", self.opposite, self.graph)
        report = intersection_report(w0, w1, self.graph)
        self.assertEqual(report.intersection, 0)
        self.assertEqual(report.hamiltonian_raw, 2)
        self.assertEqual(len(report.warnings), 1)

    def test_bilinear_in_rational_scaling(self):
        m0 = word_weight_matrix("t0 s1^-1", self.graph, Orientation.STANDARD)
        m1 = word_weight_matrix("t0^-1 s1", self.graph, Orientation.OPPOSITE)
        w0 = m0.apply(core_weights("1", m0.source, self.graph))
        w1 = m1.apply(core_weights("0", m1.source, self.graph))
        base = intersection_number(w0, w1, self.graph)
        scaled = intersection_number(w0.scaled(sympy.Rational(3, 2)), w1, self.graph)
        self.assertEqual(scaled, sympy.Rational(3, 2) * base)

    def test_orientation_mismatch(self):
        w0 = core_weights("0", self.standard, self.graph)
        w1 = core_weights("1", self.opposite, self.graph)
        with self.assertRaises(SurfaceError) as ctx:
            intersection_number(w1, w0, self.graph)
        self.assertEqual(ctx.exception.code, "orientation_mismatch")


class FloerCountTests(SimpleTestCase):
    PAIRS = [
        (two_sphere(1), "t0 s1^-1", "1", "t0^-1 s1", "0"),
        (two_sphere(1), "t0^2 s1^-1", "0", "s1 t0^-1", "1"),
        (two_sphere(2), "t0 s1^-1", "1", "t0^-1 s1", "0"),
        (running_example(), "t0 s1^-1 s2^-1", "1", "t0^-1 s1 s2", "2"),
    ]

    def test_single_point_torus_count(self):
        report = floer_dims("t0 s1^-1", "1", "t0^-1 s1", "0", two_sphere(1))
        self.assertEqual(report.hf_sum, 3)
        statuses = {a["condition"]: a["status"] for a in report.assumptions}
        self.assertEqual(statuses["not_isotopic"], "heuristic_passed")

    def test_counts_match_curve_intersections(self):
        for graph, word0, core0, word1, core1 in self.PAIRS:
            report = floer_dims(word0, core0, word1, core1, graph)
            gamma = curve_after_word(parse_word(word0, graph), core0, graph)
            delta = curve_after_word(parse_word(word1, graph), core1, graph)
            self.assertEqual(report.hf_sum, gamma.intersection(delta), f"{word0} vs {word1}")

    def test_words_of_the_same_type(self):
        with self.assertRaises(SurfaceError) as ctx:
            floer_dims("t0 s1^-1", "1", "t0 s1^-1", "0", two_sphere(1))
        self.assertEqual(ctx.exception.code, "same_type")


class NormalCurveTests(SimpleTestCase):
    def setUp(self):
        self.ribbon = RibbonGraph(two_sphere(1))
        self.a = NormalCurve.core(self.ribbon, "0")
        self.b = NormalCurve.core(self.ribbon, "1")

    def test_dual_cores(self):
        self.assertEqual(self.a.intersection(self.b), 1)
        self.assertEqual(self.a.intersection(self.a), 0)

    def test_twist_along_itself(self):
        self.assertEqual(self.a.twist("0", 1), self.a)

    def test_inverse_twist_undoes_twist(self):
        self.assertEqual(self.b.twist("0", 1).twist("0", -1), self.b)

    def test_twisted_curve_meets_both_cores_once(self):
        twisted = self.b.twist("0", 1)
        self.assertEqual(len(twisted), 2)
        self.assertEqual(twisted.intersection(self.a), 1)
        self.assertEqual(twisted.intersection(self.b), 1)
