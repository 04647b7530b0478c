import time

from django.test import SimpleTestCase

from penner.exceptions import NotPennerError, UnknownSphereError, WordSyntaxError
from plumbing.catalog import running_example, two_positive_one_negative, two_sphere

from .models import MINUS, PLUS, DiskChoice, Factor, Orientation
from .services import (
    all_disk_choices,
    apply_F,
    apply_word,
    invariant_track,
    is_generalized_penner,
    parse_word,
    sweep_constancy,
    word_orientation,
)


class ParseWordTests(SimpleTestCase):
    def test_running_example_word(self):
        word = parse_word("t0 s1^-1 s2^-1", running_example())
        self.assertEqual(len(word), 3)
        self.assertEqual(word.factors[0], Factor("t", "0", 1))
        self.assertEqual(word.factors[2].exponent, -1)
        self.assertEqual(str(word), "t0 s1^-1 s2^-1")

    def test_empty_word(self):
        self.assertEqual(len(parse_word("", two_sphere())), 0)

    def test_unknown_sphere(self):
        with self.assertRaises(UnknownSphereError):
            parse_word("t9", two_sphere())

    def test_zero_exponent(self):
        with self.assertRaises(WordSyntaxError):
            parse_word("t0^0", two_sphere())

    def test_syntax_error(self):
        with self.assertRaises(WordSyntaxError):
            parse_word("x0", two_sphere())

    def test_letter_must_match_sphere_sign(self):
        with self.assertRaises(WordSyntaxError):
            parse_word("s0^-1", two_sphere())

    def test_exponents_expand_to_unit_factors(self):
        word = parse_word("t0^2 s1^-3", two_sphere())
        self.assertEqual(len(word.unit_factors()), 5)


class PennerTypeTests(SimpleTestCase):
    def test_running_example_word_is_penner(self):
        graph = running_example()
        self.assertTrue(is_generalized_penner(parse_word("t0 s1^-1 s2^-1", graph), graph).ok)

    def test_missing_spheres(self):
        graph = running_example()
        check = is_generalized_penner(parse_word("t0", graph), graph)
        self.assertFalse(check.ok)
        self.assertIn("1, 2", check.diagnostics[0])

    def test_positive_power_of_negative_twist(self):
        graph = two_sphere()
        self.assertFalse(is_generalized_penner(parse_word("t0 s1", graph), graph).ok)

    def test_opposite_orientation_word(self):
        graph = two_sphere()
        word = parse_word("t0^-1 s1", graph)
        self.assertEqual(word_orientation(word, graph), Orientation.OPPOSITE)
        self.assertIsNone(word_orientation(parse_word("t0 s1", graph), graph))


class ApplyFTests(SimpleTestCase):
    def test_tau_sets_alpha_points_positive(self):
        graph = running_example()
        dc = DiskChoice.build(Orientation.STANDARD, {"p": MINUS, "q": MINUS})
        out = apply_F(Factor("t", "0", 1), dc, graph)
        self.assertEqual(out.as_dict(), {"p": PLUS, "q": PLUS})

    def test_sigma_sets_beta_points_negative(self):
        graph = running_example()
        dc = DiskChoice.build(Orientation.STANDARD, {"p": PLUS, "q": PLUS})
        out = apply_F(Factor("s", "2", -1), dc, graph)
        self.assertEqual(out.as_dict(), {"p": PLUS, "q": MINUS})

    def test_already_matching_is_unchanged(self):
        graph = running_example()
        dc = DiskChoice.build(Orientation.STANDARD, {"p": PLUS, "q": PLUS})
        self.assertEqual(apply_F(Factor("t", "0", 1), dc, graph), dc)

    def test_opposite_orientation_swaps_roles(self):
        graph = running_example()
        dc = DiskChoice.build(Orientation.OPPOSITE, {"p": PLUS, "q": PLUS})
        out = apply_F(Factor("t", "0", -1), dc, graph)
        self.assertEqual(out.as_dict(), {"p": MINUS, "q": MINUS})

    def test_unknown_sphere(self):
        dc = DiskChoice.build(Orientation.STANDARD, {"p": PLUS})
        with self.assertRaises(UnknownSphereError):
            apply_F(Factor("t", "7", 1), dc, two_sphere())


class InvariantTrackTests(SimpleTestCase):
    def test_running_example(self):
        graph = running_example()
        dc = invariant_track(parse_word("t0 s1^-1 s2^-1", graph), graph)
        self.assertEqual(dc.as_dict(), {"p": PLUS, "q": PLUS})

    def test_tau_in_the_middle(self):
        graph = running_example()
        word = parse_word("s1^-1 t0 s2^-1", graph)
        dc = invariant_track(word, graph)
        self.assertEqual(dc.as_dict(), {"p": MINUS, "q": PLUS})
        self.assertEqual(sweep_constancy(word, graph), {dc})

    def test_fixed_by_F(self):
        graph = running_example()
        word = parse_word("s2^-1 t0^2 s1^-1", graph)
        dc = invariant_track(word, graph)
        self.assertEqual(apply_word(word, dc, graph), dc)

    def test_not_penner_rejected(self):
        graph = running_example()
        with self.assertRaises(NotPennerError):
            invariant_track(parse_word("t0", graph), graph)

    def test_opposite_orientation(self):
        graph = two_sphere()
        dc = invariant_track(parse_word("t0^-1 s1", graph), graph)
        self.assertEqual(dc.orientation, Orientation.OPPOSITE)
        self.assertEqual(dc.as_dict(), {"p": MINUS})


class ConstancyTests(SimpleTestCase):
    cases = [
        (two_sphere, {"points": 2}, "t0 s1^-1"),
        (two_sphere, {"points": 3}, "s1^-1 t0"),
        (running_example, {}, "t0 s1^-1 s2^-1"),
        (running_example, {}, "s1^-1 t0 s2^-1"),
        (running_example, {}, "s2^-1 s1^-1 t0^3"),
        (two_positive_one_negative, {}, "t0 s2^-1 t1"),
        (two_positive_one_negative, {}, "s2^-2 t1 t0"),
    ]

    def test_F_is_constant_on_every_track(self):
        start = time.perf_counter()
        for builder, kwargs, text in self.cases:
            graph = builder(**kwargs)
            word = parse_word(text, graph)
            images = sweep_constancy(word, graph)
            self.assertEqual(images, {invariant_track(word, graph)}, text)
        self.assertLess(time.perf_counter() - start, 1.0)

    def test_opposite_sweep_is_constant(self):
        graph = running_example()
        word = parse_word("s1 t0^-1 s2", graph)
        images = sweep_constancy(word, graph, Orientation.OPPOSITE)
        self.assertEqual(images, {invariant_track(word, graph)})

    def test_track_count(self):
        self.assertEqual(len(list(all_disk_choices(running_example()))), 4)
