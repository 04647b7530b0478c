from django.test import SimpleTestCase

from penner.exceptions import LimitsError, SpinningFallback
from plumbing.catalog import running_example, two_positive_one_negative, two_sphere
from transfer.models import Port
from transfer.services import psi_factors, psi_matrix, strand_census
from twistsys.services import parse_word

from .models import StrandClass, StrandPrefix
from .services import (
    all_scaling_prefixes,
    approximate_sequence,
    classify_strand,
    decay_certificate,
    max_extension_length,
    transition_graph,
    unreachable_nodes,
)

RUNNING_WORD = "t0 s1^-1 s2^-1"


def word_setup(graph, text):
    word = parse_word(text, graph)
    return psi_matrix(word, graph), psi_factors(word, graph)


class ClassifyStrandTests(SimpleTestCase):
    def setUp(self):
        self.graph = running_example()
        self.psi, self.factors = word_setup(self.graph, RUNNING_WORD)

    def scaling_loop(self):
        port = Port("S+:p", "tilde")
        census = strand_census(self.psi, 3)
        return next(
            s for s in census.strands[port]
            if s.source == port and not any(a.is_trivial for a in s.atoms)
        )

    def test_prefix_with_trivial_atom_bounds_a_disk(self):
        census = strand_census(self.psi, 1)
        strand = next(s for ss in census.strands.values() for s in ss if any(a.label == "h_t" for a in s.atoms))
        prefix = StrandPrefix(strand.atoms, strand.target)
        self.assertEqual(classify_strand(prefix, factors=self.factors), StrandClass.DISK_BOUNDING)

    def test_all_scaling_period_accumulates(self):
        loop = self.scaling_loop()
        self.assertEqual([a.label for a in loop.atoms if not a.identity], ["i", "h1", "g3", "f1"])
        prefix = StrandPrefix((), loop.target)
        self.assertEqual(classify_strand(prefix, loop.atoms, self.factors), StrandClass.ACCUMULATION)

    def test_empty_prefix_with_trivial_period(self):
        census = strand_census(self.psi, 1)
        trivial = next(s for ss in census.strands.values() for s in ss if any(a.is_trivial for a in s.atoms))
        self.assertEqual(
            classify_strand(StrandPrefix((), trivial.target), trivial.atoms),
            StrandClass.DISK_BOUNDING,
        )

    def test_prefix_without_period_is_undetermined(self):
        loop = self.scaling_loop()
        self.assertEqual(classify_strand(StrandPrefix(loop.atoms, loop.target)), StrandClass.UNDETERMINED)

    def test_unrealizable_prefix(self):
        loop = self.scaling_loop()
        shuffled = StrandPrefix(loop.atoms[1:] + loop.atoms[:1], loop.target)
        with self.assertRaises(LimitsError):
            classify_strand(shuffled, (), self.factors)


class ApproximateSequenceTests(SimpleTestCase):
    def check_graph(self, graph, text, max_depth=4):
        psi, factors = word_setup(graph, text)
        length = len(factors)
        bound = max_extension_length(factors)
        for depth in range(max_depth + 1):
            for prefix in all_scaling_prefixes(psi, depth):
                extension = approximate_sequence(prefix, depth, factors, graph)
                self.assertEqual(extension.atoms[:depth * length], prefix.atoms)
                self.assertTrue(extension.added[-1].is_trivial)
                self.assertLessEqual(extension.n_k, bound)
        return bound, length

    def test_running_example(self):
        bound, length = self.check_graph(running_example(), RUNNING_WORD)
        self.assertLessEqual(bound, 3 * length)

    def test_two_positive_spheres(self):
        self.check_graph(two_positive_one_negative(), "t0 s2^-1 t1", max_depth=3)

    def test_trivial_prefix_needs_no_extension(self):
        graph = running_example()
        psi, factors = word_setup(graph, RUNNING_WORD)
        census = strand_census(psi, 1)
        strand = next(s for ss in census.strands.values() for s in ss if any(a.is_trivial for a in s.atoms))
        extension = approximate_sequence(StrandPrefix(strand.atoms, strand.target), 1, factors, graph)
        self.assertEqual(extension.n_k, 0)

    def test_single_point_graph_spins(self):
        graph = two_sphere(1)
        _, factors = word_setup(graph, "t0 s1^-1")
        with self.assertRaises(SpinningFallback):
            approximate_sequence(StrandPrefix((), Port("S+:p", "tilde")), 0, factors, graph)

    def test_prefix_length_must_match_depth(self):
        graph = running_example()
        _, factors = word_setup(graph, RUNNING_WORD)
        with self.assertRaises(LimitsError):
            approximate_sequence(StrandPrefix((), Port("S+:p", "tilde")), 1, factors, graph)


class TransitionGraphTests(SimpleTestCase):
    def test_every_layered_port_reaches_a_trivial_atom(self):
        graph = running_example()
        _, factors = word_setup(graph, RUNNING_WORD)
        self.assertEqual(unreachable_nodes(factors), [])
        g = transition_graph(factors)
        self.assertTrue(g.has_edge((0, Port("Sbar+:p", "whole")), "trivial"))

    def test_single_point_graph_has_no_sink_edges(self):
        graph = two_sphere(1)
        _, factors = word_setup(graph, "t0 s1^-1")
        self.assertEqual(transition_graph(factors).in_degree("trivial"), 0)


class DecayCertificateTests(SimpleTestCase):
    def setUp(self):
        graph = running_example()
        self.psi = psi_matrix(parse_word(RUNNING_WORD, graph), graph)

    def test_default_bound(self):
        certificate = decay_certificate(self.psi, 6, limit=0)
        self.assertEqual(certificate.r_max, 0.125)
        self.assertAlmostEqual(certificate.bound, 0.125 ** 6)
        self.assertTrue(certificate.passed)
        self.assertFalse(certificate.nesting_checked)

    def test_depth_zero(self):
        certificate = decay_certificate(self.psi, 0)
        self.assertEqual(certificate.bound, 1.0)
        self.assertTrue(certificate.passed)

    def test_nesting_verified(self):
        certificate = decay_certificate(self.psi, 2)
        self.assertTrue(certificate.nesting_checked)
        self.assertEqual(certificate.nesting_problems, [])
