import numpy as np
from django.test import SimpleTestCase, override_settings

from diskdecomp.services import check_switch_conditions
from penner.exceptions import DomainMismatchError, TransferError
from plumbing.catalog import running_example, two_sphere
from plumbing.serializers import graph_to_document
from twistsys.models import MINUS, PLUS, DiskChoice, Factor, Orientation
from twistsys.services import invariant_track, parse_word

from .models import Port
from .semirings import Counting, MaxTimes, step
from .services import (
    carried_class_from_census,
    center_distance,
    compose,
    counting_matrix,
    geometry_check,
    identity_matrix,
    psi_factors,
    psi_matrix,
    recurrent_classes,
    strand_census,
    twist_matrix,
    verify_nesting,
)
from .tasks import run_strand_census

RUNNING_WORD = "t0 s1^-1 s2^-1"


def choice(**signs):
    return DiskChoice.build(Orientation.STANDARD, signs)


def entry_codes(matrix):
    return {key: sorted(c.code for c in chains) for key, chains in matrix.entries.items()}


class SemiringTests(SimpleTestCase):
    def test_step_counts_and_radii(self):
        a, b = Port("x", "whole"), Port("y", "whole")
        counts = step({a: [(a, Counting(1)), (b, Counting(1))], b: [(a, Counting(2))]},
                      {a: Counting(1), b: Counting(1)}, Counting)
        self.assertEqual(counts, {a: Counting(2), b: Counting(2)})
        radii = step({a: [(a, MaxTimes(0.5)), (b, MaxTimes(0.25))]}, {a: MaxTimes(1), b: MaxTimes(1)}, MaxTimes)
        self.assertEqual(radii[a], MaxTimes(0.5))


class TwistMatrixTests(SimpleTestCase):
    def setUp(self):
        self.graph = running_example()

    def test_sigma_on_single_point_sphere(self):
        m = twist_matrix(Factor("s", "2", -1), choice(p=PLUS, q=PLUS), self.graph)
        self.assertEqual(m.target.as_dict(), {"p": PLUS, "q": MINUS})
        self.assertEqual(m.labels("Sbar-:q", "S+:q"), ["f1", "f2", "f3"])
        self.assertEqual(m.labels("S-:q", "Sbar-:q"), ["g3"])
        self.assertEqual(m.labels("S-:q", "S+:q"), ["g1", "g2"])
        self.assertEqual(m.labels("S+:p", "S+:p"), ["id", "id"])
        self.assertEqual(m.labels("Sbar+:q", "Sbar+:q"), ["id"])

    def test_tau_on_two_point_sphere(self):
        m = twist_matrix(Factor("t", "0", 1), choice(p=MINUS, q=MINUS), self.graph)
        self.assertEqual(m.row_ids[:3], ["S+:p", "Sbar+:p", "Sbar-:p"])
        self.assertEqual(m.col_ids[:3], ["S-:p", "Sbar+:p", "Sbar-:p"])
        self.assertEqual(m.labels("S+:p", "S-:p"), [])
        self.assertEqual(m.labels("S+:p", "Sbar+:p"), ["i"])
        self.assertEqual(m.labels("S+:p", "S-:q"), ["h_t"])
        self.assertEqual(m.labels("Sbar+:p", "S-:p"), ["h1", "h2", "h3"])
        self.assertEqual(m.labels("Sbar+:p", "S-:q"), ["i_t"])

    def test_trivial_atoms_sit_on_offset_circle(self):
        m = twist_matrix(Factor("t", "0", 1), choice(p=MINUS, q=MINUS, r=MINUS), two_sphere(3))
        trivial = [c.outermost for c in m.chains() if c.outermost.is_trivial and c.target.disk == "Sbar+:p"]
        self.assertEqual(len(trivial), 2)
        self.assertAlmostEqual(np.hypot(*trivial[0].translation), 0.75)
        self.assertAlmostEqual(center_distance(trivial[0], trivial[1]), 1.5)

    def test_non_unit_factor(self):
        with self.assertRaises(TransferError) as ctx:
            twist_matrix(Factor("t", "0", 2), choice(p=PLUS, q=PLUS), self.graph)
        self.assertEqual(ctx.exception.code, "non_unit_factor")

    def test_sign_inconsistent_with_orientation(self):
        with self.assertRaises(TransferError) as ctx:
            twist_matrix(Factor("t", "0", -1), choice(p=PLUS, q=PLUS), self.graph)
        self.assertEqual(ctx.exception.code, "sign_mismatch")

    def test_opposite_orientation_uses_inverse_tau(self):
        graph = two_sphere()
        dc = DiskChoice.build(Orientation.OPPOSITE, {"p": PLUS})
        m = twist_matrix(Factor("t", "0", -1), dc, graph)
        self.assertEqual(m.target.as_dict(), {"p": MINUS})
        self.assertEqual(m.labels("Sbar-:p", "S+:p"), ["h1", "h2", "h3"])


class ComposeTests(SimpleTestCase):
    def setUp(self):
        self.graph = running_example()
        self.factors = psi_factors(parse_word(RUNNING_WORD, self.graph), self.graph)

    def test_factor_order_and_tracks(self):
        self.assertEqual([f.label.split("@")[0] for f in self.factors], ["s2^-1", "s1^-1", "t0"])
        self.assertEqual(self.factors[0].target.as_dict(), {"p": PLUS, "q": MINUS})
        self.assertEqual(self.factors[1].target.as_dict(), {"p": MINUS, "q": MINUS})
        self.assertEqual(self.factors[2].target.as_dict(), {"p": PLUS, "q": PLUS})

    def test_domain_mismatch(self):
        sigma2, sigma1, _ = self.factors
        with self.assertRaises(DomainMismatchError):
            compose(sigma2, sigma1)

    def test_identity_is_a_unit(self):
        m = self.factors[0]
        self.assertEqual(compose(identity_matrix(m.target, self.graph), m), m)
        self.assertEqual(compose(m, identity_matrix(m.source, self.graph)), m)

    def test_associative(self):
        s2, s1, t0 = self.factors
        left = compose(compose(t0, s1), s2)
        right = compose(t0, compose(s1, s2))
        self.assertEqual(entry_codes(left), entry_codes(right))

    def test_counting_is_multiplicative(self):
        s2, s1, _ = self.factors
        product = counting_matrix(compose(s1, s2)).matrix
        np.testing.assert_array_equal(product, counting_matrix(s1).matrix @ counting_matrix(s2).matrix)


class PsiMatrixTests(SimpleTestCase):
    def setUp(self):
        self.graph = running_example()
        self.word = parse_word(RUNNING_WORD, self.graph)
        self.psi = psi_matrix(self.word, self.graph)

    def test_endomorphism_of_invariant_track(self):
        self.assertTrue(self.psi.is_endo)
        self.assertEqual(self.psi.source, invariant_track(self.word, self.graph))
        self.assertEqual(self.psi.label, RUNNING_WORD)

    def test_counting_row_of_antipodal_disk(self):
        counting = counting_matrix(self.psi)
        target = Port("Sbar-:q", "whole")
        self.assertEqual(counting.value(target, Port("S+:q", "tilde")), 1)
        self.assertEqual(counting.value(target, Port("S+:q", "bar")), 2)
        self.assertEqual(int(counting.matrix[counting.rows.index(target)].sum()), 3)

    def test_every_chain_is_non_trivial(self):
        self.assertTrue(all(not c.is_identity for c in self.psi.chains()))


class StrandCensusTests(SimpleTestCase):
    def setUp(self):
        graph = running_example()
        self.psi = psi_matrix(parse_word(RUNNING_WORD, graph), graph)

    def test_depth_zero(self):
        census = strand_census(self.psi, 0)
        self.assertEqual(census.total, 8)
        self.assertEqual(census.disk_count("S+:p"), 2)

    def test_depth_one_antipodal_disk(self):
        census = strand_census(self.psi, 1)
        strands = census.disk_strands("Sbar-:q")
        self.assertEqual(len(strands), 3)
        self.assertEqual(sorted(s.atoms[-1].label for s in strands), ["f1", "f2", "f3"])
        self.assertEqual([s.id for s in strands], sorted(s.id for s in strands))

    def test_counts_match_counting_matrix_powers(self):
        counting = counting_matrix(self.psi)
        power = np.eye(len(counting.rows), dtype=np.int64)
        for depth in range(9):
            census = strand_census(self.psi, depth, limit=0)
            self.assertIsNone(census.strands)
            expected = power.sum(axis=1)
            for i, port in enumerate(counting.rows):
                self.assertEqual(census.counts[port], int(expected[i]), (depth, port))
            power = counting.matrix @ power

    def test_strands_nest(self):
        shallow = strand_census(self.psi, 2)
        deep = strand_census(self.psi, 3)
        self.assertEqual(verify_nesting(shallow, deep), [])

    def test_negative_depth(self):
        with self.assertRaises(TransferError):
            strand_census(self.psi, -1)

    def test_not_endomorphism(self):
        graph = running_example()
        m = twist_matrix(Factor("s", "2", -1), choice(p=PLUS, q=PLUS), graph)
        with self.assertRaises(TransferError):
            strand_census(m, 1)

    @override_settings(PENNER_CENSUS={"limit": 5})
    def test_limit_from_settings(self):
        self.assertIsNone(strand_census(self.psi, 1).strands)

    def test_carried_class_satisfies_switch_conditions(self):
        census = strand_census(self.psi, 2)
        carried = carried_class_from_census(census, self.psi)
        self.assertEqual(check_switch_conditions(carried, running_example()), [])
        self.assertEqual(carried.counts["Sbar-:q"], census.counts[Port("Sbar-:q", "whole")])


class GeometryCheckTests(SimpleTestCase):
    def setUp(self):
        self.graph = running_example()
        self.word = parse_word(RUNNING_WORD, self.graph)

    def test_default_radii_pass(self):
        psi = psi_matrix(self.word, self.graph)
        certificate = geometry_check(psi, strand_census(psi, 4, limit=0))
        self.assertTrue(certificate.passed, certificate.failures)
        self.assertLess(certificate.r_max, 1)
        self.assertGreater(certificate.min_gap, 0)

    def test_factor_matrices_pass(self):
        self.assertTrue(geometry_check(psi_factors(self.word, self.graph)).passed)

    def test_oversized_radii_fail(self):
        params = {"r0": 0.5, "r1": 0.3, "r2": 0.3, "trivial_scale": 0.0625, "trivial_offset": 0.75}
        certificate = geometry_check(psi_factors(self.word, self.graph, params=params))
        self.assertFalse(certificate.passed)
        self.assertTrue(any("overlap" in f for f in certificate.failures))


class RecurrentClassTests(SimpleTestCase):
    def classes_of(self, graph, word):
        psi = psi_matrix(parse_word(word, graph), graph)
        return recurrent_classes(counting_matrix(psi))

    def test_running_example_classes_are_periodic(self):
        classes = {tuple(c["ports"]): c for c in self.classes_of(running_example(), RUNNING_WORD)}
        neck = classes[("S+:p/bar", "S+:q/bar")]
        self.assertEqual(neck["period"], 2)
        self.assertFalse(neck["primitive"])
        scaling_loop = classes[("S+:p/tilde", "Sbar+:p/whole", "Sbar-:p/whole")]
        self.assertEqual(scaling_loop["period"], 3)

    def test_single_point_word_is_primitive(self):
        classes = self.classes_of(two_sphere(1), "t0 s1^-1")
        neck = next(c for c in classes if "S+:p/bar" in c["ports"])
        self.assertEqual(neck["ports"], ["S+:p/bar"])
        self.assertTrue(neck["primitive"])


class RunStrandCensusTaskTests(SimpleTestCase):
    def test_task_returns_census_document(self):
        result = run_strand_census(graph_to_document(running_example()), RUNNING_WORD, 1)
        self.assertEqual(result["census"]["total"], sum(result["census"]["counts"].values()))
        self.assertTrue(result["geometry"]["passed"])
