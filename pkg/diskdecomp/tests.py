from dataclasses import replace

from django.test import SimpleTestCase

from plumbing.catalog import running_example, two_sphere
from plumbing.models import PlumbingGraph, Sign, Sphere
from twistsys.models import MINUS, PLUS, DiskChoice, Orientation

from .models import CarriedClass, Flavor, PartKind, RegularDisk
from .services import (
    check_decomposition,
    check_switch_conditions,
    decompose,
    decomposition_document,
    regular_disks,
    shadow_piece_count,
    singular_disks,
)


def choice(**signs):
    return DiskChoice.build(Orientation.STANDARD, signs)


class DecomposeTests(SimpleTestCase):
    def test_one_point(self):
        parts = decompose(choice(p=PLUS), two_sphere(1))
        self.assertEqual(len(parts), 6)
        self.assertEqual(sum(1 for p in parts if p.kind == PartKind.NECK), 1)

    def test_running_example(self):
        self.assertEqual(len(decompose(choice(p=PLUS, q=PLUS), running_example())), 11)

    def test_no_points(self):
        graph = PlumbingGraph(n=1, spheres=(Sphere("0", Sign.POSITIVE), Sphere("1", Sign.NEGATIVE)), points=())
        parts = decompose(DiskChoice.build(Orientation.STANDARD, {}), graph)
        self.assertEqual([p.kind for p in parts], [PartKind.SPHERE_COMPLEMENT] * 2)

    def test_part_multiset_invariant_under_relabelling(self):
        graph = running_example()
        relabelled = PlumbingGraph(
            n=2,
            spheres=(Sphere("x", Sign.POSITIVE), Sphere("y", Sign.NEGATIVE), Sphere("z", Sign.NEGATIVE)),
            points=(replace(graph.points[0], id="u", a="x", b="y"), replace(graph.points[1], id="v", a="x", b="z")),
        )
        first = sorted((p.kind, p.sign) for p in decompose(choice(p=PLUS, q=MINUS), graph))
        second = sorted((p.kind, p.sign) for p in decompose(choice(u=PLUS, v=MINUS), relabelled))
        self.assertEqual(first, second)


class SingularDisksTests(SimpleTestCase):
    def test_running_example_list(self):
        disks = singular_disks(choice(p=PLUS, q=PLUS), running_example())
        self.assertEqual(
            [d.id for d in disks],
            ["S+:p", "Sbar+:p", "Sbar-:p", "S+:q", "Sbar+:q", "Sbar-:q"],
        )
        self.assertEqual([d.center for d in disks[:3]], ["p", "tau(p)", "sigma^-1(p)"])
        self.assertTrue(disks[0].on_branch_locus)
        self.assertFalse(disks[1].on_branch_locus)

    def test_negative_choice_swaps_locus_disk(self):
        disks = singular_disks(choice(p=MINUS, q=PLUS), running_example())
        self.assertEqual(disks[0].id, "S-:p")
        self.assertEqual(disks[0].sphere, "1")

    def test_two_points(self):
        self.assertEqual(len(singular_disks(choice(p=PLUS, q=MINUS), two_sphere(2))), 6)


class RegularDisksTests(SimpleTestCase):
    def test_one_point_circle_pieces(self):
        pieces = regular_disks(choice(p=PLUS), two_sphere(1, n=1))
        ids = sorted(r.id for r in pieces)
        self.assertEqual(ids, ["arc:0:0", "arc:0:1", "arc:1:0", "arc:1:1", "neck:p"])
        arc = next(r for r in pieces if r.id == "arc:0:0")
        self.assertEqual(arc.adjacent_singular, ("S+:p", "Sbar+:p"))

    def test_no_points_gives_hemisphere_pair(self):
        graph = PlumbingGraph(n=1, spheres=(Sphere("0", Sign.POSITIVE), Sphere("1", Sign.NEGATIVE)), points=())
        pieces = regular_disks(DiskChoice.build(Orientation.STANDARD, {}), graph)
        self.assertEqual(len(pieces), 4)

    def test_counts_match_shadow_oracle(self):
        for graph in (running_example(n=1), running_example(n=2), two_sphere(3, n=1)):
            for dc in (choice(**{p: PLUS for p in graph.point_ids}), choice(**{p: MINUS for p in graph.point_ids})):
                self.assertEqual(len(regular_disks(dc, graph)), shadow_piece_count(dc, graph))

    def test_shadow_components(self):
        self.assertEqual(shadow_piece_count(choice(p=PLUS, q=PLUS), running_example(n=1)), 10)
        self.assertEqual(shadow_piece_count(choice(p=MINUS), two_sphere(1, n=2)), 5)
        bare = PlumbingGraph(n=1, spheres=(Sphere("0", Sign.POSITIVE), Sphere("1", Sign.NEGATIVE)), points=())
        self.assertEqual(shadow_piece_count(DiskChoice.build(Orientation.STANDARD, {}), bare), 4)

    def test_running_example_dimension_one_count(self):
        # alpha: 2 points -> 4 arcs, each beta: 1 point -> 2 arcs, plus 2 necks.
        self.assertEqual(len(regular_disks(choice(p=PLUS, q=PLUS), running_example(n=1))), 10)


class CheckDecompositionTests(SimpleTestCase):
    def test_canonical_decomposition_passes(self):
        dc, graph = choice(p=PLUS, q=PLUS), running_example()
        report = check_decomposition(dc, graph, singular_disks(dc, graph))
        self.assertTrue(report.passed, report.as_dict())

    def test_duplicate_flavor_fails_condition_two(self):
        dc, graph = choice(p=PLUS, q=PLUS), running_example()
        disks = singular_disks(dc, graph)
        report = check_decomposition(dc, graph, disks + [disks[1]])
        self.assertIn(2, report.failures)
        self.assertFalse(report.as_dict()["conditions"]["2"]["passed"])

    def test_overlapping_regular_piece_fails_condition_five(self):
        dc, graph = choice(p=PLUS, q=PLUS), running_example()
        pieces = regular_disks(dc, graph)
        pieces.append(RegularDisk("bad", ("0'", "Sbar+:p"), ()))
        report = check_decomposition(dc, graph, singular_disks(dc, graph), pieces)
        self.assertEqual(sorted(report.failures), [5])

    def test_missing_locus_disk_fails_condition_one(self):
        dc, graph = choice(p=PLUS, q=PLUS), running_example()
        disks = [d for d in singular_disks(dc, graph) if d.flavor != Flavor.S]
        self.assertIn(1, check_decomposition(dc, graph, disks).failures)


class SwitchConditionTests(SimpleTestCase):
    BALANCED = {"S+:p": 3, "S+:p#tilde": 1, "S+:p#bar": 2}

    def test_balanced_counts_pass(self):
        carried = CarriedClass(choice(p=PLUS), {**self.BALANCED, "Sbar-:p": 3})
        self.assertEqual(check_switch_conditions(carried, two_sphere(1)), [])

    def test_unbalanced_counts_fail(self):
        carried = CarriedClass(choice(p=PLUS), {"S+:p": 4, "S+:p#tilde": 1, "S+:p#bar": 2})
        self.assertEqual(len(check_switch_conditions(carried, two_sphere(1))), 1)

    def test_marker_outside_singular_disks(self):
        carried = CarriedClass(choice(p=PLUS), dict(self.BALANCED), markers=[("arc:0:0", "real_blowup")])
        self.assertEqual(len(check_switch_conditions(carried, two_sphere(1))), 1)

    def test_missing_sheet_count_is_reported(self):
        carried = CarriedClass(choice(p=PLUS), {"S+:p": 3, "S+:p#tilde": 1})
        (violation,) = check_switch_conditions(carried, two_sphere(1))
        self.assertIn("S+:p#bar", violation)

    def test_uncounted_locus_disk_is_reported(self):
        carried = CarriedClass(choice(p=PLUS, q=MINUS), {**self.BALANCED})
        violations = check_switch_conditions(carried, two_sphere(2))
        self.assertEqual(len(violations), 1)
        self.assertIn("S-:q", violations[0])


class DocumentTests(SimpleTestCase):
    def test_ids_match_decompose(self):
        dc, graph = choice(p=PLUS, q=MINUS), running_example()
        document = decomposition_document(dc, graph)
        self.assertEqual([p["id"] for p in document["parts"]], [p.id for p in decompose(dc, graph)])
        self.assertEqual(len(document["singular"]), 6)
