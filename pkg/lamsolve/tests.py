import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from penner.exceptions import InfeasibleConstraintError, LamsolveError
from plumbing.catalog import running_example
from plumbing.serializers import graph_to_document
from transfer.services import psi_matrix, strand_census
from twistsys.services import parse_word

from .models import BoundarySection, CurveColor, TowerStrand, theta_grid
from .serializers import problem_from_document, tower_from_document
from .services import (
    collection_from_isotopy,
    homotopy_feasibility,
    integrate_theta,
    nest_disks,
    solution_collection,
    solve_potentials,
    strand_center,
    tower_from_census,
)
from .tasks import run_nested_solve

RUNNING_WORD = "t0 s1^-1 s2^-1"
SMALL_GRID = {"grid_r": 33, "grid_theta": 64, "inner_radius": 0.1, "margin": 1e-4}
THETA = theta_grid(64)


def wavy_section(amplitude=0.05):
    """Boundary of x + amplitude * r^2 cos(2 theta)."""
    return BoundarySection(
        -np.sin(THETA) - 2 * amplitude * np.sin(2 * THETA),
        np.cos(THETA) + 2 * amplitude * np.cos(2 * THETA),
    )


def loop_family(levels=20, count=64, finger=None, shift=0.0):
    """
    Loops gamma_r(theta) = (cos, sin)(theta + shift), optionally pushed
    across the dr-axis near ``finger`` (one angle or several) from r = 0.5 outwards.
    """
    radii = np.linspace(0.1, 1.0, levels)
    thetas = theta_grid(count) + shift
    centers = [] if finger is None else np.atleast_1d(finger)
    gamma = np.empty((levels, count, 2))
    for level, r in enumerate(radii):
        f = np.cos(thetas)
        h = min(max((r - 0.5) / 0.5, 0.0), 1.0)
        for center in centers:
            offset = (thetas - center + math.pi) % (2 * math.pi) - math.pi
            f = f - 2 * h * np.exp(-(offset / 0.15) ** 2)
        gamma[level, :, 0] = f
        gamma[level, :, 1] = np.sin(thetas)
    return gamma, radii


@override_settings(PENNER_LAMSOLVE=SMALL_GRID)
class SolvePotentialTests(SimpleTestCase):
    def test_integrate_theta(self):
        np.testing.assert_allclose(integrate_theta(-np.sin(THETA)), np.cos(THETA), atol=1e-12)

    def test_constant_sections_give_linear_potentials(self):
        solution = solve_potentials([BoundarySection.constant(0, 0, 64), BoundarySection.constant(1.0, 0.5, 64)])
        r = solution.radii[:, None]
        expected = r * np.cos(THETA) + 0.5 * r * np.sin(THETA)
        np.testing.assert_allclose(solution.values[1], expected, atol=1e-10)
        np.testing.assert_allclose(solution.linear[1], [1.0, 0.5], atol=1e-12)
        self.assertAlmostEqual(solution.min_gap(0, 1), math.hypot(1.0, 0.5), places=8)

    def test_center_is_normalized(self):
        solution = solve_potentials([wavy_section()])
        self.assertLess(np.max(np.abs(solution.values[0, 0])), 1e-12)

    def test_wavy_boundary_is_matched(self):
        section = wavy_section()
        solution = solve_potentials([section])
        self.assertLess(solution.boundary_error(0, section), 1e-6)
        np.testing.assert_allclose(solution.linear[0], [1.0, 0.0], atol=1e-10)
        # Ring 16 is r = 1/2; the interior is close to the harmonic extension.
        expected = 0.5 * np.cos(THETA) + 0.05 * 0.25 * np.cos(2 * THETA)
        self.assertLess(np.max(np.abs(solution.values[0, 16] - expected)), 2e-3)

    def test_resamples_boundary_data(self):
        fine = theta_grid(128)
        section = BoundarySection(-np.sin(fine), np.cos(fine))
        solution = solve_potentials([section])
        self.assertEqual(solution.values.shape, (1, 33, 64))
        np.testing.assert_allclose(solution.linear[0], [1.0, 0.0], atol=1e-9)

    def test_section_must_be_exact(self):
        with self.assertRaises(LamsolveError) as ctx:
            solve_potentials([BoundarySection(np.ones(64), np.zeros(64))])
        self.assertEqual(ctx.exception.code, "not_exact")

    def test_overlapping_boundaries(self):
        with self.assertRaises(LamsolveError) as ctx:
            solve_potentials([wavy_section(), wavy_section()])
        self.assertEqual(ctx.exception.code, "boundary_overlap")

    def test_graphs_touching_inside(self):
        bump = BoundarySection(-0.1 * np.sin(2 * THETA), 0.1 * np.cos(2 * THETA))
        with self.assertRaises(InfeasibleConstraintError) as ctx:
            solve_potentials([BoundarySection.constant(0, 0, 64), bump])
        self.assertEqual(ctx.exception.code, "touching")

    def test_inner_radius_must_leave_interior(self):
        with self.assertRaises(LamsolveError) as ctx:
            solve_potentials([wavy_section()], options={"inner_radius": 0.99})
        self.assertEqual(ctx.exception.code, "bad_option")


class CurveCollectionTests(SimpleTestCase):
    def test_round_loops(self):
        gamma, radii = loop_family()
        collection = collection_from_isotopy(gamma, radii)
        self.assertEqual(collection.problems(), [])
        self.assertEqual(len(collection.curves), 2)
        marks = {(color, sign) for _, color, sign, _ in collection.outer_marks()}
        self.assertEqual(marks, {(CurveColor.RED.value, 1), (CurveColor.BLUE.value, -1)})

    def test_finger_move_adds_an_arc(self):
        gamma, radii = loop_family(finger=0.6)
        collection = collection_from_isotopy(gamma, radii)
        self.assertEqual(collection.problems(), [])
        self.assertEqual(len(collection.through_curves()), 2)
        (arc,) = collection.outer_arcs()
        curve = collection.curves[arc]
        self.assertEqual(curve.sign, 1)
        self.assertEqual({color for *_, color in curve.endpoints}, {"red", "blue"})

    def test_finger_below_the_axis_is_negative(self):
        gamma, radii = loop_family(finger=-0.6)
        collection = collection_from_isotopy(gamma, radii)
        (arc,) = collection.outer_arcs()
        self.assertEqual(collection.curves[arc].sign, -1)

    def test_two_fingers_pair_their_own_marks(self):
        gamma, radii = loop_family(finger=(0.6, -0.6))
        collection = collection_from_isotopy(gamma, radii)
        self.assertEqual(collection.problems(), [])
        self.assertEqual(len(collection.outer_marks()), 6)
        arcs = {collection.curves[i].sign: collection.curves[i] for i in collection.outer_arcs()}
        self.assertEqual(set(arcs), {1, -1})
        for sign, center in ((1, 0.6), (-1, 2 * math.pi - 0.6)):
            ends = {color: theta for _, theta, color in arcs[sign].endpoints}
            self.assertEqual(set(ends), {"red", "blue"})
            self.assertLess(abs(ends["red"] - center), 0.3)
            self.assertLess(abs(ends["blue"] - center), 0.3)
            self.assertLess(ends["red"], ends["blue"])

    def test_loop_through_origin(self):
        gamma, radii = loop_family()
        gamma[5, :, 1] = 0.0
        with self.assertRaises(LamsolveError) as ctx:
            collection_from_isotopy(gamma, radii)
        self.assertEqual(ctx.exception.code, "origin_touched")

    def test_shape_is_checked(self):
        with self.assertRaises(LamsolveError) as ctx:
            collection_from_isotopy(np.zeros((4, 64)))
        self.assertEqual(ctx.exception.code, "bad_isotopy")


@override_settings(PENNER_LAMSOLVE=SMALL_GRID)
class ConstrainedSolveTests(SimpleTestCase):
    def setUp(self):
        self.sections = [BoundarySection.constant(0, 0, 64), wavy_section()]

    def rotated_loops(self, finger=None):
        # The boundary loop of x is (-sin, cos), the round family a quarter turn ahead.
        return loop_family(finger=finger, shift=math.pi / 2)

    def test_solution_collection(self):
        solution = solve_potentials(self.sections)
        collection = solution_collection(solution, 1, 0)
        self.assertEqual(collection.problems(), [])
        self.assertEqual(collection.outer_arcs(), [])

    def test_matching_collection_is_accepted(self):
        collection = collection_from_isotopy(*self.rotated_loops())
        solution = solve_potentials(self.sections, collection=collection)
        self.assertEqual(solution.strands, 2)

    def test_collection_with_an_outer_arc_is_accepted(self):
        sections = [BoundarySection.constant(0, 0, 64), wavy_section(0.4)]
        collection = solution_collection(solve_potentials(sections), 1, 0)
        self.assertEqual(collection.problems(), [])
        marks = sorted((color, sign) for _, color, sign, _ in collection.outer_marks())
        self.assertEqual(marks, [("blue", -1), ("blue", -1), ("red", -1), ("red", 1)])
        (arc,) = collection.outer_arcs()
        curve = collection.curves[arc]
        self.assertEqual(curve.sign, -1)
        ends = {color: theta for _, theta, color in curve.endpoints}
        self.assertLess(abs(ends["red"] - math.pi), 0.1)
        solution = solve_potentials(sections, collection=collection)
        self.assertEqual(solution.strands, 2)

    def test_extra_arc_is_infeasible(self):
        collection = collection_from_isotopy(*self.rotated_loops(finger=0.6))
        with self.assertRaises(InfeasibleConstraintError) as ctx:
            solve_potentials(self.sections, collection=collection)
        self.assertEqual(ctx.exception.code, "curve_violation")
        self.assertTrue(ctx.exception.details["problems"])

    def test_collection_needs_a_pair(self):
        collection = collection_from_isotopy(*self.rotated_loops())
        with self.assertRaises(LamsolveError):
            solve_potentials(self.sections[1:], collection=collection)


@override_settings(PENNER_LAMSOLVE=SMALL_GRID)
class HomotopyTests(SimpleTestCase):
    def test_different_inner_patches_are_homotopic(self):
        sections = [BoundarySection.constant(0, 0, 64), wavy_section()]
        phi = solve_potentials(sections)
        zeta = solve_potentials(sections, options={"inner_radius": 0.25})
        report = homotopy_feasibility(phi, zeta, samples=5)
        self.assertTrue(report.feasible, report.as_dict())
        self.assertEqual([s["t"] for s in report.stages], [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_grids_must_agree(self):
        sections = [wavy_section()]
        phi = solve_potentials(sections)
        zeta = solve_potentials(sections, options={"grid_r": 17})
        with self.assertRaises(LamsolveError) as ctx:
            homotopy_feasibility(phi, zeta)
        self.assertEqual(ctx.exception.code, "grid_mismatch")


def constant(a, b):
    return BoundarySection.constant(a, b, 64)


@override_settings(PENNER_LAMSOLVE=SMALL_GRID)
class NestDisksTests(SimpleTestCase):
    def tower(self):
        return [
            [TowerStrand(constant(0, 0))],
            [TowerStrand(constant(0.3, 0), 0, 0.25), TowerStrand(constant(-0.3, 0), 0, 0.25)],
            [TowerStrand(constant(0.35, 0), 0, 0.0625), TowerStrand(constant(-0.25, 0.02), 1, 0.0625)],
        ]

    def test_nested_tower_is_cauchy(self):
        report = nest_disks(self.tower(), contraction=0.25)
        self.assertTrue(report.passed)
        self.assertEqual(report.strands_per_depth, [1, 2, 2])
        self.assertEqual([(d["m"], d["n"]) for d in report.distances], [(0, 1), (0, 2), (1, 2)])
        last = report.distances[-1]
        self.assertAlmostEqual(last["max_distance"], math.hypot(0.05, 0.02), places=8)
        self.assertEqual(last["bound"], 1.0)
        self.assertLess(report.normalization_error, 1e-12)

    def test_single_level_is_trivially_nested(self):
        report = nest_disks(self.tower(), contraction=0.25, depth=1)
        self.assertTrue(report.passed)
        self.assertEqual(report.distances, [])

    def test_child_outside_parent_tube(self):
        tower = self.tower()
        tower[2][0] = TowerStrand(constant(0.6, 0), 0, 0.0625)
        with self.assertRaises(LamsolveError) as ctx:
            nest_disks(tower, contraction=0.25)
        self.assertEqual(ctx.exception.code, "containment_violated")

    def test_orphan(self):
        tower = self.tower()
        tower[1][1] = TowerStrand(constant(-0.3, 0), None, 0.25)
        with self.assertRaises(LamsolveError) as ctx:
            nest_disks(tower, contraction=0.25)
        self.assertEqual(ctx.exception.code, "orphan_strand")

    def test_bad_depth(self):
        with self.assertRaises(LamsolveError):
            nest_disks(self.tower(), contraction=0.25, depth=4)


@override_settings(PENNER_LAMSOLVE=SMALL_GRID)
class CensusTowerTests(SimpleTestCase):
    def setUp(self):
        graph = running_example()
        self.psi = psi_matrix(parse_word(RUNNING_WORD, graph), graph)

    def test_tower_levels(self):
        levels, contraction = tower_from_census(self.psi, 2)
        self.assertEqual(contraction, 0.125)
        self.assertEqual(len(levels), 3)
        self.assertEqual(len(levels[0]), 1)
        self.assertEqual(levels[0][0].radius, 1.0)
        for m in (1, 2):
            self.assertGreater(len(levels[m]), 0)
            for strand in levels[m]:
                self.assertIsNotNone(strand.parent)
                self.assertLess(strand.radius, levels[m - 1][strand.parent].radius)

    def test_identity_strand_is_centered(self):
        levels, _ = tower_from_census(self.psi, 0)
        self.assertEqual(levels[0][0].section.distance(constant(0, 0)), 0.0)

    def test_census_tower_is_cauchy(self):
        levels, contraction = tower_from_census(self.psi, 2)
        report = nest_disks(levels, contraction)
        self.assertTrue(report.passed, report.as_dict())

    def test_centers_lie_in_the_unit_disk(self):
        census = strand_census(self.psi, 1)
        for strands in census.strands.values():
            for strand in strands:
                self.assertLess(abs(strand_center(strand)), 1.0)

    def test_task_reports_nesting(self):
        result = run_nested_solve(graph_to_document(running_example()), RUNNING_WORD, 1)
        self.assertTrue(result["passed"])
        self.assertEqual(result["strands_per_depth"][0], 1)
        self.assertIn("elapsed_seconds", result)


@override_settings(PENNER_LAMSOLVE=SMALL_GRID)
class DocumentTests(SimpleTestCase):
    def test_problem_document(self):
        problem = problem_from_document({
            "sections": [{"constant": [0, 0]}, {"f": wavy_section().f.tolist(), "g": wavy_section().g.tolist()}],
        })
        self.assertEqual(len(problem["sections"]), 2)
        self.assertIsNone(problem["collection"])
        solution = solve_potentials(problem["sections"], problem["collection"], problem["options"])
        self.assertEqual(solution.strands, 2)

    def test_isotopy_in_document(self):
        gamma, radii = loop_family()
        problem = problem_from_document({
            "sections": [{"constant": [0, 0]}],
            "isotopy": {"gamma": gamma.tolist(), "radii": radii.tolist()},
        })
        self.assertEqual(len(problem["collection"].through_curves()), 2)

    def test_mixed_section_is_rejected(self):
        with self.assertRaises(LamsolveError) as ctx:
            problem_from_document({"sections": [{"constant": [0, 0], "f": [0.0] * 8}]})
        self.assertEqual(ctx.exception.code, "bad_document")

    def test_tower_document(self):
        tower = tower_from_document({
            "contraction": 0.25,
            "levels": [
                [{"section": {"constant": [0, 0]}}],
                [{"section": {"constant": [0.3, 0]}, "parent": 0, "radius": 0.25}],
            ],
        })
        report = nest_disks(tower["levels"], tower["contraction"])
        self.assertTrue(report.passed)
