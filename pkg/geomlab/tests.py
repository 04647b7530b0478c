import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from penner.exceptions import GeomlabError
from plumbing.catalog import running_example
from transfer.services import center_distance, twist_matrix
from twistsys.services import invariant_track, parse_word

from .models import CotangentPoint, ProfileVariant
from .services import (
    atom_gap_deviation,
    build_profile,
    circle_action,
    evaluate_atom,
    flow_cutoff,
    hamiltonian_flow,
    involution,
    is_involution_fixed,
    model_twist,
    numeric_gap,
    random_points,
    run_oracle_suite,
    slice_twist,
    spin,
    surgery_isotopy_demo,
    symplecticity_check,
    tube_image,
    validate_point,
    weighted_points,
)
from .tasks import run_oracle_suite as run_oracle_suite_task


def sample_points(count=100, seed=7, n=2):
    return random_points(n, count, np.random.default_rng(seed), mu_range=(0.1, 1.0))


class CircleActionTests(SimpleTestCase):
    def setUp(self):
        self.p = CotangentPoint([1.0, 0.0, 0.0], [0.0, 0.5, 0.0])

    def test_time_zero_is_identity(self):
        self.assertEqual(circle_action(0.0, self.p).distance(self.p), 0.0)

    def test_half_turn_is_antipodal(self):
        q = circle_action(math.pi, self.p)
        self.assertLess(q.distance(CotangentPoint(-self.p.u, -self.p.v)), 1e-12)

    def test_preserves_fiber_norm(self):
        rng = np.random.default_rng(3)
        for p, t in zip(sample_points(), rng.uniform(-10, 10, size=100)):
            q = circle_action(t, p)
            self.assertLess(abs(q.mu - p.mu), 1e-12)
            self.assertEqual(validate_point(q), q)

    def test_zero_fiber(self):
        with self.assertRaises(GeomlabError) as ctx:
            circle_action(1.0, CotangentPoint([1.0, 0.0], [0.0, 0.0]))
        self.assertEqual(ctx.exception.code, "zero_fiber")


class ProfileTests(SimpleTestCase):
    def test_plateau_shape(self):
        profile = build_profile(0.5, ProfileVariant.PLATEAU)
        self.assertAlmostEqual(profile(0.0), math.pi, places=12)
        self.assertAlmostEqual(profile(0.2), math.pi, places=12)
        self.assertEqual(profile(0.5), 0.0)
        self.assertEqual(profile(3.0), 0.0)
        _, values = profile.sample()
        self.assertTrue(np.all(np.diff(values) <= 1e-12))

    def test_sloped_starts_decreasing(self):
        profile = build_profile(0.5, ProfileVariant.SLOPED)
        self.assertAlmostEqual(profile(0.0), math.pi, places=12)
        self.assertLess(profile.spline(0.0, 1), 0)
        _, values = profile.sample()
        self.assertTrue(np.all(np.diff(values) <= 1e-12))

    @override_settings(PENNER_GEOMLAB={"epsilon": 0.25, "profile": "sloped", "fd_step": 1e-5, "fd_tol": 1e-6})
    def test_defaults_come_from_settings(self):
        profile = build_profile()
        self.assertEqual(profile.epsilon, 0.25)
        self.assertEqual(profile.variant, "sloped")

    def test_width_must_be_positive(self):
        with self.assertRaises(GeomlabError):
            build_profile(0.0)


class ModelTwistTests(SimpleTestCase):
    def setUp(self):
        self.profile = build_profile(0.5, ProfileVariant.PLATEAU)

    def test_zero_section_goes_to_antipode(self):
        p = CotangentPoint([0.0, 0.6, 0.8], [0.0, 0.0, 0.0])
        q = model_twist(p, self.profile)
        np.testing.assert_array_equal(q.u, -p.u)
        np.testing.assert_array_equal(q.v, np.zeros(3))

    def test_identity_outside_support(self):
        p = CotangentPoint([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
        self.assertEqual(model_twist(p, self.profile).distance(p), 0.0)

    def test_plateau_acts_as_half_turn(self):
        p = CotangentPoint([1.0, 0.0, 0.0], [0.0, 0.125, 0.0])
        expected = circle_action(math.pi, p)
        self.assertLess(model_twist(p, self.profile).distance(expected), 1e-12)

    def test_symplectic_for_both_profiles(self):
        points = sample_points()
        for variant in ProfileVariant.values:
            profile = build_profile(0.5, variant)
            deviation = symplecticity_check(lambda p, pr=profile: model_twist(p, pr), points, step=1e-5)
            self.assertLess(deviation, 1e-6, variant)

    def test_identity_map_has_no_deviation(self):
        self.assertLess(symplecticity_check(lambda p: p, sample_points(10)), 1e-9)

    def test_scaling_is_detected(self):
        deviation = symplecticity_check(lambda p: CotangentPoint(p.u, 2 * p.v), sample_points(10))
        self.assertGreater(deviation, 0.5)

    def test_zero_section_samples_are_rejected(self):
        with self.assertRaises(GeomlabError) as ctx:
            symplecticity_check(lambda p: model_twist(p, self.profile), [CotangentPoint([1.0, 0.0], [0.0, 0.0])])
        self.assertEqual(ctx.exception.code, "singular_sample")


class InvolutionTests(SimpleTestCase):
    def test_fixed_set(self):
        self.assertTrue(is_involution_fixed(CotangentPoint([0.6, 0.8, 0.0], [-0.4, 0.3, 0.0])))
        self.assertFalse(is_involution_fixed(CotangentPoint([0.6, 0.0, 0.8], [0.0, 1.0, 0.0])))

    def test_involutive_and_equivariant(self):
        profile = build_profile(0.5, ProfileVariant.PLATEAU)
        for p in sample_points():
            self.assertLess(involution(involution(p)).distance(p), 1e-9)
            self.assertLess(
                involution(model_twist(p, profile)).distance(model_twist(involution(p), profile)), 1e-9
            )


class SpinTests(SimpleTestCase):
    def test_spun_fiber_point(self):
        (p,) = spin([[0.0, 1.0]], [1.0, 0.0])
        np.testing.assert_allclose(p.u, [0.0, 0.0, 1.0])
        np.testing.assert_allclose(p.v, [1.0, 0.0, 0.0])

    def test_zero_section_spins_to_great_circles(self):
        thetas = np.linspace(0, 2 * math.pi, 12)
        for p in spin(np.column_stack([thetas, np.zeros(12)]), [0.0, 1.0]):
            self.assertEqual(p.mu, 0.0)
            self.assertAlmostEqual(p.u[0], 0.0)
            validate_point(p)

    def test_direction_must_be_unit(self):
        with self.assertRaises(GeomlabError):
            spin([[0.0, 1.0]], [2.0, 0.0])

    def test_slice_twist_zero_section(self):
        (theta, t), = slice_twist([0.5], [0.0])
        self.assertAlmostEqual(theta, 0.5 + math.pi)
        self.assertEqual(t, 0.0)


class SurgeryIsotopyTests(SimpleTestCase):
    def test_plateau_slices_agree(self):
        report = surgery_isotopy_demo(build_profile(0.5, ProfileVariant.PLATEAU), n=2)
        self.assertTrue(report.passed)
        self.assertLess(report.max_deviation, 1e-9)

    def test_sloped_slices_agree(self):
        report = surgery_isotopy_demo(build_profile(0.5, ProfileVariant.SLOPED), n=3)
        self.assertTrue(report.passed)

    def test_one_dimensional_spin_has_two_slices(self):
        report = surgery_isotopy_demo(build_profile(0.5, ProfileVariant.PLATEAU), n=1)
        self.assertEqual(report.slices, 2)
        self.assertTrue(report.passed)

    def test_dimension_limit(self):
        with self.assertRaises(GeomlabError):
            surgery_isotopy_demo(n=4)


class HamiltonianFlowTests(SimpleTestCase):
    def test_identity_far_away(self):
        x = np.array([2.0, 1.0, -1.5, 0.5])
        np.testing.assert_array_equal(hamiltonian_flow(x, 1.0), x)

    def test_quarter_turn_near_origin(self):
        x = np.array([0.1, -0.2, 0.05, 0.1])
        np.testing.assert_allclose(hamiltonian_flow(x, 1.0), [-0.05, -0.1, 0.1, -0.2], atol=1e-12)

    def test_time_zero_is_identity(self):
        x = np.array([0.7, 0.1, 0.2, 0.3])
        np.testing.assert_array_equal(hamiltonian_flow(x, 0.0), x)

    def test_symplectic_across_the_transition_band(self):
        band = weighted_points(np.random.default_rng(11), 100, 1.1, 1.9)
        self.assertLess(symplecticity_check(lambda x: hamiltonian_flow(x, 1.0), band), 1e-6)

    def test_band_rotation_angle_varies(self):
        band = weighted_points(np.random.default_rng(12), 100, 1.1, 1.9)
        angles = [flow_cutoff()(np.linalg.norm(x)) for x in band]
        self.assertTrue(any(0.1 < a < math.pi / 2 - 0.1 for a in angles))

    def test_symplectic_for_unequal_weights(self):
        band = weighted_points(np.random.default_rng(13), 50, 1.1, 1.9, c1=1.0, c2=1.2)
        self.assertLess(symplecticity_check(lambda x: hamiltonian_flow(x, 0.7, 1.0, 1.2), band), 1e-6)

    def test_weighted_levels(self):
        inner = weighted_points(np.random.default_rng(14), 50, 0.1, 1.0, c1=1.0, c2=1.2)
        far = weighted_points(np.random.default_rng(15), 50, 2.0, 3.0, c1=1.0, c2=1.2)
        for x in inner:
            np.testing.assert_allclose(hamiltonian_flow(x, 1.0, 1.0, 1.2), np.concatenate([-x[2:], x[:2]]), atol=1e-12)
        for x in far:
            np.testing.assert_array_equal(hamiltonian_flow(x, 1.0, 1.0, 1.2), x)

    def test_incompatible_weights(self):
        with self.assertRaises(GeomlabError) as ctx:
            hamiltonian_flow(np.ones(4), 1.0, c1=1.0, c2=3.0)
        self.assertEqual(ctx.exception.code, "incompatible_weights")

    def test_suite_samples_the_band(self):
        report = run_oracle_suite(samples=20, seed=3)
        band = next(c for c in report.checks if c.name == "flow_symplectic_transition_band")
        self.assertTrue(band.passed)
        self.assertEqual(band.samples, 20)


class AtomGeometryTests(SimpleTestCase):
    def setUp(self):
        graph = running_example()
        word = parse_word("t0 s1^-1 s2^-1", graph)
        track = invariant_track(word, graph)
        self.matrix = twist_matrix(word.factors[0], track, graph)

    def atoms(self):
        return [a for chain in self.matrix.chains() for a in chain.atoms if not a.identity]

    def test_evaluate_keeps_fiber_inside_unit_disk(self):
        for atom in self.atoms():
            rows = tube_image(atom, samples=16, ring=8)
            self.assertLess(np.max(np.hypot(rows[:, 1], rows[:, 2])), 1.0, atom.code)

    def test_scaling_atom_at_center(self):
        atom = next(a for a in self.atoms() if a.kind == "scaling")
        theta, x, y = evaluate_atom(atom, 0.3, 0.0, 0.0)
        self.assertEqual((x, y), (0.0, 0.0))
        self.assertAlmostEqual(theta, (0.3 + atom.angle_shift) % (2 * math.pi))

    def test_sampled_gaps_match_symbolic(self):
        atoms = self.atoms()
        a, b = atoms[0], atoms[1]
        symbolic = center_distance(a, b) - a.fiber_scale - b.fiber_scale
        if a.target == b.target:
            self.assertAlmostEqual(numeric_gap(a, b), symbolic, delta=1e-4)
        deviation, pairs = atom_gap_deviation([self.matrix])
        self.assertGreater(pairs, 0)
        self.assertLess(deviation, 1e-4)


class OracleSuiteTests(SimpleTestCase):
    def test_suite_passes(self):
        report = run_oracle_suite(samples=20, seed=1)
        failed = [c.as_dict() for c in report.checks if not c.passed]
        self.assertEqual(failed, [])

    def test_task_returns_report(self):
        result = run_oracle_suite_task(samples=10, seed=2)
        self.assertTrue(result["passed"])
        self.assertEqual(result["samples"], 10)
        self.assertIn("non_symplectic_control", [c["name"] for c in result["checks"]])
