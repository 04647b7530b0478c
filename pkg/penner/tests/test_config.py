"""Tests for engine parameter configuration and error envelopes."""
import os
from unittest.mock import patch

from django.core.exceptions import ImproperlyConfigured
from django.test import SimpleTestCase, override_settings

from penner.config import (
    DEFAULT_R0,
    DEFAULT_R1,
    PLATEAU_PROFILE,
    SLOPED_PROFILE,
    build_census_settings,
    build_geomlab_settings,
    build_geometry_settings,
    build_lamsolve_settings,
    engine_settings,
    max_trivial_tubes,
    resolve_profile,
)
from penner.exceptions import DomainMismatchError, error_payload
from penner.responses import error_envelope, success_envelope


class BuildGeometrySettingsTests(SimpleTestCase):
    def test_defaults_are_admissible(self):
        with patch.dict(os.environ, {}, clear=True):
            cfg = build_geometry_settings()
        self.assertEqual(cfg["r0"], DEFAULT_R0)
        self.assertEqual(cfg["r1"], DEFAULT_R1)
        self.assertLess(cfg["r1"] + cfg["r2"], cfg["r0"])

    def test_rejects_radii_violating_sum(self):
        env = {"PENNER_R1": "0.3", "PENNER_R2": "0.3", "PENNER_R0": "0.5"}
        with patch.dict(os.environ, env, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_geometry_settings()

    def test_rejects_scale_at_least_one(self):
        with patch.dict(os.environ, {"PENNER_R1": "1.0"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_geometry_settings()

    def test_rejects_trivial_tubes_overlapping_singular_annulus(self):
        with patch.dict(os.environ, {"PENNER_TRIVIAL_OFFSET": "0.6"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_geometry_settings()

    def test_rejects_non_numeric_value(self):
        with patch.dict(os.environ, {"PENNER_R0": "half"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_geometry_settings()

    def test_max_trivial_tubes_for_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            cfg = build_geometry_settings()
        self.assertGreaterEqual(max_trivial_tubes(cfg), 8)


class BuildGeomlabSettingsTests(SimpleTestCase):
    def test_default_profile_is_plateau(self):
        with patch.dict(os.environ, {}, clear=True):
            self.assertEqual(resolve_profile(), PLATEAU_PROFILE)

    def test_sloped_profile(self):
        with patch.dict(os.environ, {"PENNER_PROFILE": "Sloped"}, clear=True):
            self.assertEqual(build_geomlab_settings()["profile"], SLOPED_PROFILE)

    def test_unknown_profile(self):
        with patch.dict(os.environ, {"PENNER_PROFILE": "spline"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                resolve_profile()

    def test_rejects_non_positive_epsilon(self):
        with patch.dict(os.environ, {"PENNER_EPSILON": "0"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_geomlab_settings()


class BuildLamsolveSettingsTests(SimpleTestCase):
    def test_defaults(self):
        with patch.dict(os.environ, {}, clear=True):
            cfg = build_lamsolve_settings()
        self.assertEqual((cfg["grid_r"], cfg["grid_theta"]), (64, 256))
        self.assertEqual(cfg["inner_radius"], 0.1)

    def test_rejects_tiny_grid(self):
        with patch.dict(os.environ, {"PENNER_GRID_R": "4"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_lamsolve_settings()

    def test_census_limit_must_be_positive(self):
        with patch.dict(os.environ, {"PENNER_CENSUS_LIMIT": "0"}, clear=True):
            with self.assertRaises(ImproperlyConfigured):
                build_census_settings()


class EngineSettingsTests(SimpleTestCase):
    @override_settings(PENNER_LAMSOLVE={"grid_r": 16, "grid_theta": 32, "inner_radius": 0.1, "margin": 0.0})
    def test_reads_django_settings_first(self):
        self.assertEqual(engine_settings("lamsolve")["grid_r"], 16)

    def test_returns_a_copy(self):
        cfg = engine_settings("geometry")
        cfg["r0"] = 0.0
        self.assertNotEqual(engine_settings("geometry")["r0"], 0.0)


class EnvelopeTests(SimpleTestCase):
    def test_success_envelope(self):
        env = success_envelope({"x": 1}, meta={"command": "plumb validate"})
        self.assertTrue(env["success"])
        self.assertEqual(env["meta"]["command"], "plumb validate")
        self.assertNotIn("message", env)

    def test_domain_error_payload_names_module(self):
        with self.assertLogs("penner.exceptions", level="WARNING"):
            payload = error_payload(DomainMismatchError("source track differs"))
        self.assertFalse(payload["success"])
        self.assertEqual(payload["error"]["module"], "transfer")
        self.assertEqual(payload["error"]["code"], "domain_mismatch")

    def test_internal_error_payload(self):
        with self.assertLogs("penner.exceptions", level="ERROR"):
            payload = error_payload(RuntimeError("boom"))
        self.assertEqual(payload["error"]["code"], "internal_error")

    def test_error_envelope(self):
        env = error_envelope("bad depth", code="usage_error", errors={"depth": ["negative"]})
        self.assertEqual(env["error"]["module"], "cli")
        self.assertEqual(env["error"]["errors"]["depth"], ["negative"])
