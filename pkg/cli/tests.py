import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from .export import census_csv
from .runner import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE, run
from .serializers import resolve_overrides

RUNNING_WORD = "t0 s1^-1 s2^-1"


def running(command, **extra):
    return {"command": command, "example": "running", "word": RUNNING_WORD, **extra}


class ResolveOverridesTests(SimpleTestCase):
    def test_merges_into_sections(self):
        sections = resolve_overrides({"r1": "0.2", "grid_r": "40", "profile": "sloped"})
        self.assertEqual(sections["geometry"]["r1"], 0.2)
        self.assertEqual(sections["lamsolve"]["grid_r"], 40)
        self.assertEqual(sections["geomlab"]["profile"], "sloped")

    def test_rejects_unknown_key(self):
        with self.assertRaisesMessage(Exception, "Unknown parameter(s): radius"):
            resolve_overrides({"radius": "1"})

    def test_rejects_inadmissible_radii(self):
        result = run(running("transfer matrix", overrides={"r1": "0.3", "r2": "0.3"}))
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertEqual(result.payload["error"]["code"], "invalid_config")
        self.assertIn("overrides", result.payload["error"]["errors"])


class RunTests(SimpleTestCase):
    def test_track_invariant(self):
        result = run(running("track invariant"))
        self.assertEqual(result.exit_code, EXIT_OK)
        data = result.payload["data"]
        self.assertEqual(data["choice"], {"p": "+", "q": "+"})
        self.assertEqual(data["orientation"], "standard")
        self.assertTrue(data["decomposition"]["regular"])

    def test_missing_word_is_usage_error(self):
        result = run({"command": "transfer matrix", "example": "running"})
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertIn("word", result.payload["error"]["errors"])

    def test_non_penner_word_fails_check(self):
        result = run({"command": "twist check", "example": "running", "word": "t0 s1"})
        self.assertEqual(result.exit_code, EXIT_CHECK_FAILED)
        self.assertIsNone(result.payload["data"]["orientation"])

    def test_penner_word_sweep_is_constant(self):
        result = run(running("twist check"))
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(result.payload["data"]["sweep"]["images"], ["p+,q+"])
        self.assertTrue(result.payload["data"]["sweep"]["constant"])

    def test_track_of_non_penner_word_is_domain_error(self):
        result = run({"command": "track invariant", "example": "running", "word": "t0 s1"})
        self.assertEqual(result.exit_code, EXIT_CHECK_FAILED)
        self.assertFalse(result.payload["success"])
        self.assertEqual(result.payload["error"]["module"], "twistsys")

    def test_census_depth_one(self):
        result = run(running("transfer census", depth=1))
        self.assertEqual(result.exit_code, EXIT_OK)
        strands = [s for s in result.payload["data"]["census"]["strands"] if s["disk"] == "Sbar-:q"]
        self.assertEqual(len(strands), 3)

    def test_census_is_byte_identical_when_deterministic(self):
        first = run(running("transfer census", depth=2, deterministic=True))
        second = run(running("transfer census", depth=2, deterministic=True))
        self.assertEqual(first.text, second.text)
        self.assertNotIn("elapsed_seconds", first.text)

    @override_settings(PENNER_DETERMINISTIC=False)
    def test_timing_kept_when_not_deterministic(self):
        result = run(running("transfer census", depth=0))
        self.assertIn("elapsed_seconds", result.payload["data"])

    def test_overrides_are_restored(self):
        from penner.config import engine_settings

        before = engine_settings("geometry")
        run(running("transfer matrix", overrides={"r1": "0.2"}))
        self.assertEqual(engine_settings("geometry"), before)

    def test_floer_one_point(self):
        result = run({
            "command": "floer",
            "example": "two_sphere",
            "word0": "t0 s1^-1",
            "core0": "1",
            "word1": "t0^-1 s1",
            "core1": "0",
        })
        self.assertEqual(result.exit_code, EXIT_OK)
        self.assertEqual(result.payload["data"]["hf_sum"], 3)

    def test_missing_input_file(self):
        result = run({"command": "plumb validate", "input": "/nonexistent/graph.json"})
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertEqual(result.payload["error"]["code"], "io_error")

    def test_output_file_matches_stdout(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "report.json"
            result = run({"command": "plumb validate", "example": "running", "output": str(path)})
            self.assertEqual(path.read_text(), result.text)
        self.assertTrue(result.payload["data"]["valid"])

    def test_lamsolve_run_on_sections(self):
        document = {"sections": [{"constant": [0, 0]}, {"constant": [0.5, 0]}]}
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "problem.json"
            path.write_text(json.dumps(document))
            result = run({
                "command": "lamsolve run",
                "input": str(path),
                "overrides": {"grid_r": "33", "grid_theta": "64"},
            })
        self.assertEqual(result.exit_code, EXIT_OK)
        data = result.payload["data"]
        self.assertEqual(data["strands"], 2)
        self.assertEqual(data["grid"], {"r": 33, "theta": 64})
        self.assertAlmostEqual(data["min_gaps"]["0,1"], 0.5, places=3)

    def test_lamsolve_run_on_bad_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "problem.json"
            path.write_text("{not json")
            result = run({"command": "lamsolve run", "input": str(path)})
        self.assertEqual(result.exit_code, EXIT_USAGE)
        self.assertEqual(result.payload["error"]["code"], "bad_json")


class ExportTests(SimpleTestCase):
    def test_census_csv_is_sorted(self):
        result = run(running("export", kind="census", depth=1))
        lines = result.text.splitlines()
        self.assertEqual(lines[0], "strand_id,disk,radius")
        self.assertEqual(len(lines) - 1, len(set(lines[1:])))
        self.assertEqual(result.text, run(running("export", kind="census", depth=1)).text)

    def test_matrix_dot(self):
        text = run(running("export", kind="matrix")).text
        self.assertTrue(text.startswith('digraph "t0 s1^-1 s2^-1" {'))
        self.assertIn("->", text)
        self.assertTrue(text.endswith("}\n"))

    def test_decomposition_dot(self):
        text = run(running("export", kind="decomposition")).text
        self.assertTrue(text.startswith('graph "decomposition" {'))
        self.assertIn('[relation="contains"]', text)

    def test_unmaterialized_census(self):
        from transfer.services import psi_matrix, strand_census
        from plumbing.catalog import running_example
        from twistsys.services import parse_word
        from penner.exceptions import CliError

        graph = running_example()
        census = strand_census(psi_matrix(parse_word(RUNNING_WORD, graph), graph), 2, limit=0)
        with self.assertRaises(CliError) as ctx:
            census_csv(census)
        self.assertEqual(ctx.exception.code, "not_materialized")


class PipelineCommandTests(SimpleTestCase):
    def test_track_invariant_command(self):
        out = StringIO()
        call_command("track", "invariant", "--example", "running", "--word", RUNNING_WORD, stdout=out)
        self.assertEqual(json.loads(out.getvalue())["data"]["choice"], {"p": "+", "q": "+"})

    def test_set_option(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command(
                "transfer", "matrix", "--example", "running", "--word", RUNNING_WORD,
                "--set", "r1=0.3", "--set", "r2=0.3", stdout=out,
            )
        self.assertEqual(ctx.exception.returncode, EXIT_USAGE)
        self.assertFalse(json.loads(out.getvalue())["success"])

    def test_failed_check_exits_with_one(self):
        out = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command("twist", "check", "--example", "running", "--word", "t0 s1", stdout=out)
        self.assertEqual(ctx.exception.returncode, EXIT_CHECK_FAILED)

    def test_export_command_writes_dot(self):
        out = StringIO()
        call_command("export", "--kind", "decomposition", "--example", "running", "--word", RUNNING_WORD, stdout=out)
        self.assertTrue(out.getvalue().startswith('graph "decomposition" {'))

    def test_plumb_fixed_surface(self):
        out = StringIO()
        call_command("plumb", "fixed-surface", "--example", "two_sphere", stdout=out)
        data = json.loads(out.getvalue())["data"]
        self.assertIn("surface", data)
        self.assertIn("provenance", data)
