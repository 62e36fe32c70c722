import json
import tempfile
from io import StringIO
from pathlib import Path
from unittest import mock

import numpy as np
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from approx import __version__
from approx.cli import run
from approx.formats import read_field, write_signal
from approx.models import RegressionPin, RunRecord
from approx.stablediff import SampledSignal
import manage


class CommandTestCase(TestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = Path(tmp.name)
        override = self.settings(APPROX={**settings.APPROX, "OUTPUT_DIR": self.dir})
        override.enable()
        self.addCleanup(override.disable)

    def call(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def fails(self, *args):
        with self.assertRaises(CommandError) as ctx:
            self.call(*args)
        return ctx.exception

    def manifest(self, path):
        return json.loads(Path(f"{path}.manifest.json").read_text())


class DiffCommandTests(CommandTestCase):
    def test_synthetic_run_writes_derivative_and_manifest(self):
        out = self.dir / "deriv.txt"
        text = self.call("diff", "--synth", "sin", "--delta", "1e-4", "--m2", "1", "--noise", "alternating", "--out", str(out))
        self.assertIn("within_bound=True", text)
        lines = out.read_text().splitlines()
        self.assertTrue(lines[0].startswith("# bound="))
        self.assertEqual(len(lines), 4097)

        manifest = self.manifest(out)
        self.assertNotIn("id", manifest)
        self.assertEqual(manifest["subcommand"], "diff")
        self.assertEqual(manifest["exit_status_label"], "ok")
        self.assertEqual(manifest["tool_version"], __version__)
        self.assertEqual(manifest["config"]["delta"], 1e-4)
        self.assertIn(str(out), manifest["outputs"])
        self.assertEqual(len(manifest["outputs"][str(out)]), 64)

    def test_signal_file(self):
        source = self.dir / "sig.txt"
        write_signal(source, SampledSignal.from_function(np.cos, 1024, delta=1e-3))
        out = self.dir / "deriv.txt"
        self.call("diff", "--in", str(source), "--delta", "1e-3", "--j", "1.5", "--mj", "2", "--out", str(out))
        record = RunRecord.objects.get()
        self.assertEqual(record.exit_status, 0)
        self.assertEqual(record.config["j"], 1.5)

    def test_uniform_noise_is_reproducible(self):
        digests = []
        for name in ("a.txt", "b.txt"):
            out = self.dir / name
            self.call("diff", "--synth", "cos", "--delta", "1e-3", "--m2", "1", "--noise", "uniform", "--seed", "42", "--out", str(out))
            digests.append(self.manifest(out)["outputs"][str(out)])
        self.assertEqual(digests[0], digests[1])

    def test_validation_failures_exit_1(self):
        error = self.fails("diff", "--synth", "sin", "--in", "x.txt", "--delta", "1e-4", "--m2", "1")
        self.assertEqual(error.returncode, 1)
        self.assertIn("exactly one", str(error))
        manifest = json.loads((self.dir / "diff.manifest.json").read_text())
        self.assertEqual(manifest["exit_status"], 1)

        self.assertEqual(self.fails("diff", "--synth", "sin", "--delta", "1e-4", "--j", "1", "--mj", "1").returncode, 1)
        self.assertEqual(self.fails("diff", "--bogus").returncode, 1)
        self.assertEqual(self.fails("diff", "--synth", "sin", "--delta", "1e-4", "--m2", "1", "--seed", str(2 ** 64)).returncode, 1)

    def test_config_file_with_flag_override(self):
        config = self.dir / "run.json"
        config.write_text(json.dumps({"synth": "sin3", "delta": 1e-2, "m2": 1.0, "samples": 512}))
        out = self.dir / "deriv.txt"
        self.call("diff", "--config", str(config), "--delta", "1e-3", "--out", str(out))
        self.assertEqual(self.manifest(out)["config"]["delta"], 1e-3)

        config.write_text(json.dumps({"synth": "sin", "delta": 1e-2, "m2": 1.0, "colour": "red"}))
        self.assertIn("colour", str(self.fails("diff", "--config", str(config))))
        config.write_text("{not json")
        self.assertEqual(self.fails("diff", "--config", str(config)).returncode, 1)

    def test_largest_seed_is_recorded(self):
        out = self.dir / "deriv.txt"
        seed = 2 ** 64 - 1
        self.call("diff", "--synth", "sin", "--delta", "1e-4", "--m2", "1", "--noise", "uniform", "--seed", str(seed), "--out", str(out))
        self.assertEqual(self.manifest(out)["seed"], seed)


class LowerboundCommandTests(CommandTestCase):
    def test_table(self):
        out = self.dir / "lb.txt"
        text = self.call("lowerbound", "--m", "1", "--delta", "1e-4", "--samples", "200", "--out", str(out))
        rows = dict(line.split() for line in text.splitlines() if not line.startswith("#"))
        self.assertAlmostEqual(float(rows["minimax"]), 0.01414213562373095, places=15)
        self.assertGreaterEqual(float(rows["smallest_worst_case"]), float(rows["minimax"]) * (1 - 1e-12))


class SpecextCommandTests(CommandTestCase):
    def test_sample_then_extrapolate(self):
        samples = self.dir / "spec.txt"
        field = self.dir / "field.txt"
        self.call("specext", "sample", "--out", str(samples))
        text = self.call("specext", "extrapolate", "--in", str(samples), "--j", "2", "--grid", "-1:1:21", "--out", str(field))
        self.assertIn("amplification=", text)
        axes, values = read_field(field)
        self.assertEqual(values.shape, (21,))
        self.assertEqual(self.manifest(field)["config"]["action"], "extrapolate")

    def test_ill_conditioned_exits_2(self):
        samples = self.dir / "spec.txt"
        self.call("specext", "sample", "--out", str(samples))
        error = self.fails("specext", "extrapolate", "--in", str(samples), "--j", "64")
        self.assertEqual(error.returncode, 2)
        self.assertEqual(RunRecord.objects.filter(exit_status=2).count(), 1)

    def test_check_delta(self):
        out = self.dir / "delta.txt"
        text = self.call("specext", "check-delta", "--j-ladder", "4,8,16,32,64", "--out", str(out))
        self.assertTrue(text.startswith("# j"))
        self.assertIn("uniform_bound=", text)

    def test_missing_action_or_input(self):
        self.assertEqual(self.fails("specext").returncode, 1)
        self.assertEqual(self.fails("specext", "extrapolate", "--j", "2").returncode, 1)
        self.assertEqual(self.fails("specext", "sample", "--window", "interval:0").returncode, 1)


class RadonCommandTests(CommandTestCase):
    def test_simulate_then_reconstruct(self):
        sinogram = self.dir / "sino.txt"
        field = self.dir / "rec.txt"
        self.call("radon", "simulate", "--phantom", "disc:0,0,0.5", "--sector", "30:150", "--n-alpha", "24", "--n-p", "201", "--out", str(sinogram))
        self.assertTrue(sinogram.read_text().startswith("# "))
        text = self.call(
            "radon", "reconstruct", "--in", str(sinogram), "--j", "1", "--T", "3", "--grid", "11",
            "--phantom", "disc:0,0,0.5", "--out", str(field),
        )
        self.assertIn("relative_l2_error=", text)
        _, values = read_field(field)
        self.assertEqual(values.shape, (11, 11))

    def test_bad_sector(self):
        error = self.fails("radon", "simulate", "--phantom", "disc:0,0,0.5", "--sector", "0:180")
        self.assertEqual(error.returncode, 1)

    def test_sector_is_checked_against_sinogram(self):
        sinogram = self.dir / "sino.txt"
        self.call("radon", "simulate", "--phantom", "disc:0,0,0.5", "--n-alpha", "24", "--n-p", "201", "--out", str(sinogram))
        field = self.dir / "rec.txt"
        self.call("radon", "reconstruct", "--in", str(sinogram), "--sector", "30:150", "--j", "1", "--grid", "5", "--out", str(field))
        self.assertEqual(self.manifest(field)["config"]["sector"], "30.0:150.0")

        error = self.fails("radon", "reconstruct", "--in", str(sinogram), "--sector", "40:140", "--j", "1", "--grid", "5")
        self.assertEqual(error.returncode, 1)
        self.assertIn("does not match", str(error))

    def test_cone_too_short(self):
        sinogram = self.dir / "sino.txt"
        self.call("radon", "simulate", "--phantom", "disc:0,0,0.5", "--sector", "60:120", "--n-alpha", "12", "--n-p", "101", "--out", str(sinogram))
        self.assertEqual(self.fails("radon", "reconstruct", "--in", str(sinogram), "--T", "2").returncode, 1)


class PropcCommandTests(CommandTestCase):
    def test_products(self):
        out = self.dir / "products.txt"
        text = self.call("propc", "products", "--f", "builtin:exp-cos", "--N", "2,4", "--out", str(out))
        self.assertEqual(text, out.read_text())
        self.assertEqual(text.splitlines()[0].split(), ["#", "N", "columns", "rank", "solver", "residual"])

    def test_unreachable_targets_exit_2_after_writing(self):
        out = self.dir / "blowup.txt"
        error = self.fails("propc", "blowup", "--t", "1", "--eps", "1e-1,1e-12", "--n-alpha", "8", "--out", str(out))
        self.assertEqual(error.returncode, 2)
        self.assertIn("no", out.read_text().splitlines()[-1].split())

    def test_increasing_eps_is_invalid(self):
        self.assertEqual(self.fails("propc", "blowup", "--eps", "1e-3,1e-1").returncode, 1)


class ReproCommandTests(CommandTestCase):
    def test_selected_criteria(self):
        text = self.call("repro", "1", "2", "--draws", "20")
        rows = text.splitlines()[1:]
        self.assertEqual(len(rows), 2)
        self.assertTrue(all("PASS" in row.split() for row in rows), rows)

    def test_pins_are_recorded_then_checked(self):
        self.call("repro", "9")
        pin = RegressionPin.objects.get(name="blowup_norm_t1")
        self.assertIsNotNone(pin.first_run)
        self.assertEqual(pin.first_run.subcommand, "repro")
        self.assertIn("matches", self.call("repro", "9"))

        pin.value *= 2
        pin.save()
        error = self.fails("repro", "9")
        self.assertEqual(error.returncode, 2)

    def test_unknown_criterion(self):
        self.assertEqual(self.fails("repro", "12").returncode, 1)


class EntryPointTests(TestCase):
    def test_unknown_subcommand(self):
        self.assertEqual(run(["migrate"]), 1)
        self.assertEqual(run([]), 1)
        self.assertEqual(run(["--help"]), 0)

    def test_manage_routes_subcommands_through_run(self):
        with mock.patch("approx.cli.run", return_value=2) as routed:
            with self.assertRaises(SystemExit) as ctx:
                manage.main(["manage.py", "radon", "reconstruct"])
        self.assertEqual(ctx.exception.code, 2)
        routed.assert_called_once_with(["radon", "reconstruct"])

        with mock.patch("django.core.management.execute_from_command_line") as django_admin:
            manage.main(["manage.py", "check"])
        django_admin.assert_called_once_with(["manage.py", "check"])
