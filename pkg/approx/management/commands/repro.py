import logging

from approx.exceptions import InfeasibleError
from approx.experiments import EXPERIMENTS, run_experiment
from approx.formats import format_table, write_table
from approx.management.base import ApproxCommand
from approx.models import RegressionPin
from approx.serializers import ReproConfigSerializer

logger = logging.getLogger(__name__)

COLUMNS = ("criterion", "title", "result", "detail")


class Command(ApproxCommand):
    help = "Run the acceptance experiments and print a PASS/FAIL table."
    name = "repro"
    serializer_class = ReproConfigSerializer

    def add_arguments(self, parser):
        parser.add_argument("targets", nargs="*", help="'all' (default) or criterion numbers 1-9")
        self.add_common_arguments(parser, seeded=True)
        parser.add_argument("--draws", type=int, help="noise draws per experiment")

    def load_config(self, options):
        options = dict(options)
        targets = options.pop("targets", None) or ["all"]
        if targets != ["all"]:
            options["criteria"] = ",".join(targets)
        return super().load_config(options)

    def check_pins(self, result):
        """Compare pinned values; the first passing run records them."""
        notes = []
        for name, value in result.pins.items():
            pin = RegressionPin.objects.filter(name=name).first()
            if pin is None:
                if result.passed:
                    if self.record.pk is None:
                        self.record.save()
                    RegressionPin.objects.create(name=name, value=value, first_run=self.record)
                    notes.append(f"{name} pinned at {value:.6g}")
            elif pin.matches(value):
                notes.append(f"{name} {value:.6g} matches {pin.value:.6g}")
            else:
                result.passed = False
                notes.append(f"{name} {value:.6g} drifted from {pin.value:.6g}")
                logger.warning("regression pin %s: %r outside %r +/- %.0f%%", name, value, pin.value, 100 * pin.tolerance)
        return notes

    def execute_run(self, config, out):
        criteria = config.get("criteria") or sorted(EXPERIMENTS)
        rows, failed = [], []
        for criterion in criteria:
            result = run_experiment(criterion, config["draws"], config["seed"])
            detail = "; ".join([result.detail, *self.check_pins(result)])
            rows.append((criterion, result.title, "PASS" if result.passed else "FAIL", detail))
            if not result.passed:
                failed.append(criterion)
        write_table(self.written(out), COLUMNS, rows)
        self.stdout.write(format_table(COLUMNS, rows), ending="")
        if failed:
            raise InfeasibleError(f"criteria {', '.join(map(str, failed))} failed")
