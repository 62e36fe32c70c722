import numpy as np

from approx.exceptions import InfeasibleError
from approx.formats import format_table, write_table
from approx.management.base import ApproxCommand
from approx.serializers import LowerboundConfigSerializer
from approx.stablediff import lower_bound_check, minimax_error, sharpness_check


class Command(ApproxCommand):
    help = "Check the minimax lower bound on the adversarial pair."
    name = "lowerbound"
    serializer_class = LowerboundConfigSerializer

    def add_arguments(self, parser):
        self.add_common_arguments(parser, seeded=True)
        parser.add_argument("--m", type=float, help="bound on |f''|")
        parser.add_argument("--delta", type=float, help="noise bound")
        parser.add_argument("--samples", type=int, help="number of random estimates b")

    def execute_run(self, config, out):
        m, delta = config["m"], config["delta"]
        gamma = minimax_error(m, delta)
        report = sharpness_check(m, delta)
        rng = np.random.default_rng(config["seed"])
        estimates = rng.uniform(-10 * gamma, 10 * gamma, config["samples"])
        smallest = min(lower_bound_check(float(b), m, delta) for b in estimates)
        rows = [
            ("minimax", gamma),
            ("estimate_at_zero", report.estimate),
            ("error_f1", report.errors[0]),
            ("error_f2", report.errors[1]),
            ("data_distance_f1", report.data_distance[0]),
            ("smallest_worst_case", smallest),
        ]
        write_table(self.written(out), ("quantity", "value"), rows)
        self.stdout.write(format_table(("quantity", "value"), rows), ending="")
        if not report.attained or smallest < gamma * (1 - 1e-12):
            raise InfeasibleError("adversarial pair does not attain the minimax bound")
