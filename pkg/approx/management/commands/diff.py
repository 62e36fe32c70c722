import numpy as np

from approx.cli import NOISE_PATTERNS, synth_noise
from approx.fixtures import periodic_builtin
from approx.formats import fmt, read_signal, write_derivative, write_signal
from approx.management.base import ApproxCommand
from approx.serializers import DiffConfigSerializer
from approx.stablediff import SampledSignal, SmoothnessClass, differentiate


class Command(ApproxCommand):
    help = "Differentiate noisy periodic samples with the optimal central difference."
    name = "diff"
    serializer_class = DiffConfigSerializer

    def add_arguments(self, parser):
        self.add_common_arguments(parser, seeded=True)
        parser.add_argument("--in", dest="input", help="signal file ('# x0 dx period delta' header)")
        parser.add_argument("--synth", help="builtin signal instead of a file: sin, cos, sin3, holder:<a>")
        parser.add_argument("--samples", type=int, help="samples per period for --synth")
        parser.add_argument("--delta", type=float, help="sup-norm noise bound")
        parser.add_argument("--m2", type=float, help="bound on |f''| (j = 2)")
        parser.add_argument("--j", type=float, help="smoothness order in (1, 2]")
        parser.add_argument("--mj", type=float, help="norm bound for order j")
        parser.add_argument("--noise", choices=("none", *NOISE_PATTERNS), help="noise added before differentiating")

    def execute_run(self, config, out):
        exact = None
        if config.get("synth"):
            f, fprime, _ = periodic_builtin(config["synth"])
            clean = SampledSignal.from_function(f, config["samples"])
            exact = fprime(clean.grid)
        else:
            clean = read_signal(config["input"])
        delta = config["delta"]
        if config["noise"] == "none":
            signal = clean.with_values(clean.values, delta=delta)
        else:
            signal = synth_noise(clean, delta, config["seed"], config["noise"])
            write_signal(self.written(out.with_name(out.name + ".signal")), signal)

        report = differentiate(signal, SmoothnessClass(config["j"], config["mj"]))
        write_derivative(self.written(out), signal, report)
        summary = f"bound={fmt(report.bound)} h_used={fmt(report.h_used)} snapping_slack={fmt(report.snapping_slack)}"
        if exact is not None:
            error = float(np.max(np.abs(report.derivative - exact)))
            summary += f" max_error={fmt(error)} within_bound={error <= report.bound}"
        self.stdout.write(summary)
