import numpy as np

from approx.exceptions import ConfigurationError, InfeasibleError
from approx.fixtures import c1_bump, c1_bump_transform
from approx.formats import fmt, format_table, read_spectral_samples, write_field, write_spectral_samples, write_table
from approx.management.base import ApproxCommand
from approx.quadrature import tensor_rule
from approx.serializers import SpecextConfigSerializer
from approx.specext import (
    DeltaSeqConfig,
    delta_sequence_check,
    extrapolate,
    fit_mollifier,
    sample_spectrum,
    window_from_spec,
)

DEFAULT_WINDOWS = {1: "interval:-1:1", 2: "ball:0,0:1"}
DEFAULT_REGIONS = {1: "-0.5:0.5;2:3", 2: "-0.5,-0.5:0.5,0.5;2,2:3,3"}
DEFAULT_LADDER = (4, 8, 16, 32, 64)


def parse_grid(text, a, dim):
    """`lo:hi:n` per axis; the same axis is used for every dimension."""
    if not text:
        lo, hi, n = -a, a, 201 if dim == 1 else 41
    else:
        try:
            lo, hi, n = text.split(":")
            lo, hi, n = float(lo), float(hi), int(n)
        except ValueError:
            raise ConfigurationError(f"grid {text!r} is not lo:hi:n") from None
        if n < 2 or not hi > lo:
            raise ConfigurationError(f"grid {text!r} needs hi > lo and n >= 2")
    axis = np.linspace(lo, hi, n)
    return [axis] * dim


def parse_regions(text, dim):
    regions = []
    for chunk in text.split(";"):
        try:
            lows, highs = chunk.split(":")
            lows = tuple(float(v) for v in lows.split(","))
            highs = tuple(float(v) for v in highs.split(","))
        except ValueError:
            raise ConfigurationError(f"region {chunk!r} is not lo:hi") from None
        if len(lows) != dim or len(highs) != dim:
            raise ConfigurationError(f"region {chunk!r} needs {dim} coordinates per corner")
        regions.append((lows, highs))
    return regions


class Command(ApproxCommand):
    help = "Recover a compactly supported function from spectral samples on a window."
    name = "specext"
    serializer_class = SpecextConfigSerializer

    def add_arguments(self, parser):
        actions = self.add_action_parsers(parser, SpecextConfigSerializer.ACTIONS)
        for sub in actions.values():
            self.add_common_arguments(sub)
            sub.add_argument("--dim", type=int, help="1 or 2")
            sub.add_argument("--window", help="interval:lo:hi, box:lo0,lo1:hi0,hi1, ball:c:R or cone:deg:deg:T")
            sub.add_argument("--center", help="mollifier center, comma separated")
            sub.add_argument("--radius", type=float, help="mollifier radius")
            sub.add_argument("--a", type=float, help="support radius of f")
            sub.add_argument("--a1", type=float, help="kernel scale, greater than a")
            sub.add_argument("--truncation-radius", type=float, help="spatial truncation radius R")
            sub.add_argument("--method", help="kernel spectrum: laplacian-expansion or quadrature")
            sub.add_argument("--f", help="function to sample (builtin:c1-bump)")
        actions["extrapolate"].add_argument("--j", type=int, help="delta sequence index")
        actions["extrapolate"].add_argument("--in", dest="input", help="spectral sample file")
        actions["extrapolate"].add_argument("--grid", help="evaluation axis lo:hi:n")
        actions["check-delta"].add_argument("--j-ladder", help="comma separated increasing j values")
        actions["check-delta"].add_argument("--regions", help="boxes lo:hi separated by ';'")

    def execute_run(self, config, out):
        handler = {
            "sample": self.sample,
            "extrapolate": self.extrapolate,
            "check-delta": self.check_delta,
        }[config["action"]]
        handler(config, out)

    def window(self, config):
        return window_from_spec(config.get("window") or DEFAULT_WINDOWS[config["dim"]], config["dim"])

    def kernel_config(self, config, window, j=None):
        mollifier = fit_mollifier(window, config.get("center"), config.get("radius"))
        return DeltaSeqConfig.build(
            j or config["j"], config["a"], mollifier,
            a1=config.get("a1"), truncation_radius=config.get("truncation_radius"),
            spectrum_method=config["method"],
        )

    def sample(self, config, out):
        window = self.window(config)
        samples = sample_spectrum(c1_bump_transform(config["a"], config["dim"]), window)
        write_spectral_samples(self.written(out), samples)
        self.stdout.write(f"{len(window.nodes)} samples on {window.describe()}")

    def extrapolate(self, config, out):
        samples = read_spectral_samples(config["input"])
        dim = samples.window.dim
        cfg = self.kernel_config(config, samples.window)
        axes = parse_grid(config.get("grid"), config["a"], dim)
        points = tensor_rule([(ax, np.ones_like(ax)) for ax in axes])[0]
        result = extrapolate(samples, cfg, points)
        write_field(self.written(out), axes, result.values)
        error = float(np.max(np.abs(result.values.real - c1_bump(config["a"])(points))))
        self.stdout.write(
            f"j={cfg.j} amplification={fmt(result.amplification)} max_imag={fmt(result.max_imag)} "
            f"bump_error={fmt(error)}"
        )

    def check_delta(self, config, out):
        dim = config["dim"]
        window = self.window(config)
        js = tuple(config.get("j_ladder") or DEFAULT_LADDER)
        regions = parse_regions(config.get("regions") or DEFAULT_REGIONS[dim], dim)
        cfg = self.kernel_config(config, window, j=js[0])
        report = delta_sequence_check(cfg, regions, js)
        columns = ("j", *(f"region{k}" for k in range(len(regions))))
        rows = [(j, *(float(v.real) for v in row)) for j, row in zip(js, report.integrals)]
        write_table(self.written(out), columns, rows)
        self.stdout.write(format_table(columns, rows), ending="")
        self.stdout.write(
            f"uniform_bound={fmt(report.uniform_bound)} "
            f"limit_errors={','.join(fmt(e) for e in report.limit_errors())}"
        )
        if not report.passed():
            raise InfeasibleError("delta sequence integrals do not approach their 0/1 limits")
