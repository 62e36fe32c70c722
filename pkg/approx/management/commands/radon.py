import math

import numpy as np

from approx.exceptions import ConfigurationError
from approx.formats import fmt, read_sinogram, write_field, write_sinogram
from approx.management.base import ApproxCommand
from approx.quadrature import tensor_rule
from approx.radon import AngularSector, Phantom, cone_config, limited_angle_reconstruct, radon_transform
from approx.serializers import RadonConfigSerializer


def check_sector(text, sector):
    lo, hi = (float(v) for v in text.split(":"))
    header = (math.degrees(sector.alpha_min), math.degrees(sector.alpha_max))
    if not all(math.isclose(given, found, abs_tol=1e-9) for given, found in zip((lo, hi), header)):
        raise ConfigurationError(
            f"--sector {lo:g}:{hi:g} does not match the sinogram sector {header[0]:g}:{header[1]:g}"
        )


class Command(ApproxCommand):
    help = "Simulate limited-angle sinograms and reconstruct from them."
    name = "radon"
    serializer_class = RadonConfigSerializer

    def add_arguments(self, parser):
        actions = self.add_action_parsers(parser, RadonConfigSerializer.ACTIONS)
        for sub in actions.values():
            self.add_common_arguments(sub)
            sub.add_argument("--phantom", help="disc:cx,cy,r[,w[,nu]] terms joined by '+'")
            sub.add_argument("--a", type=float, help="support radius of the phantom")
            sub.add_argument("--sector", help="lo:hi in degrees; reconstruct checks it against the sinogram")
        simulate = actions["simulate"]
        simulate.add_argument("--n-alpha", type=int, help="number of directions")
        simulate.add_argument("--n-p", type=int, help="number of offsets")
        simulate.add_argument("--projection", help="quadrature or exact")
        reconstruct = actions["reconstruct"]
        reconstruct.add_argument("--in", dest="input", help="sinogram file; its header fixes the sector")
        reconstruct.add_argument("--j", type=int, help="delta sequence index")
        reconstruct.add_argument("--a1", type=float, help="kernel scale, greater than a")
        reconstruct.add_argument("--T", type=float, help="spectral cone truncation")
        reconstruct.add_argument("--radius", type=float, help="mollifier radius")
        reconstruct.add_argument("--grid", type=int, help="points per axis over [-a, a]")

    def execute_run(self, config, out):
        if config["action"] == "simulate":
            self.simulate(config, out)
        else:
            self.reconstruct(config, out)

    def simulate(self, config, out):
        phantom = Phantom.parse(config["phantom"], config["a"])
        lo, hi = (float(v) for v in config["sector"].split(":"))
        sector = AngularSector.from_degrees(lo, hi, config["n_alpha"])
        sinogram = radon_transform(phantom, sector, n_p=config["n_p"], method=config["projection"])
        write_sinogram(self.written(out), sinogram)
        masses = sinogram.masses()
        self.stdout.write(
            f"{sector.count} directions x {sinogram.n_p} offsets, "
            f"mass {fmt(float(np.mean(masses)))} spread {fmt(float(np.ptp(masses)))}"
        )

    def reconstruct(self, config, out):
        sinogram = read_sinogram(config["input"])
        if config.get("sector"):
            check_sector(config["sector"], sinogram.sector)
        cfg = cone_config(
            sinogram.sector, config["T"], config["j"], config["a"],
            radius=config["radius"], a1=config.get("a1"),
        )
        axis = np.linspace(-config["a"], config["a"], config["grid"])
        points = tensor_rule([(axis, np.ones_like(axis))] * 2)[0]
        result = limited_angle_reconstruct(sinogram, cfg, config["T"], points)
        write_field(self.written(out), [axis, axis], result.values)
        summary = (
            f"sector {math.degrees(sinogram.sector.width):.6g} deg, j={cfg.j}, "
            f"amplification={fmt(result.amplification)} max_imag={fmt(result.max_imag)}"
        )
        if config.get("phantom"):
            truth = Phantom.parse(config["phantom"], config["a"])(points)
            error = np.linalg.norm(result.values.real - truth) / np.linalg.norm(truth)
            summary += f" relative_l2_error={fmt(error)}"
        self.stdout.write(summary)
