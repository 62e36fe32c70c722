"""Limited-angle tomography on top of the spectral extrapolation machinery.

Projections known for directions in a sector K give the Fourier transform on
the double cone {t alpha : alpha in K} by the projection-slice identity. The
cone is truncated at |t| <= T and used as the spectral window of a
delta-type kernel.
"""

import logging
import math
import re
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .exceptions import ConfigurationError, DomainError, GeometryError
from .fixtures import disc_profile_transform
from .quadrature import gauss_panels
from .specext import (
    CompactFunction,
    DeltaSeqConfig,
    SpectralSamples,
    SpectralWindow,
    bisector_center,
    cone_axes,
    convolution_ladder,
    extrapolate,
    make_mollifier,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AngularSector:
    """Directions alpha_min + (i + 1/2) * width / count, i < count."""

    alpha_min: float
    alpha_max: float
    count: int

    def __post_init__(self):
        if not 0 < self.width < math.pi:
            raise GeometryError(
                f"sector [{self.alpha_min}, {self.alpha_max}] must have width in (0, pi)"
            )
        if self.count < 1:
            raise ConfigurationError("sector has no directions")

    @classmethod
    def from_degrees(cls, lo, hi, count):
        return cls(math.radians(lo), math.radians(hi), count)

    @property
    def width(self):
        return self.alpha_max - self.alpha_min

    @property
    def step(self):
        return self.width / self.count

    @property
    def directions(self):
        return self.alpha_min + (np.arange(self.count) + 0.5) * self.step

    @property
    def bisector(self):
        return 0.5 * (self.alpha_min + self.alpha_max)


@dataclass(frozen=True, eq=False)
class Sinogram:
    sector: AngularSector
    p0: float
    dp: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] != self.sector.count:
            raise ConfigurationError(
                f"sinogram of shape {values.shape} does not match {self.sector.count} directions"
            )
        if not self.dp > 0:
            raise ConfigurationError(f"offset spacing must be positive, got {self.dp}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_p(self):
        return self.values.shape[1]

    @property
    def p_grid(self):
        return self.p0 + self.dp * np.arange(self.n_p)

    @property
    def band(self):
        return math.pi / self.dp

    def trapezoid_weights(self):
        w = np.full(self.n_p, self.dp)
        w[[0, -1]] *= 0.5
        return w

    def masses(self):
        """int f^(alpha_i, p) dp for every direction."""
        return self.values @ self.trapezoid_weights()

    def scaled(self, factor):
        return Sinogram(self.sector, self.p0, self.dp, factor * self.values)

    def __add__(self, other):
        if other.sector != self.sector or other.values.shape != self.values.shape:
            raise ConfigurationError("sinograms are on different grids")
        return Sinogram(self.sector, self.p0, self.dp, self.values + other.values)


def offset_grid(a, n_p):
    """p0, dp for n_p offsets spanning [-a, a]."""
    return -a, 2 * a / (n_p - 1)


@dataclass(frozen=True)
class Disc:
    """w (1 - |x - c|^2 / r^2)^nu on the open disc |x - c| < r."""

    center: tuple
    radius: float
    weight: float = 1.0
    nu: float = 0.0

    def value(self, points):
        d2 = np.sum((points - np.asarray(self.center)) ** 2, axis=-1) / self.radius ** 2
        inside = d2 < 1
        return np.where(inside, self.weight * np.clip(1 - d2, 0, None) ** self.nu, 0.0)

    def projection(self, alpha, p):
        shift = np.asarray(p) - (self.center[0] * np.cos(alpha) + self.center[1] * np.sin(alpha))
        u = np.clip(1 - (shift / self.radius) ** 2, 0, None)
        chord = self.weight * self.radius * special.beta(0.5, self.nu + 1) * u ** (self.nu + 0.5)
        return np.where(np.abs(shift) < self.radius, chord, 0.0)

    @property
    def mass(self):
        return math.pi * self.weight * self.radius ** 2 / (self.nu + 1)


DISC_PATTERN = re.compile(r"^disc:([^;]+)$")


@dataclass(frozen=True)
class Phantom:
    """Sum of weighted discs supported in B_a."""

    discs: tuple
    a: float

    def __post_init__(self):
        if not self.discs:
            raise ConfigurationError("phantom has no discs")
        for disc in self.discs:
            if disc.radius <= 0 or disc.nu < 0:
                raise ConfigurationError(f"invalid disc {disc}")
            if math.hypot(*disc.center) + disc.radius > self.a * (1 + 1e-12):
                raise GeometryError(f"disc {disc} is not supported in the ball of radius {self.a}")

    @classmethod
    def parse(cls, spec, a=1.0):
        """Parse `disc:cx,cy,r[,w[,nu]]` terms joined by `+`."""
        discs = []
        for term in re.split(r"\+(?=\s*disc:)", spec):
            match = DISC_PATTERN.match(term.strip())
            if not match:
                raise ConfigurationError(f"phantom term {term!r} is not of the form disc:cx,cy,r[,w[,nu]]")
            try:
                numbers = [float(v) for v in match.group(1).split(",")]
            except ValueError:
                raise ConfigurationError(f"phantom term {term!r} has a non-numeric field") from None
            if not 3 <= len(numbers) <= 5:
                raise ConfigurationError(f"phantom term {term!r} needs 3 to 5 numbers")
            cx, cy, r, *rest = numbers
            discs.append(Disc((cx, cy), r, *rest))
        return cls(tuple(discs), a)

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return sum(disc.value(pts) for disc in self.discs)

    def projection(self, alpha, p):
        return sum(disc.projection(alpha, p) for disc in self.discs)

    def fourier(self, xi):
        return sum(
            disc_profile_transform(xi, disc.center, disc.radius, disc.weight, disc.nu)
            for disc in self.discs
        )

    @property
    def mass(self):
        return sum(disc.mass for disc in self.discs)

    def rasterize(self, n):
        return CompactFunction.sample(self, self.a, dim=2, n=n)


def _chord_integrals(disc, alpha, p, panels, order):
    direction = np.array([math.cos(alpha), math.sin(alpha)])
    normal = np.array([-math.sin(alpha), math.cos(alpha)])
    c = np.asarray(disc.center)
    shift = p - c @ direction
    half = np.sqrt(np.clip(disc.radius ** 2 - shift ** 2, 0, None))
    x, w = gauss_panels(-1.0, 1.0, panels, order)
    s = (c @ normal) + half[:, None] * x[None, :]
    points = p[:, None, None] * direction + s[:, :, None] * normal
    return half * (disc.value(points) @ w)


def radon_transform(phantom, sector, a=None, n_p=401, method="quadrature", panels=4, order=16):
    """Sinogram on n_p offsets spanning [-a, a].

    `quadrature` integrates the phantom along each chord, split at every disc
    boundary; `exact` uses the closed-form projection of each disc.
    """
    a = a or phantom.a
    if a < phantom.a:
        raise GeometryError(f"offset range {a} does not cover the phantom support {phantom.a}")
    p0, dp = offset_grid(a, n_p)
    p = p0 + dp * np.arange(n_p)
    rows = []
    for alpha in sector.directions:
        if method == "exact":
            rows.append(phantom.projection(alpha, p))
        elif method == "quadrature":
            rows.append(sum(_chord_integrals(d, alpha, p, panels, order) for d in phantom.discs))
        else:
            raise ConfigurationError(f"unknown projection method {method!r}")
    sinogram = Sinogram(sector, p0, dp, np.array(rows))
    masses = sinogram.masses()
    logger.debug(
        "radon: %d directions x %d offsets, mass spread %.3g",
        sector.count, n_p, float(np.ptp(masses)),
    )
    return sinogram


def slice_to_fourier(sinogram, alpha_index, t):
    """int f^(alpha, p) exp(i p t) dp by the trapezoid rule; equals F[f](t alpha)."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > sinogram.band):
        raise DomainError(f"|t| exceeds the offset band pi/dp = {sinogram.band:.6g}")
    if not 0 <= alpha_index < sinogram.sector.count:
        raise ConfigurationError(f"direction index {alpha_index} out of range")
    row = sinogram.values[alpha_index] * sinogram.trapezoid_weights()
    phases = np.exp(1j * np.multiply.outer(t, sinogram.p_grid))
    return phases @ row


def cone_window(sector, T, panels=None, order=None, count=None):
    return SpectralWindow.truncated_cone(
        sector.alpha_min, sector.alpha_max, T, count=count, panels=panels, order=order,
    )


def default_t_grid(T, step=0.02):
    count = int(math.ceil(2 * T / step)) + 1
    return np.linspace(-T, T, count)


def fill_spectral_cone(sinogram, t_grid, T, panels=None, order=None, count=None):
    """Spectral samples on the truncated cone over the sinogram's sector.

    Slices are computed on `t_grid` for every sinogram direction, then carried
    to the window nodes by cubic splines in angle and in t.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    sector = sinogram.sector
    if T > sinogram.band:
        raise ConfigurationError(f"T={T} exceeds the offset band {sinogram.band:.6g}")
    if sector.count < 4:
        raise ConfigurationError(f"angular interpolation needs at least 4 directions, got {sector.count}")
    if t_grid.size < 4 or np.any(np.diff(t_grid) <= 0):
        raise ConfigurationError("t grid must be increasing with at least 4 points")
    if t_grid[0] > -T or t_grid[-1] < T:
        raise ConfigurationError(f"cone nodes up to |t|={T} lie outside the computed slices")
    window = cone_window(sector, T, panels, order, count)
    p = window.params
    angles, _, t_nodes, _ = cone_axes(p["alpha_min"], p["alpha_max"], T, p["count"], p["rule"], p["panels"], p["order"])
    slices = np.stack([slice_to_fourier(sinogram, i, t_grid) for i in range(sector.count)])
    rows = CubicSpline(sector.directions, slices, axis=0)(angles)
    values = CubicSpline(t_grid, rows, axis=1)(t_nodes)
    return SpectralSamples(window, values.ravel())


def cone_config(sector, T, j, a, radius=1.0, margin=0.02, a1=None, panels=None, order=None, count=None):
    """Delta-sequence config on the truncated cone with the mollifier on the bisector.

    The ball of the given radius sits at the smallest distance from the apex
    that keeps it inside the sector, times (1 + margin).
    """
    center = bisector_center(sector.alpha_min, sector.alpha_max, radius, margin)
    reach = float(np.hypot(*center)) + radius
    if reach > T:
        raise GeometryError(
            f"mollifier of radius {radius} needs T >= {reach:.4g} in a "
            f"{math.degrees(sector.width):.4g} degree sector, got T={T}"
        )
    window = cone_window(sector, T, panels, order, count)
    return DeltaSeqConfig.build(j, a, make_mollifier(window, center, radius), a1=a1)


def _check_cone(window, sector, T):
    p = window.params
    if window.shape != "truncated-cone":
        raise ConfigurationError("reconstruction needs a truncated-cone window")
    same = (
        math.isclose(p["alpha_min"], sector.alpha_min, abs_tol=1e-12)
        and math.isclose(p["alpha_max"], sector.alpha_max, abs_tol=1e-12)
        and math.isclose(p["T"], T, rel_tol=1e-12)
    )
    if not same:
        raise ConfigurationError("kernel window does not match the sinogram sector and T")


def limited_angle_reconstruct(sinogram, cfg, T, eval_points, t_grid=None):
    window = cfg.window
    _check_cone(window, sinogram.sector, T)
    t_grid = default_t_grid(T) if t_grid is None else t_grid
    p = window.params
    samples = fill_spectral_cone(sinogram, t_grid, T, panels=p["panels"], order=p["order"], count=p["count"])
    return extrapolate(samples, cfg, eval_points)


def reference_reconstruction(phantom, cfg, n=81, js=None):
    """Convolution approximants of the rasterized phantom: {j: field} and the raster."""
    raster = phantom.rasterize(n)
    js = js or (cfg.j,)
    return raster, convolution_ladder(raster, cfg, js)


def relative_l2_error(field, raster):
    """Relative L2 error of Re(field) against the raster; the imaginary part is only logged."""
    field = np.asarray(field)
    logger.debug("max |imag| of reconstruction: %.3g", float(np.max(np.abs(field.imag))))
    return float(np.linalg.norm(field.real - raster.values) / np.linalg.norm(raster.values))
