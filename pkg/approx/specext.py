"""Delta-type kernels and Fourier inversion from a compact spectral window.

For f supported in the ball B_a, the kernel

    delta_j(x) = P_j(|x|^2) g(x),    P_j(r) = (j / (4 pi a1^2))^(n/2) (1 - r / (4 a1^2))^j,
    g(x) = (2 pi)^-n  int_W  h(xi) exp(-i xi.x) dxi,

built from a normalized bump h supported inside the window W, satisfies

    f_j(x) = int f(y) delta_j(x - y) dy = (2 pi)^-n int_W F[f](xi) F[delta_j](xi) exp(-i xi.x) dxi,

so f_j only needs F[f] on W, and f_j -> f as j grows. Both sides are
implemented here: `extrapolate` is the spectral route, `convolve` the
spatial one.
"""

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property, lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy.signal import fftconvolve

from .exceptions import (
    ConfigurationError,
    GeometryError,
    IllConditionedError,
    TruncationError,
)
from .quadrature import (
    approx_setting,
    as_points,
    evaluate_chunked,
    gauss_panels,
    midpoint_rule,
    polar_disc_rule,
    rows_per_chunk,
    tensor_rule,
)

logger = logging.getLogger(__name__)

SHAPES = ("interval", "box", "ball", "truncated-cone")
METHODS = ("quadrature", "laplacian-expansion")
VOLUME_TOLERANCE = 1e-10
NORMALIZATION_TOLERANCE = 1e-8
GEOMETRY_TOLERANCE = 1e-12


def _angle_in_sector(phi, lo, hi):
    """True where angle phi (mod 2 pi) lies in [lo, hi]."""
    return np.mod(phi - lo + 1e-12, 2 * math.pi) <= (hi - lo) + 2e-12


def cone_axes(alpha_min, alpha_max, T, count, rule, panels, order):
    """Angular nodes and signed offsets of a truncated cone, with their weights.

    Offset weights carry the polar Jacobian |t|.
    """
    if rule == "midpoint":
        angles, wa = midpoint_rule(alpha_min, alpha_max, count)
    elif rule == "gauss":
        angles, wa = gauss_panels(alpha_min, alpha_max, max(1, count // order), min(order, count))
    else:
        raise ConfigurationError(f"unknown angular rule {rule!r}")
    tn, tw = gauss_panels(0.0, T, panels, order)
    t = np.concatenate([-tn[::-1], tn])
    wt = np.concatenate([tw[::-1], tw]) * np.abs(t)
    return angles, wa, t, wt


@dataclass(frozen=True, eq=False)
class SpectralWindow:
    """Compact frequency region with a positive-weight quadrature rule.

    `params` holds everything needed to rebuild the rule with `from_params`,
    which is how spectral sample files are matched against a window.
    """

    dim: int
    shape: str
    params: dict
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ConfigurationError(f"dimension must be 1 or 2, got {self.dim}")
        if self.shape not in SHAPES:
            raise ConfigurationError(f"unknown window shape {self.shape!r}")
        nodes = as_points(self.nodes, self.dim)
        weights = np.asarray(self.weights, dtype=float).ravel()
        if weights.size != len(nodes):
            raise ConfigurationError("window nodes and weights differ in length")
        if np.any(weights <= 0):
            raise ConfigurationError("window quadrature weights must be positive")
        volume = self.volume
        if not volume > 0:
            raise ConfigurationError(f"window {self.shape} has empty interior")
        if abs(weights.sum() - volume) > VOLUME_TOLERANCE * volume:
            raise ConfigurationError(
                f"window quadrature integrates 1 to {weights.sum()!r}, volume is {volume!r}"
            )
        if not np.all(self.contains(nodes)):
            raise ConfigurationError("window quadrature has nodes outside the window")
        for arr in (nodes, weights):
            arr.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    # construction

    @classmethod
    def interval(cls, lo, hi, panels=None, order=None):
        panels = panels or approx_setting("WINDOW_PANELS")
        order = order or approx_setting("WINDOW_ORDER")
        x, w = gauss_panels(lo, hi, panels, order, graded=True)
        params = {"lo": float(lo), "hi": float(hi), "panels": panels, "order": order}
        return cls(1, "interval", params, x[:, None], w)

    @classmethod
    def box(cls, lows, highs, panels=None, order=None):
        lows = tuple(map(float, np.atleast_1d(lows)))
        highs = tuple(map(float, np.atleast_1d(highs)))
        if len(lows) != len(highs):
            raise ConfigurationError("box corners differ in dimension")
        panels = panels or max(1, approx_setting("WINDOW_PANELS") // len(lows))
        order = order or approx_setting("WINDOW_ORDER")
        rules = [gauss_panels(lo, hi, panels, order, graded=True) for lo, hi in zip(lows, highs)]
        nodes, weights = tensor_rule(rules)
        params = {"lo": lows, "hi": highs, "panels": panels, "order": order}
        return cls(len(lows), "box", params, nodes, weights)

    @classmethod
    def ball(cls, center, radius, panels=None, order=None, angular=None):
        center = tuple(map(float, np.atleast_1d(center)))
        dim = len(center)
        panels = panels or max(1, approx_setting("WINDOW_PANELS") // (1 if dim == 1 else 4))
        order = order or approx_setting("WINDOW_ORDER")
        if dim == 1:
            x, w = gauss_panels(center[0] - radius, center[0] + radius, panels, order, graded=True)
            params = {"center": center, "radius": float(radius), "panels": panels, "order": order}
            return cls(1, "ball", params, x[:, None], w)
        angular = angular or approx_setting("ANGULAR_NODES")
        nodes, weights = polar_disc_rule(center, radius, panels, order, angular)
        params = {
            "center": center, "radius": float(radius),
            "panels": panels, "order": order, "angular": angular,
        }
        return cls(2, "ball", params, nodes, weights)

    @classmethod
    def truncated_cone(cls, alpha_min, alpha_max, T, count=None, rule="gauss", panels=None, order=None):
        """Double sector {t (cos a, sin a) : a in [alpha_min, alpha_max], |t| <= T}.

        Nodes are angle-major; each angle holds the signed offsets from -T to T.
        `rule="midpoint"` places the angular nodes at the midpoints of `count`
        equal cells, which are exactly the directions of an AngularSector.
        """
        width = alpha_max - alpha_min
        if not 0 < width < math.pi:
            raise ConfigurationError(f"sector width must lie in (0, pi), got {width}")
        if not T > 0:
            raise ConfigurationError(f"cone truncation T must be positive, got {T}")
        panels = panels or approx_setting("CONE_PANELS")
        order = order or approx_setting("WINDOW_ORDER")
        count = count or approx_setting("CONE_ANGULAR_NODES")
        angles, wa, t, wt = cone_axes(alpha_min, alpha_max, T, count, rule, panels, order)
        aa, tt = np.meshgrid(angles, t, indexing="ij")
        waa, wtt = np.meshgrid(wa, wt, indexing="ij")
        nodes = np.stack([tt.ravel() * np.cos(aa.ravel()), tt.ravel() * np.sin(aa.ravel())], axis=1)
        params = {
            "alpha_min": float(alpha_min), "alpha_max": float(alpha_max), "T": float(T),
            "count": len(angles), "rule": rule, "panels": panels, "order": order,
        }
        return cls(2, "truncated-cone", params, nodes, (waa * wtt).ravel())

    @classmethod
    def from_params(cls, dim, shape, params):
        p = dict(params)
        try:
            if shape == "interval":
                return cls.interval(p["lo"], p["hi"], p.get("panels"), p.get("order"))
            if shape == "box":
                return cls.box(p["lo"], p["hi"], p.get("panels"), p.get("order"))
            if shape == "ball":
                center = p["center"] if dim == len(np.atleast_1d(p["center"])) else (0.0,) * dim
                return cls.ball(center, p["radius"], p.get("panels"), p.get("order"), p.get("angular"))
            if shape == "truncated-cone":
                return cls.truncated_cone(
                    p["alpha_min"], p["alpha_max"], p["T"], p.get("count"),
                    p.get("rule", "gauss"), p.get("panels"), p.get("order"),
                )
        except KeyError as exc:
            raise ConfigurationError(f"window {shape!r} is missing parameter {exc.args[0]!r}") from None
        raise ConfigurationError(f"unknown window shape {shape!r}")

    # geometry

    @property
    def volume(self):
        p = self.params
        if self.shape == "interval":
            return p["hi"] - p["lo"]
        if self.shape == "box":
            return float(np.prod(np.subtract(p["hi"], p["lo"])))
        if self.shape == "ball":
            return 2 * p["radius"] if self.dim == 1 else math.pi * p["radius"] ** 2
        return (p["alpha_max"] - p["alpha_min"]) * p["T"] ** 2

    def contains(self, points, tol=1e-9):
        pts = as_points(points, self.dim)
        p = self.params
        if self.shape in ("interval", "box"):
            lo = np.atleast_1d(p["lo"]) - tol
            hi = np.atleast_1d(p["hi"]) + tol
            return np.all((pts >= lo) & (pts <= hi), axis=1)
        if self.shape == "ball":
            dist = np.linalg.norm(pts - np.asarray(p["center"]), axis=1)
            return dist <= p["radius"] * (1 + tol)
        r = np.hypot(pts[:, 0], pts[:, 1])
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        inside = _angle_in_sector(phi, p["alpha_min"], p["alpha_max"])
        inside |= _angle_in_sector(phi + math.pi, p["alpha_min"], p["alpha_max"])
        return (r <= p["T"] * (1 + tol)) & (inside | (r <= tol))

    def contains_ball(self, center, radius):
        """Closed ball inside the closed window; the bump vanishes on its own boundary."""
        c = np.atleast_1d(np.asarray(center, dtype=float))
        if c.size != self.dim or not radius > 0:
            return False
        p = self.params
        slack = GEOMETRY_TOLERANCE * max(1.0, radius)
        if self.shape in ("interval", "box"):
            lo, hi = np.atleast_1d(p["lo"]), np.atleast_1d(p["hi"])
            return bool(np.all(c - radius >= lo - slack) and np.all(c + radius <= hi + slack))
        if self.shape == "ball":
            return bool(np.linalg.norm(c - np.asarray(p["center"])) + radius <= p["radius"] + slack)
        norm = float(np.hypot(*c))
        if norm + radius > p["T"] + slack or norm <= radius:
            return False
        phi = math.atan2(c[1], c[0])
        lo, hi = p["alpha_min"], p["alpha_max"]
        if not _angle_in_sector(phi, lo, hi):
            phi += math.pi
            if not _angle_in_sector(phi, lo, hi):
                return False
        for edge in (lo, hi):
            gap = abs(math.remainder(phi - edge, 2 * math.pi))
            distance = norm * math.sin(gap) if gap < math.pi / 2 else norm
            if distance < radius - slack:
                return False
        return True

    def describe(self):
        return {"dim": self.dim, "shape": self.shape, **self.params}


def bump_profile(s):
    """exp(-1 / (1 - s)) for s < 1, zero otherwise."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1
    out[inside] = np.exp(-1.0 / (1.0 - s[inside]))
    return out


@lru_cache(maxsize=None)
def _laplacian_terms(dim, k):
    """(N_k, p_k) with Lap^k F(|u|^2) = N_k(s) (1 - s)^(-p_k) exp(-1/(1-s)), s = |u|^2."""
    if k == 0:
        return Polynomial([1.0]), 0
    numer, p = _laplacian_terms(dim, k - 1)
    q = Polynomial([1.0, -1.0])
    s = Polynomial([0.0, 1.0])

    def ds(poly, power):
        return poly.deriv() * q ** 2 + power * poly * q - poly

    with np.errstate(over="ignore", invalid="ignore"):
        first = ds(numer, p)
        second = ds(first, p + 2)
        return 2 * dim * first * q ** 2 + 4 * s * second, p + 4


def bump_laplacian(dim, k, s):
    """k-th Laplacian (in u) of the bump profile evaluated at s = |u|^2."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = s < 1
    if not np.any(inside):
        return out
    numer, p = _laplacian_terms(dim, k)
    q = 1.0 - s[inside]
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        out[inside] = numer(s[inside]) * np.exp(-1.0 / q - p * np.log(q))
    return out


@dataclass(frozen=True, eq=False)
class Mollifier:
    """Normalized bump h(xi) = C exp(-1 / (1 - |xi - c|^2 / rho^2)) inside a window."""

    window: SpectralWindow
    center: np.ndarray
    radius: float
    norm_const: float

    @property
    def dim(self):
        return self.window.dim

    def scaled_distance2(self, xi):
        pts = as_points(xi, self.dim)
        return np.sum((pts - self.center) ** 2, axis=1) / self.radius ** 2

    def __call__(self, xi):
        return self.norm_const * bump_profile(self.scaled_distance2(xi))

    @cached_property
    def node_values(self):
        return self(self.window.nodes)

    @cached_property
    def support_rule(self):
        """Quadrature on the support ball alone, independent of the window nodes."""
        panels = approx_setting("WINDOW_PANELS")
        order = approx_setting("WINDOW_ORDER")
        if self.dim == 1:
            c = float(self.center[0])
            x, w = gauss_panels(c - self.radius, c + self.radius, panels, order, graded=True)
            return x[:, None], w
        return polar_disc_rule(self.center, self.radius, max(1, panels // 4), order, approx_setting("ANGULAR_NODES"))

    @cached_property
    def active(self):
        """Support nodes with their inverse-transform weights."""
        nodes, weights = self.support_rule
        values = self(nodes)
        keep = values > 0
        coeff = weights[keep] * values[keep] / (2 * math.pi) ** self.dim
        return nodes[keep], coeff

    def integral(self):
        return float(self.window.weights @ self.node_values) / (2 * math.pi) ** self.dim


def make_mollifier(window, center, radius):
    center = np.atleast_1d(np.asarray(center, dtype=float))
    if not window.contains_ball(center, radius):
        raise GeometryError(
            f"mollifier ball (center {center.tolist()}, radius {radius}) "
            f"is not inside the {window.shape} window"
        )
    unit = Mollifier(window, center, float(radius), 1.0)
    raw = float(window.weights @ unit.node_values)
    if not raw > 0:
        raise GeometryError("window quadrature does not resolve the mollifier support")
    norm_const = (2 * math.pi) ** window.dim / raw
    mollifier = Mollifier(window, center, float(radius), norm_const)
    logger.debug("mollifier: raw integral %.12g, norm_const %.12g", raw, norm_const)
    return mollifier


@dataclass(frozen=True, eq=False)
class DeltaSeqConfig:
    j: int
    a: float
    a1: float
    mollifier: Mollifier
    truncation_radius: float
    spectrum_method: str = "laplacian-expansion"

    def __post_init__(self):
        if int(self.j) != self.j or self.j < 1:
            raise ConfigurationError(f"j must be a positive integer, got {self.j}")
        object.__setattr__(self, "j", int(self.j))
        if not self.a > 0:
            raise ConfigurationError(f"support radius a must be positive, got {self.a}")
        if not self.a1 > self.a:
            raise ConfigurationError(f"a1={self.a1} must exceed a={self.a}")
        if not self.truncation_radius > 4 * self.a1:
            raise ConfigurationError(
                f"truncation radius {self.truncation_radius} must exceed 4*a1={4 * self.a1}"
            )
        if self.spectrum_method not in METHODS:
            raise ConfigurationError(
                f"unknown spectrum method {self.spectrum_method!r}; choose from {METHODS}"
            )

    @classmethod
    def build(cls, j, a, mollifier, a1=None, truncation_radius=None, spectrum_method="laplacian-expansion"):
        a1 = a1 if a1 is not None else 1.25 * a
        truncation_radius = truncation_radius if truncation_radius is not None else 8 * a1
        return cls(j, a, a1, mollifier, truncation_radius, spectrum_method)

    @property
    def window(self):
        return self.mollifier.window

    @property
    def dim(self):
        return self.mollifier.dim

    def with_j(self, j):
        return replace(self, j=j)


def default_config(j, a=1.0, dim=1, spectrum_method="laplacian-expansion"):
    """Window [-1, 1] (or the unit disc) with the mollifier filling it, a1 = 1.25 a."""
    window = SpectralWindow.interval(-1.0, 1.0) if dim == 1 else SpectralWindow.ball((0.0, 0.0), 1.0)
    mollifier = make_mollifier(window, np.zeros(dim), 1.0)
    return DeltaSeqConfig.build(j, a, mollifier, spectrum_method=spectrum_method)


def window_from_spec(text, dim=1):
    """Parse `interval:lo:hi`, `box:lo0,lo1:hi0,hi1`, `ball:c0[,c1]:R` or `cone:deg_min:deg_max:T`."""
    kind, _, rest = text.partition(":")
    parts = rest.split(":")

    def numbers(chunk):
        return tuple(float(v) for v in chunk.split(","))

    try:
        if kind == "interval" and len(parts) == 2 and dim == 1:
            return SpectralWindow.interval(float(parts[0]), float(parts[1]))
        if kind == "box" and len(parts) == 2:
            lows, highs = numbers(parts[0]), numbers(parts[1])
            if len(lows) == dim:
                return SpectralWindow.box(lows, highs)
        if kind == "ball" and len(parts) == 2:
            center = numbers(parts[0])
            if len(center) == dim:
                return SpectralWindow.ball(center, float(parts[1]))
        if kind == "cone" and len(parts) == 3 and dim == 2:
            lo, hi, T = (float(v) for v in parts)
            return SpectralWindow.truncated_cone(math.radians(lo), math.radians(hi), T)
    except ValueError:
        raise ConfigurationError(f"window {text!r} has a non-numeric field") from None
    raise ConfigurationError(
        f"window {text!r} is not a {dim}D interval:lo:hi, box:lo:hi, ball:c:R or cone:deg:deg:T"
    )


def bisector_center(alpha_min, alpha_max, radius, margin=0.02):
    """Closest point to the apex on the sector bisector where a ball of `radius` fits."""
    half = 0.5 * (alpha_max - alpha_min)
    distance = radius * (1 + margin) / math.sin(half)
    bisector = 0.5 * (alpha_min + alpha_max)
    return distance * np.array([math.cos(bisector), math.sin(bisector)])


def fit_mollifier(window, center=None, radius=None):
    """Mollifier with the given placement, defaulting to the largest ball the window holds.

    Cones have no such ball; there the radius defaults to 1 and the center
    goes on the bisector.
    """
    p = window.params
    if window.shape == "truncated-cone":
        radius = radius or 1.0
        if center is None:
            center = bisector_center(p["alpha_min"], p["alpha_max"], radius)
    elif window.shape in ("interval", "box"):
        lo, hi = np.atleast_1d(p["lo"]), np.atleast_1d(p["hi"])
        center = 0.5 * (lo + hi) if center is None else center
        radius = radius or float(np.min(0.5 * (hi - lo)))
    else:
        center = np.asarray(p["center"]) if center is None else center
        radius = radius or p["radius"]
    return make_mollifier(window, center, radius)


@dataclass(frozen=True, eq=False)
class CompactFunction:
    """Samples of f on the uniform grid axis^dim covering [-a, a]^dim; zero for |x| >= a."""

    dim: int
    a: float
    axis: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        values = np.asarray(self.values)
        if values.shape != (axis.size,) * self.dim:
            raise ConfigurationError(f"values of shape {values.shape} do not match the grid")
        ring = self.radii() >= self.a
        scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
        if np.any(np.abs(values[ring]) > 1e-12 * scale):
            raise ConfigurationError(f"function does not vanish on and outside |x| = {self.a}")
        object.__setattr__(self, "axis", axis)

    @classmethod
    def sample(cls, func, a, dim=1, n=2001, extent=None):
        extent = extent or a
        axis = np.linspace(-extent, extent, n)
        points = tensor_rule([(axis, np.ones_like(axis))] * dim)[0]
        values = np.asarray(func(points), dtype=float)
        values = np.where(np.linalg.norm(points, axis=1) >= a, 0.0, values)
        return cls(dim, a, axis, values.reshape((n,) * dim))

    @property
    def dx(self):
        return float(self.axis[1] - self.axis[0])

    @property
    def points(self):
        return tensor_rule([(self.axis, np.ones_like(self.axis))] * self.dim)[0]

    def radii(self):
        return np.linalg.norm(self.points, axis=1).reshape(self.values.shape)


def forward_transform(f, xi):
    """int f(x) exp(i xi.x) dx by the grid rule; returns an array for an array of xi."""
    pts = as_points(xi, f.dim)
    flat = f.values.ravel()
    keep = flat != 0
    support, weights = f.points[keep], flat[keep] * f.dx ** f.dim

    def block(chunk):
        return np.exp(1j * chunk @ support.T) @ weights

    out = evaluate_chunked(block, pts, chunk=rows_per_chunk(len(support)))
    return out[0] if np.ndim(xi) == 0 or (np.ndim(xi) == 1 and f.dim > 1) else out


def pj(r, j, a1, n):
    r = np.asarray(r, dtype=float)
    return (j / (4 * math.pi * a1 ** 2)) ** (n / 2) * (1 - r / (4 * a1 ** 2)) ** j


def inverse_mollifier(points, mollifier):
    """g(x) = (2 pi)^-n int h(xi) exp(-i xi.x) dxi by the window rule."""
    pts = as_points(points, mollifier.dim)
    nodes, coeff = mollifier.active

    def block(chunk):
        return np.exp(-1j * chunk @ nodes.T) @ coeff

    return evaluate_chunked(block, pts, chunk=rows_per_chunk(len(nodes)))


def delta_kernel(x, cfg):
    pts = as_points(x, cfg.dim)
    r2 = np.sum(pts ** 2, axis=1)
    return pj(r2, cfg.j, cfg.a1, cfg.dim) * inverse_mollifier(pts, cfg.mollifier)


def _expansion_spectrum(pts, cfg):
    mollifier = cfg.mollifier
    s = mollifier.scaled_distance2(pts)
    scale = 4 * cfg.a1 ** 2 * mollifier.radius ** 2
    total = np.zeros(len(pts))
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(cfg.j + 1):
            total = total + math.comb(cfg.j, k) * scale ** -k * bump_laplacian(cfg.dim, k, s)
        prefactor = (cfg.j / (4 * math.pi * cfg.a1 ** 2)) ** (cfg.dim / 2) * mollifier.norm_const
        return (prefactor * total).astype(complex)


def _spatial_rule(cfg, radius):
    panels = approx_setting("SPATIAL_PANELS")
    order = approx_setting("SPATIAL_ORDER")
    if cfg.dim == 1:
        x, w = gauss_panels(-radius, radius, panels, order)
        return x[:, None], w
    return polar_disc_rule((0.0, 0.0), radius, max(1, panels // 4), order, 4 * approx_setting("ANGULAR_NODES"))


def _shell_points(cfg, radius):
    radii = np.linspace(radius, 1.5 * radius, 64)
    if cfg.dim == 1:
        return np.concatenate([radii, -radii])[:, None], radius
    angles = 2 * math.pi * np.arange(32) / 32
    rr, aa = np.meshgrid(radii[::4], angles, indexing="ij")
    pts = np.stack([rr.ravel() * np.cos(aa.ravel()), rr.ravel() * np.sin(aa.ravel())], axis=1)
    return pts, math.pi * 1.25 * radius ** 2


def _quadrature_spectrum(pts, cfg):
    radius = cfg.truncation_radius
    shell, shell_measure = _shell_points(cfg, radius)
    tail = float(np.max(np.abs(delta_kernel(shell, cfg)))) * shell_measure
    peak = (cfg.j / (4 * math.pi * cfg.a1 ** 2)) ** (cfg.dim / 2) * cfg.mollifier.norm_const * math.exp(-1)
    tolerance = approx_setting("TAIL_TOLERANCE")
    if not tail <= tolerance * peak:
        raise TruncationError(
            f"kernel tail beyond R={radius:g} is {tail:.3g}, above {tolerance:g} of the peak {peak:.3g}",
            suggested_radius=1.5 * radius,
        )
    logger.debug("kernel spectrum: tail certificate %.3g at R=%g", tail, radius)
    x, w = _spatial_rule(cfg, radius)
    weighted = delta_kernel(x, cfg) * w

    def block(chunk):
        return np.exp(1j * chunk @ x.T) @ weighted

    return evaluate_chunked(block, pts, chunk=rows_per_chunk(len(x)))


def delta_kernel_spectrum(xi, cfg):
    """F[delta_j](xi), by spatial quadrature or by the exact Laplacian expansion."""
    pts = as_points(xi, cfg.dim)
    if cfg.spectrum_method == "quadrature":
        return _quadrature_spectrum(pts, cfg)
    return _expansion_spectrum(pts, cfg)


@dataclass(frozen=True, eq=False)
class SpectralSamples:
    """Values of F[f] at the quadrature nodes of a window."""

    window: SpectralWindow
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex).ravel()
        if values.size != len(self.window.nodes):
            raise ConfigurationError(
                f"{values.size} spectral values for {len(self.window.nodes)} window nodes"
            )
        object.__setattr__(self, "values", values)


def sample_spectrum(source, window):
    """Spectral samples of a CompactFunction (by quadrature) or of a transform callable."""
    if isinstance(source, CompactFunction):
        values = forward_transform(source, window.nodes)
    else:
        values = source(window.nodes)
    return SpectralSamples(window, values)


@dataclass(frozen=True, eq=False)
class Extrapolation:
    points: np.ndarray
    values: np.ndarray
    amplification: float
    max_imag: float


def amplification(spectrum, window):
    """(2 pi)^-n int |F[delta_j]|: the factor by which a sup-norm error in F[f] can grow in f_j."""
    return float(window.weights @ np.abs(spectrum)) / (2 * math.pi) ** window.dim


def _check_conditioning(spectrum, window, j):
    if not np.all(np.isfinite(spectrum)):
        raise IllConditionedError(
            f"kernel spectrum for j={j} overflows on the window", amplification=math.inf
        )
    factor = amplification(spectrum, window)
    limit = approx_setting("MAX_AMPLIFICATION")
    if factor > limit:
        raise IllConditionedError(
            f"j={j}: spectral data errors would be amplified by {factor:.3g} (limit {limit:.3g}); "
            "use a smaller j, a wider window, or the convolution route",
            amplification=factor,
        )
    if factor > approx_setting("AMPLIFICATION_WARNING"):
        logger.warning("j=%d: amplification factor %.3g", j, factor)
    return factor


def extrapolate(samples, cfg, eval_points):
    """f_j on `eval_points` from spectral samples on the window of `cfg`."""
    window = cfg.window
    nodes = samples.window.nodes
    if nodes.shape != window.nodes.shape or not np.allclose(nodes, window.nodes, rtol=0, atol=1e-12):
        raise ConfigurationError("spectral samples are not given at the window quadrature nodes")
    spectrum = delta_kernel_spectrum(window.nodes, cfg)
    factor = _check_conditioning(spectrum, window, cfg.j)
    coeff = window.weights * samples.values * spectrum / (2 * math.pi) ** cfg.dim
    keep = coeff != 0
    active_nodes, active = window.nodes[keep], coeff[keep]
    pts = as_points(eval_points, cfg.dim)

    def block(chunk):
        return np.exp(-1j * chunk @ active_nodes.T) @ active

    if active.size:
        values = evaluate_chunked(block, pts, chunk=rows_per_chunk(active.size))
    else:
        values = np.zeros(len(pts), dtype=complex)
    max_imag = float(np.max(np.abs(values.imag))) if values.size else 0.0
    logger.info(
        "extrapolate: j=%d, %d points, amplification %.3g, max |imag| %.3g",
        cfg.j, len(pts), factor, max_imag,
    )
    return Extrapolation(pts, values, factor, max_imag)


@dataclass(frozen=True, eq=False)
class LatticeKernel:
    """g and |x|^2 on the difference lattice of a CompactFunction grid."""

    shape: tuple
    r2: np.ndarray
    g: np.ndarray


def kernel_lattice(f, cfg):
    n = f.values.shape[0]
    offsets = f.dx * np.arange(-(n - 1), n)
    pts = tensor_rule([(offsets, np.ones_like(offsets))] * f.dim)[0]
    shape = (offsets.size,) * f.dim
    g = inverse_mollifier(pts, cfg.mollifier)
    return LatticeKernel(shape, np.sum(pts ** 2, axis=1).reshape(shape), g.reshape(shape))


def convolve(f, cfg, lattice=None):
    """f_j = int f(y) delta_j(x - y) dy on f's own grid (rectangle rule, FFT convolution)."""
    if f.dim != cfg.dim:
        raise ConfigurationError(f"function is {f.dim}D, kernel is {cfg.dim}D")
    lattice = lattice or kernel_lattice(f, cfg)
    kernel = pj(lattice.r2, cfg.j, cfg.a1, cfg.dim) * lattice.g
    n = f.values.shape[0]
    full = fftconvolve(f.values.astype(complex), kernel, mode="full")
    window = tuple(slice(n - 1, 2 * n - 1) for _ in range(f.dim))
    return full[window] * f.dx ** f.dim


def convolution_ladder(f, cfg, js):
    lattice = kernel_lattice(f, cfg)
    return {j: convolve(f, cfg.with_j(j), lattice) for j in js}


def sup_error(field, f, mask=None):
    """max |Re f_j - f| over the grid (or over `mask`)."""
    diff = np.abs(np.real(field) - f.values)
    return float(np.max(diff[mask] if mask is not None else diff))


def l2_error(field, f, mask=None):
    diff = np.real(field) - f.values
    ref = f.values
    if mask is not None:
        diff, ref = diff[mask], ref[mask]
    return float(np.linalg.norm(diff) / np.linalg.norm(ref))


def error_ladder(f, cfg, js, norm="sup"):
    """Errors of the convolution approximants f_j against f over the ball B_a."""
    mask = f.radii() <= f.a
    measure = sup_error if norm == "sup" else l2_error
    fields = convolution_ladder(f, cfg, js)
    errors = {j: measure(fields[j], f, mask) for j in js}
    logger.info("error ladder (%s): %s", norm, ", ".join(f"j={j}: {e:.4g}" for j, e in errors.items()))
    return errors


def fit_rate(js, errors):
    """Least-squares slope of log(error) against log(j)."""
    return float(np.polyfit(np.log(np.asarray(js, dtype=float)), np.log(np.asarray(errors, dtype=float)), 1)[0])


def is_nonincreasing(values, slack=0.02):
    return all(b <= a * (1 + slack) for a, b in zip(values, values[1:]))


@dataclass(frozen=True, eq=False)
class DeltaSequenceReport:
    js: tuple
    regions: tuple
    contains_origin: tuple
    integrals: np.ndarray

    @property
    def uniform_bound(self):
        return float(np.max(np.abs(self.integrals)))

    def limit_errors(self):
        """Distance of the last rung from the 0/1 limits, per region."""
        last = self.integrals[-1]
        return tuple(
            abs(value - (1.0 if origin else 0.0))
            for value, origin in zip(last, self.contains_origin)
        )

    def passed(self, tolerance=0.05):
        return math.isfinite(self.uniform_bound) and all(e <= tolerance for e in self.limit_errors())


def delta_sequence_check(cfg, regions, js, panels=16, order=16):
    """int over each box region of delta_j for every j of the ladder."""
    if cfg.dim == 2:
        panels = max(1, panels // 2)
    rules, origin = [], []
    for lows, highs in regions:
        lows, highs = np.atleast_1d(lows), np.atleast_1d(highs)
        if lows.size != cfg.dim or highs.size != cfg.dim or np.any(highs <= lows):
            raise ConfigurationError(f"region {lows.tolist()}..{highs.tolist()} is not a {cfg.dim}D box")
        rules.append(tensor_rule([gauss_panels(lo, hi, panels, order) for lo, hi in zip(lows, highs)]))
        origin.append(bool(np.all(lows <= 0) and np.all(highs >= 0)))
    g_values = [inverse_mollifier(nodes, cfg.mollifier) for nodes, _ in rules]
    integrals = np.empty((len(js), len(regions)), dtype=complex)
    for row, j in enumerate(js):
        for col, ((nodes, weights), g) in enumerate(zip(rules, g_values)):
            integrals[row, col] = weights @ (pj(np.sum(nodes ** 2, axis=1), j, cfg.a1, cfg.dim) * g)
    report = DeltaSequenceReport(
        tuple(js), tuple((tuple(np.atleast_1d(lo)), tuple(np.atleast_1d(hi))) for lo, hi in regions),
        tuple(origin), integrals,
    )
    logger.info("delta sequence: uniform bound %.4g, limit errors %s", report.uniform_bound, report.limit_errors())
    return report
