"""Builtin test functions with known derivatives or transforms.

Functions take an (m, dim) array of points (or a 1D array of abscissae for
the periodic signals) and return an (m,) array.
"""

import math

import numpy as np
from scipy import special

from .exceptions import ConfigurationError


def disc_profile_transform(xi, center, radius, weight=1.0, nu=0.0):
    """Fourier transform of w (1 - |x-c|^2/r^2)^nu on the disc |x-c| < r, in 2D."""
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    k = radius * np.hypot(xi[:, 0], xi[:, 1])
    small = k < 1e-8
    safe = np.where(small, 1.0, k)
    radial = 2.0 ** nu * special.gamma(nu + 1) * special.jv(nu + 1, safe) / safe ** (nu + 1)
    radial = np.where(small, 1.0 / (2.0 * (nu + 1)), radial)
    phase = np.exp(1j * (xi @ np.asarray(center, dtype=float)))
    return 2 * math.pi * weight * radius ** 2 * radial * phase


def c1_bump(a=1.0):
    """f(x) = (1 - |x|^2/a^2)^2 inside B_a; C^1 with a jump in the second derivative."""

    def f(points):
        r2 = np.sum(np.atleast_2d(points) ** 2, axis=1) / a ** 2
        return np.where(r2 < 1, (1 - r2) ** 2, 0.0)

    return f


def c1_bump_transform(a=1.0, dim=1):
    def transform(xi):
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        if dim == 2:
            return disc_profile_transform(xi, (0.0, 0.0), a, 1.0, 2.0)
        u = a * xi[:, 0]
        small = np.abs(u) < 0.1
        safe = np.where(small, 1.0, u)
        exact = 16 * (3 * np.sin(safe) - 3 * safe * np.cos(safe) - safe ** 2 * np.sin(safe)) / safe ** 5
        series = 16 * (1 / 15 - u ** 2 / 210 + u ** 4 / 7560)
        return (a * np.where(small, series, exact)).astype(complex)

    return transform


def holder_fixture(a):
    """Periodic f with f'(x) = sign(sin x)|sin x|^a, a in (0, 1].

    Returns (f, f', m) where m bounds the C^{1+a} norm. f is evaluated in closed
    form by the regularized incomplete beta function.
    """
    p = (a + 1) / 2
    full = special.beta(p, 0.5)

    def f(x):
        y = np.mod(np.asarray(x, dtype=float), 2 * math.pi)
        u = np.minimum(y, 2 * math.pi - y)
        v = np.minimum(u, math.pi - u)
        part = 0.5 * full * special.betainc(p, 0.5, np.sin(v) ** 2)
        return np.where(u <= math.pi / 2, part, full - part)

    def fprime(x):
        s = np.sin(x)
        return np.sign(s) * np.abs(s) ** a

    return f, fprime, 1 + 2 ** (1 - a)


PERIODIC = {
    "sin": (np.sin, np.cos, 1.0),
    "cos": (np.cos, lambda x: -np.sin(x), 1.0),
    "sin3": (lambda x: np.sin(3 * x) / 9, lambda x: np.cos(3 * x) / 3, 1.0),
}


def periodic_builtin(name):
    """(f, f', m2) for a named periodic signal, or the Hoelder fixture `holder:<a>`."""
    if name.startswith("holder:"):
        a = float(name.split(":", 1)[1])
        if not 0 < a <= 1:
            raise ConfigurationError(f"holder exponent must lie in (0, 1], got {a}")
        return holder_fixture(a)
    try:
        return PERIODIC[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown builtin signal {name!r}; choose from {sorted(PERIODIC)} or holder:<a>"
        ) from None


def _x1(points):
    return points[:, 0]


def _r2(points):
    return points[:, 0] ** 2 + points[:, 1] ** 2


def _exp_cos(points):
    return np.exp(points[:, 0]) * np.cos(3 * points[:, 1])


PLANAR = {
    "x1": _x1,
    "r2": _r2,
    "exp-cos": _exp_cos,
}


def planar_builtin(spec):
    name = spec.split(":", 1)[1] if spec.startswith("builtin:") else spec
    try:
        return PLANAR[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown builtin function {spec!r}; choose from {sorted(PLANAR)}"
        ) from None
