"""Quadrature rules and chunked evaluation shared by the numerical modules."""

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from django.conf import settings

logger = logging.getLogger(__name__)


def approx_setting(name):
    return settings.APPROX[name]


def gauss_panels(lo, hi, panels, order, graded=False):
    """Composite Gauss-Legendre rule on [lo, hi].

    With `graded=True` the panel edges follow a cosine map, so panels shrink
    quadratically towards both ends of the interval. That is where a
    C-infinity bump aligned with the interval carries its sharpest features.
    """
    if hi <= lo:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    x, w = np.polynomial.legendre.leggauss(order)
    if graded:
        edges = lo + (hi - lo) * 0.5 * (1.0 - np.cos(np.pi * np.arange(panels + 1) / panels))
    else:
        edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def radial_panels(radius, panels, order):
    """Gauss-Legendre rule on [0, radius] graded towards the outer edge only."""
    x, w = np.polynomial.legendre.leggauss(order)
    edges = radius * np.sin(0.5 * np.pi * np.arange(panels + 1) / panels)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def periodic_angles(count):
    """Trapezoid rule on the circle; exact for trigonometric polynomials of degree < count."""
    angles = 2.0 * np.pi * np.arange(count) / count
    return angles, np.full(count, 2.0 * np.pi / count)


def midpoint_rule(lo, hi, count):
    step = (hi - lo) / count
    return lo + (np.arange(count) + 0.5) * step, np.full(count, step)


def tensor_rule(rules):
    """Tensor product of 1D (nodes, weights) pairs; returns (m, dim) nodes and (m,) weights."""
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    return nodes, weights


def polar_disc_rule(center, radius, panels, order, angular):
    """Polar Gauss rule on a disc: Gauss-Legendre in r (Jacobian r) times trapezoid in angle."""
    r, wr = radial_panels(radius, panels, order)
    theta, wt = periodic_angles(angular)
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    wrr, wtt = np.meshgrid(wr * r, wt, indexing="ij")
    nodes = np.stack([rr.ravel() * np.cos(tt.ravel()), rr.ravel() * np.sin(tt.ravel())], axis=1)
    return nodes + np.asarray(center, dtype=float)[None, :], (wrr * wtt).ravel()


def as_points(x, dim):
    """Coerce scalars, 1D arrays or (m, dim) arrays to an (m, dim) float array."""
    pts = np.asarray(x, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(1, dim)
    if pts.shape[1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {pts.shape}")
    return pts


def evaluate_chunked(func, points, chunk=None, workers=None):
    """Apply `func` to consecutive row blocks of `points` and concatenate in input order.

    Blocks may run on a thread pool; the result only depends on `points`.
    """
    chunk = chunk or approx_setting("CHUNK_SIZE")
    workers = workers if workers is not None else approx_setting("WORKERS")
    blocks = [points[i:i + chunk] for i in range(0, len(points), chunk)] or [points]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(func, blocks))
    else:
        parts = [func(block) for block in blocks]
    return np.concatenate(parts)


def rows_per_chunk(width):
    """Number of rows of a dense (rows x width) block that fits the configured chunk size."""
    return max(1, approx_setting("CHUNK_SIZE") // max(1, width))
