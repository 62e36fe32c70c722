"""Planar witnesses for completeness of products of harmonic functions.

Two experiments on the unit disc:

* products h_p h_q of harmonic polynomials of degree <= N are fitted to a
  target function by least squares, and the residual falls as N grows;
* the special solution exp(i theta.x), theta = (i sinh t, cosh t), is matched
  by plane waves with real directions. For t > 0 the coefficient norm needed
  for a residual eps grows without bound as eps shrinks.

The second experiment lives on the circle of directions in the plane rather
than on the sphere in space; the mechanism (an exponentially growing target
against uniformly bounded superpositions) is the same in any dimension.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from scipy.optimize import brentq

from .exceptions import ConfigurationError, DomainError, InfeasibleError
from .quadrature import approx_setting

logger = logging.getLogger(__name__)

WELL_CONDITIONED = 1e8


@dataclass(frozen=True)
class HarmonicBasis2D:
    """{1} and Re/Im of (x1 + i x2)^k for 1 <= k <= degree."""

    degree: int

    def __post_init__(self):
        if int(self.degree) != self.degree or self.degree < 0:
            raise DomainError(f"degree must be a nonnegative integer, got {self.degree}")

    @property
    def labels(self):
        names = ["1"]
        for k in range(1, self.degree + 1):
            names += [f"Re z^{k}", f"Im z^{k}"]
        return tuple(names)

    def __len__(self):
        return 2 * self.degree + 1

    def evaluate(self, points):
        """(m, 2N+1) matrix of basis values at the points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        z = pts[:, 0] + 1j * pts[:, 1]
        columns = [np.ones(len(pts))]
        power = np.ones(len(pts), dtype=complex)
        for _ in range(self.degree):
            power = power * z
            columns += [power.real, power.imag]
        return np.stack(columns, axis=1)


def harmonic_basis(degree):
    return HarmonicBasis2D(degree)


def fornberg_weights(nodes, x0, order):
    """Finite-difference weights for the `order`-th derivative at x0 on arbitrary nodes."""
    x = np.asarray(nodes, dtype=float)
    c = np.zeros((x.size, order + 1))
    c[0, 0] = 1.0
    c1, c4 = 1.0, x[0] - x0
    for i in range(1, x.size):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, order]


def discrete_laplacian(func, points, step, half_width):
    """Centered stencil Laplacian with 2*half_width+1 points per axis.

    Returns the stencil values and the scale sum |w_k| * |f| used to make
    residuals relative.
    """
    offsets = step * np.arange(-half_width, half_width + 1)
    weights = fornberg_weights(offsets, 0.0, 2)
    pts = np.atleast_2d(points)
    total = np.zeros(len(pts))
    scale = np.zeros(len(pts))
    for axis in range(2):
        shift = np.zeros(2)
        for offset, weight in zip(offsets, weights):
            shift[axis] = offset
            values = func(pts + shift)
            total = total + weight * values
            scale = scale + abs(weight) * np.abs(values)
    return total, scale


def harmonicity_residuals(basis, points, step=0.05):
    """Relative discrete-Laplacian residual of each basis element."""
    half_width = max(1, (basis.degree + 2) // 2)
    residuals = []
    for col in range(len(basis)):
        lap, scale = discrete_laplacian(lambda p: basis.evaluate(p)[:, col], points, step, half_width)
        residuals.append(float(np.max(np.abs(lap)) / max(np.max(scale), 1e-300)))
    return residuals


def domain_rule(kind="disc", n_r=40, n_theta=80, inner=0.5):
    """Polar Gauss rule on the unit disc or the annulus inner <= |x| <= 1."""
    lo = 0.0 if kind == "disc" else inner
    if kind not in ("disc", "annulus"):
        raise ConfigurationError(f"unknown domain {kind!r}")
    if kind == "annulus" and not 0 < inner < 1:
        raise ConfigurationError(f"annulus inner radius must lie in (0, 1), got {inner}")
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = lo + (1 - lo) * (x + 1) / 2
    wr = w * (1 - lo) / 2 * r
    theta = 2 * math.pi * np.arange(n_theta) / n_theta
    rr, tt = np.meshgrid(r, theta, indexing="ij")
    ww = np.repeat(wr, n_theta) * (2 * math.pi / n_theta)
    nodes = np.stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()], axis=1)
    return nodes, ww


def product_dictionary(basis, points):
    """Columns h_p h_q for p <= q; the only constant column is 1 * 1."""
    values = basis.evaluate(points)
    labels, columns = [], []
    for p in range(len(basis)):
        for q in range(p, len(basis)):
            labels.append(f"({basis.labels[p]})*({basis.labels[q]})")
            columns.append(values[:, p] * values[:, q])
    return labels, np.stack(columns, axis=1)


@dataclass(frozen=True)
class ProductFit:
    degree: int
    columns: int
    rank: int
    solver: str
    residual: float


def _weighted_lstsq(matrix, rhs):
    """Least squares by regularized normal equations, or truncated SVD on rank collapse."""
    u, s, vh = linalg.svd(matrix, full_matrices=False)
    rcond = approx_setting("SVD_RCOND")
    rank = int(np.sum(s > rcond * s[0])) if s.size and s[0] > 0 else 0
    if rank == s.size and s[0] / s[-1] < WELL_CONDITIONED:
        gram = matrix.T @ matrix + (1e-14 * s[0] ** 2) * np.eye(s.size)
        coeff = linalg.cho_solve(linalg.cho_factor(gram), matrix.T @ rhs)
        return coeff, rank, "normal-equations"
    logger.warning("rank collapse: effective rank %d of %d, using truncated SVD", rank, s.size)
    beta = u[:, :rank].T @ rhs
    return vh[:rank].T @ (beta / s[:rank]), rank, "truncated-svd"


def approximate_by_products(values, rule, degrees):
    """Relative L2(D) residual of the best product fit for each degree."""
    nodes, weights = rule
    values = np.asarray(values, dtype=float)
    if values.shape != (len(nodes),) or not np.all(np.isfinite(values)):
        raise ConfigurationError("target values must be finite and given at every domain node")
    root = np.sqrt(weights)
    rhs = root * values
    norm = np.linalg.norm(rhs)
    if norm == 0:
        raise DomainError("target function vanishes on the domain")
    fits = []
    for degree in degrees:
        basis = harmonic_basis(degree)
        _, matrix = product_dictionary(basis, nodes)
        weighted = root[:, None] * matrix
        coeff, rank, solver = _weighted_lstsq(weighted, rhs)
        residual = float(np.linalg.norm(rhs - weighted @ coeff) / norm)
        fits.append(ProductFit(degree, matrix.shape[1], rank, solver, residual))
        logger.info("products N=%d: %d columns, rank %d (%s), residual %.3e", degree, matrix.shape[1], rank, solver, residual)
    return fits


@dataclass(frozen=True)
class ComplexDirection:
    """theta = (i sinh t, cosh t), so theta.theta = cosh^2 - sinh^2 = 1."""

    t: float

    def __post_init__(self):
        if not (self.t >= 0 and math.isfinite(self.t)):
            raise DomainError(f"t must be finite and nonnegative, got {self.t}")

    @property
    def theta(self):
        return np.array([1j * math.sinh(self.t), math.cosh(self.t) + 0j])

    def dot_self(self):
        theta = self.theta
        return complex(theta @ theta)

    def special_solution(self, points):
        pts = np.atleast_2d(points)
        return np.exp(1j * (pts @ self.theta))


@dataclass(frozen=True, eq=False)
class LeastSquaresSolution:
    target: float
    coefficients: np.ndarray = field(repr=False)
    residual: float
    coeff_norm: float
    feasible: bool = True


@dataclass(frozen=True, eq=False)
class HerglotzMatch:
    direction: ComplexDirection
    n_alpha: int
    solutions: tuple
    tradeoff: tuple

    def norms(self):
        return [s.coeff_norm for s in self.solutions if s.feasible]


def plane_wave_matrix(points, n_alpha):
    angles = 2 * math.pi * np.arange(n_alpha) / n_alpha
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=1)
    return np.exp(1j * np.asarray(points) @ directions.T) * (2 * math.pi / n_alpha)


def coefficient_norm(coefficients, n_alpha):
    """Discrete L2(S^1) norm of the density."""
    return float(np.sqrt(np.sum(np.abs(coefficients) ** 2) * 2 * math.pi / n_alpha))


def plane_wave_density(direction, n_alpha):
    """Exact nodal density for a real direction lying on the angular grid."""
    if direction.t != 0:
        raise DomainError("only real directions are plane waves")
    index = n_alpha / 4
    if index != int(index):
        raise ConfigurationError(f"direction (0, 1) is not on a grid of {n_alpha} angles")
    density = np.zeros(n_alpha, dtype=complex)
    density[int(index)] = n_alpha / (2 * math.pi)
    return density


def _residual_curve(s, beta, outside2):
    def residual2(lam):
        factor = lam / (s ** 2 + lam)
        return float(np.sum((factor * np.abs(beta)) ** 2) + outside2)

    return residual2


def herglotz_match(direction, n_alpha, targets, rule=None):
    """Minimum-norm plane-wave densities for each target relative residual.

    For a target eps the density minimizing the norm subject to residual <= eps
    is the Tikhonov solution whose residual is exactly eps; its parameter is
    found by root finding on the SVD filter factors. Targets below the best
    residual reachable with n_alpha directions are reported infeasible.
    The truncated-SVD path is returned as the residual/norm trade-off curve.
    """
    targets = [float(eps) for eps in targets]
    if any(eps <= 0 for eps in targets):
        raise DomainError("target residuals must be positive")
    if any(b >= a for a, b in zip(targets, targets[1:])):
        raise ConfigurationError("target residuals must be strictly decreasing")
    nodes, weights = rule or domain_rule("disc")
    root = np.sqrt(weights)
    matrix = root[:, None] * plane_wave_matrix(nodes, n_alpha)
    rhs = root * direction.special_solution(nodes)
    norm = np.linalg.norm(rhs)

    u, s, vh = linalg.svd(matrix, full_matrices=False)
    rank = int(np.sum(s > approx_setting("SVD_RCOND") * s[0]))
    u, s, vh = u[:, :rank], s[:rank], vh[:rank]
    beta = u.conj().T @ rhs
    outside2 = max(float(norm ** 2 - np.sum(np.abs(beta) ** 2)), 0.0)
    residual2 = _residual_curve(s, beta, outside2)

    tradeoff = []
    for k in range(1, rank + 1):
        coeff = vh[:k].conj().T @ (beta[:k] / s[:k])
        tail = float(np.sum(np.abs(beta[k:]) ** 2) + outside2)
        tradeoff.append((math.sqrt(tail) / norm, coefficient_norm(coeff, n_alpha)))

    lam_lo, lam_hi = (s[-1] ** 2) * 1e-6, (s[0] ** 2) * 1e6
    floor = math.sqrt(residual2(lam_lo)) / norm
    solutions = []
    for eps in targets:
        if eps >= 1:
            solutions.append(LeastSquaresSolution(eps, np.zeros(n_alpha, dtype=complex), 1.0, 0.0))
            continue
        if floor > eps:
            logger.warning(
                "t=%g: residual %.3g unreachable with %d directions (best %.3g)",
                direction.t, eps, n_alpha, floor,
            )
            solutions.append(LeastSquaresSolution(eps, np.zeros(n_alpha, dtype=complex), floor, math.nan, False))
            continue
        goal = (eps * norm) ** 2
        log_lam = brentq(lambda v: residual2(math.exp(v)) - goal, math.log(lam_lo), math.log(lam_hi), xtol=1e-14, rtol=1e-14)
        lam = math.exp(log_lam)
        coeff = vh.conj().T @ (s / (s ** 2 + lam) * beta)
        checked = float(np.linalg.norm(rhs - matrix @ coeff) / norm)
        if checked > eps * (1 + 1e-6):
            raise InfeasibleError(f"t={direction.t}: solution misses its residual target ({checked:.3g} > {eps:.3g})")
        solutions.append(LeastSquaresSolution(eps, coeff, checked, coefficient_norm(coeff, n_alpha)))
        logger.debug("t=%g eps=%.3g: lambda %.3g, norm %.6g", direction.t, eps, lam, solutions[-1].coeff_norm)
    return HerglotzMatch(direction, n_alpha, tuple(solutions), tuple(tradeoff))


@dataclass(frozen=True)
class BlowupRow:
    t: float
    target: float
    residual: float
    coeff_norm: float
    feasible: bool


def blowup_study(t_values, targets, n_alpha=64, rule=None):
    rule = rule or domain_rule("disc")
    rows = []
    for t in t_values:
        match = herglotz_match(ComplexDirection(t), n_alpha, targets, rule)
        rows.extend(
            BlowupRow(t, sol.target, sol.residual, sol.coeff_norm, sol.feasible)
            for sol in match.solutions
        )
    return rows
