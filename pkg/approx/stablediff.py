"""Stable differentiation of noisy periodic samples by central differences.

The stepsize plays the part of the regularization parameter: it is chosen
from the noise level and the smoothness class, snapped to the sample grid,
and the guaranteed sup-norm error is always reported at the step actually
used.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

GRID_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class SampledSignal:
    values: np.ndarray
    x0: float
    dx: float
    period: float
    delta: float = 0.0

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size == 0:
            raise DomainError("signal has no samples")
        if not np.all(np.isfinite(values)):
            raise DomainError("signal contains non-finite samples")
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx}")
        if self.delta < 0:
            raise DomainError(f"delta must be nonnegative, got {self.delta}")
        if abs(self.period - values.size * self.dx) > GRID_TOLERANCE * self.period:
            raise DomainError(
                f"period {self.period!r} does not equal {values.size} samples x dx {self.dx!r}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, func, n, period=2 * math.pi, x0=0.0, delta=0.0):
        dx = period / n
        return cls(func(x0 + dx * np.arange(n)), x0=x0, dx=dx, period=period, delta=delta)

    def __len__(self):
        return self.values.size

    @property
    def grid(self):
        return self.x0 + self.dx * np.arange(self.values.size)

    def index_of(self, x):
        """Grid index of `x`, wrapped periodically. Off-grid abscissae are refused."""
        k = (x - self.x0) / self.dx
        nearest = round(k)
        if abs(k - nearest) > GRID_TOLERANCE * max(1.0, abs(k)):
            raise DomainError(f"x={x!r} is not on the sample grid")
        return int(nearest) % self.values.size

    def at(self, x):
        return float(self.values[self.index_of(x)])

    def with_values(self, values, delta=None):
        return SampledSignal(
            values, x0=self.x0, dx=self.dx, period=self.period,
            delta=self.delta if delta is None else delta,
        )


@dataclass(frozen=True)
class SmoothnessClass:
    """Hoelder class of order j = 1 + a with norm bound mj."""

    j: float
    mj: float

    def __post_init__(self):
        if not self.j > 1:
            raise DomainError(
                f"j={self.j}: no stable estimator of f' exists for j <= 1 "
                "(the worst-case error does not vanish with the noise level)"
            )
        if self.j > 2:
            raise DomainError(f"j={self.j}: only 1 < j <= 2 is supported by central differences")
        if not (self.mj > 0 and math.isfinite(self.mj)):
            raise DomainError(f"mj must be finite and positive, got {self.mj}")


@dataclass(frozen=True, eq=False)
class DiffReport:
    derivative: np.ndarray
    h_used: float
    h_ideal: float
    bound: float
    snapping_slack: float
    steps: int


def _require_delta(delta):
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")


def optimal_step(delta, cls):
    _require_delta(delta)
    if cls.j == 2:
        return math.sqrt(2 * delta / cls.mj)
    return (delta / (cls.mj * (cls.j - 1))) ** (1 / cls.j)


def error_bound(delta, cls):
    _require_delta(delta)
    if cls.j == 2:
        return math.sqrt(2 * cls.mj * delta)
    j = cls.j
    c = j * cls.mj ** (1 / j) / (j - 1) ** ((j - 1) / j)
    return c * delta ** ((j - 1) / j)


def bound_at(h, delta, cls):
    """Guaranteed sup-norm error of the central difference with step h."""
    if cls.j == 2:
        return delta / h + cls.mj * h / 2
    return delta / h + cls.mj * h ** (cls.j - 1)


def central_difference(signal, x, h):
    k = _grid_steps(signal, h)
    i = signal.index_of(x)
    n = len(signal)
    return (signal.values[(i + k) % n] - signal.values[(i - k) % n]) / (2 * h)


def central_difference_grid(signal, h):
    """Central difference with step h at every grid point (periodic wrap)."""
    k = _grid_steps(signal, h)
    return (np.roll(signal.values, -k) - np.roll(signal.values, k)) / (2 * h)


def _grid_steps(signal, h):
    if not h > 0:
        raise DomainError(f"step must be positive, got {h}")
    k = h / signal.dx
    steps = round(k)
    if steps < 1 or abs(k - steps) > GRID_TOLERANCE * k:
        raise DomainError(
            f"step {h!r} is not a positive multiple of dx={signal.dx!r}; "
            "interpolating between samples is not allowed"
        )
    return steps


def differentiate(signal, cls, step=None):
    """Approximate f' on the whole grid from the noisy samples.

    Without `step` the ideal step for (delta, cls) is snapped to the nearest
    positive multiple of dx; `step` overrides that and is also the only way
    to differentiate noise-free data.
    """
    if step is None:
        _require_delta(signal.delta)
        h_ideal = optimal_step(signal.delta, cls)
        if signal.dx > 2 * h_ideal:
            raise ConfigurationError(
                f"grid too coarse: ideal step {h_ideal:.6g} needs dx <= {2 * h_ideal:.6g}, "
                f"got dx={signal.dx:.6g}"
            )
        steps = max(1, round(h_ideal / signal.dx))
    else:
        h_ideal = optimal_step(signal.delta, cls) if signal.delta > 0 else step
        steps = _grid_steps(signal, step)
    h_used = steps * signal.dx
    if 2 * h_used >= signal.period:
        raise ConfigurationError(f"step {h_used:.6g} wraps past half a period")

    derivative = central_difference_grid(signal, h_used)
    bound = bound_at(h_used, signal.delta, cls)
    slack = bound - error_bound(signal.delta, cls) if signal.delta > 0 else 0.0
    logger.debug(
        "differentiate: h_ideal=%.6g h_used=%.6g (%d steps) bound=%.6g",
        h_ideal, h_used, steps, bound,
    )
    derivative.setflags(write=False)
    return DiffReport(derivative, h_used, h_ideal, bound, max(slack, 0.0), steps)


class AdversarialFunction:
    """f1(x) = -m x (x - 2h) / 2 on [0, 2h], continued to the whole line.

    Beyond the interval the parabola is reflected oddly about each endpoint
    for one further length h, then held constant:

        x in [-h, 0]:   f1(x) = -f1(-x)
        x in [2h, 3h]:  f1(x) = -f1(4h - x)
        x < -h, x > 3h: f1(x) = -m h^2 / 2

    The result is C^1 with f1'' piecewise constant in {-m, 0, m}, so the sup
    norms of f1, f1' and f1'' equal their values on [0, 2h]. The continuation
    is not unique; an even reflection at 0 would make f1 non-differentiable
    there.
    """

    def __init__(self, m, h, sign=1.0):
        self.m = m
        self.h = h
        self.sign = sign

    def _core(self, x):
        return -self.m * x * (x - 2 * self.h) / 2

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.reshape(-1)
        h = self.h
        floor = -self.m * h * h / 2
        out = np.full_like(x, floor)
        inner = (x >= 0) & (x <= 2 * h)
        left = (x >= -h) & (x < 0)
        right = (x > 2 * h) & (x <= 3 * h)
        out[inner] = self._core(x[inner])
        out[left] = -self._core(-x[left])
        out[right] = -self._core(4 * h - x[right])
        return self.sign * out.reshape(shape)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        shape = x.shape
        x = x.reshape(-1)
        h, m = self.h, self.m
        out = np.zeros_like(x)
        inner = (x >= 0) & (x <= 2 * h)
        left = (x >= -h) & (x < 0)
        right = (x > 2 * h) & (x <= 3 * h)
        out[inner] = -m * (x[inner] - h)
        out[left] = -m * (-x[left] - h)
        out[right] = -m * (4 * h - x[right] - h)
        return self.sign * out.reshape(shape)

    def __neg__(self):
        return AdversarialFunction(self.m, self.h, -self.sign)


def adversarial_pair(m, delta):
    if not (m > 0 and delta > 0):
        raise DomainError(f"m and delta must be positive, got m={m}, delta={delta}")
    h = math.sqrt(2 * delta / m)
    f1 = AdversarialFunction(m, h)
    return f1, -f1, h


def lower_bound_check(estimate_at_zero, m, delta):
    mh = m * math.sqrt(2 * delta / m)
    return max(abs(estimate_at_zero - mh), abs(estimate_at_zero + mh))


def minimax_error(m, delta):
    return math.sqrt(2 * delta * m)


@dataclass(frozen=True)
class SharpnessReport:
    estimate: float
    errors: tuple
    data_distance: tuple
    minimax: float

    @property
    def attained(self):
        return all(
            abs(err - self.minimax) <= 1e-12 * self.minimax for err in self.errors
        )


def sharpness_check(m, delta):
    """Apply the optimal central difference to f_delta = 0 and measure it on the adversarial pair.

    Both members of the pair are within delta of the zero data, so any
    estimator returns the same value for both; the central difference with
    h = sqrt(2 delta / m) attains the minimax error on each.
    """
    f1, f2, h = adversarial_pair(m, delta)
    grid = h * np.arange(-8, 8)
    zero = SampledSignal(np.zeros(grid.size), x0=float(grid[0]), dx=h, period=grid.size * h, delta=delta)
    estimate = central_difference(zero, 0.0, h)
    errors = tuple(abs(estimate - float(f.derivative(0.0))) for f in (f1, f2))
    line = np.linspace(-4 * h, 6 * h, 2001)
    distance = tuple(float(np.max(np.abs(f(line)))) for f in (f1, f2))
    return SharpnessReport(estimate, errors, distance, minimax_error(m, delta))


def nonexistence_gap(m, delta, j):
    """Minimax lower bound for j in {0, 1}, where no stable estimator exists.

    For j = 0 (only |f| <= m known) the bound sqrt(2 delta m) is unbounded as
    m grows at fixed delta. For j = 1 it equals m itself, independent of delta.
    """
    if j == 0:
        return math.sqrt(2 * delta * m)
    if j == 1:
        return float(m)
    raise DomainError(f"nonexistence only holds for j in {{0, 1}}, got {j}")
