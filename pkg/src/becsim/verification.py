"""Statistical and numerical checks of sampler output.

The exact exponential conditionals of the BEC law make the conditional
probability integral transform available in closed form, which gives
sharp distribution tests without any density estimation. Moment oracles
reduce to one-dimensional quadratures against the marginal of X.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .core_math import (
    DEFAULT_C,
    UPPER_LIMIT,
    Algorithm,
    BecParams,
    acceptance_rate_a,
    acceptance_rate_b,
    choose_algorithm,
    normalizing_constant,
    tail_integral,
)
from .errors import ConfigurationError, DomainError
from .quadrature import DEFAULT_SETTINGS, QuadratureSettings, integrate
from .samplers import SamplePair, UniformSource, proposal_for

# Asymptotic Kolmogorov critical coefficients c(alpha); reject when D > c/sqrt(n).
KS_COEFFICIENTS = {0.10: 1.224, 0.05: 1.358, 0.01: 1.628, 0.001: 1.949}

Axis = Literal["y_given_x", "x_given_y"]

# Below this delta the (1 - I)/(delta I) mean identity cancels badly.
_MEAN_IDENTITY_CUTOFF = 1e-4

GRID_MASS_FLOOR = 1.0 - 1e-6


@dataclass(frozen=True)
class RateEstimate:
    point: float
    standard_error: float
    n_proposals: int

    @classmethod
    def from_counts(cls, accepted: int, n_proposals: int) -> "RateEstimate":
        p = accepted / n_proposals
        return cls(p, math.sqrt(p * (1.0 - p) / n_proposals), n_proposals)

    def z_score(self, theoretical: float) -> float:
        """Deviation from ``theoretical`` in binomial standard errors at that rate."""
        se = math.sqrt(theoretical * (1.0 - theoretical) / self.n_proposals)
        if se == 0.0:
            return 0.0 if self.point == theoretical else math.inf
        return (self.point - theoretical) / se


@dataclass(frozen=True)
class GridSpec:
    x_max: float
    y_max: float
    cells_per_axis: int

    def __post_init__(self):
        if not (self.x_max > 0 and self.y_max > 0):
            raise ConfigurationError("grid extents must be positive")
        if int(self.cells_per_axis) != self.cells_per_axis or self.cells_per_axis < 1:
            raise ConfigurationError("cells_per_axis must be a positive integer")


def theoretical_rate(delta: float, algorithm: Algorithm | str, c: float | None = None,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.AUTO:
        algorithm, c = choose_algorithm(delta)
    if algorithm is Algorithm.B:
        return acceptance_rate_b(delta, DEFAULT_C if c is None else c, settings)
    return acceptance_rate_a(delta, settings)


def empirical_acceptance(
    params: BecParams,
    algorithm: Algorithm | str,
    c: float | None,
    n_proposals: int,
    source: UniformSource,
) -> RateEstimate:
    """Run exactly ``n_proposals`` proposals and count the accepted ones."""
    if n_proposals < 1000:
        raise DomainError(f"n_proposals must be at least 1000, got {n_proposals}")
    propose = proposal_for(params, algorithm, c)
    uniform = source.uniform
    accepted = 0
    for _ in range(int(n_proposals)):
        if propose(uniform) is not None:
            accepted += 1
    return RateEstimate.from_counts(accepted, int(n_proposals))


def as_arrays(pairs: Sequence[SamplePair] | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise DomainError("pairs must be a non-empty sequence of (x, y)")
    return arr[:, 0], arr[:, 1]


def pit_conditional(params: BecParams, pairs, axis: Axis = "y_given_x") -> np.ndarray:
    """Conditional probability integral transform of each pair.

    ``y_given_x`` maps (x, y) to 1 - exp(-gamma (1 + delta beta x) y); the
    ``x_given_y`` axis swaps the roles. Uses -expm1 to keep small values exact.
    """
    x, y = as_arrays(pairs)
    b, g, d = params.beta, params.gamma, params.delta
    if axis == "y_given_x":
        return -np.expm1(-g * (1.0 + d * b * x) * y)
    if axis == "x_given_y":
        return -np.expm1(-b * (1.0 + d * g * y) * x)
    raise DomainError(f"unknown axis {axis!r}")


def ks_uniform(values: Iterable[float]) -> float:
    """One-sample Kolmogorov-Smirnov distance to the uniform(0, 1) CDF."""
    v = np.sort(np.asarray(values if isinstance(values, np.ndarray) else list(values), dtype=float))
    n = v.size
    if n == 0:
        raise DomainError("need at least one value")
    if v[0] <= 0.0 or v[-1] >= 1.0:
        raise DomainError("values must lie strictly inside (0, 1)")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - v), np.max(v - (i - 1) / n)))


def ks_two_sample(a: Iterable[float], b: Iterable[float]) -> float:
    """Two-sample Kolmogorov-Smirnov distance between empirical CDFs."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise DomainError("both samples must be non-empty")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical(n: int, alpha: float = 0.01, m: int | None = None) -> float:
    """Asymptotic KS rejection threshold; pass ``m`` for the two-sample form."""
    try:
        coef = KS_COEFFICIENTS[alpha]
    except KeyError:
        raise DomainError(f"no tabulated KS coefficient for alpha={alpha}") from None
    eff = n if m is None else n * m / (n + m)
    return coef / math.sqrt(eff)


def mean_x_theoretical(delta: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Standardized mean of X (divide by beta for original units).

    Integrating x e^-x / (1 + delta x) by partial fractions gives
    E[X] = (1 - I) / (delta I) with I the acceptance integral.
    """
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    if delta == 0.0:
        return 1.0
    if delta < _MEAN_IDENTITY_CUTOFF:
        return mean_x_direct(delta, settings)
    i = tail_integral(delta, settings)
    return (1.0 - i) / (delta * i)


def mean_x_direct(delta: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Standardized mean of X by direct quadrature of x f_X(x)."""
    num = integrate(lambda x: x * np.exp(-x) / (1.0 + delta * x), 0.0, UPPER_LIMIT, settings).value
    return num / tail_integral(delta, settings)


def means_theoretical(params: BecParams, settings: QuadratureSettings = DEFAULT_SETTINGS) -> tuple[float, float]:
    """(E[X], E[Y]) in original units; the law is symmetric in standardized units."""
    m = mean_x_theoretical(params.delta, settings)
    return m / params.beta, m / params.gamma


def covariance_theoretical(params: BecParams, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    # E[Y | X] = 1 / (gamma (1 + delta beta x)), so E[XY] needs only the x marginal.
    d = params.delta
    if d == 0.0:
        return 0.0
    i = tail_integral(d, settings)
    exy = integrate(lambda x: x * np.exp(-x) / (1.0 + d * x) ** 2, 0.0, UPPER_LIMIT, settings).value / i
    m = mean_x_theoretical(d, settings)
    return (exy - m * m) / (params.beta * params.gamma)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(32)


def grid_cell_masses(params: BecParams, grid: GridSpec,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Probability of each grid cell under the normalized density.

    The y-integral of each cell is exact (exponential in y); the x-integral
    uses 32-point Gauss-Legendre per column. Returns shape (nx, ny).
    """
    k = int(grid.cells_per_axis)
    xe = np.linspace(0.0, grid.x_max, k + 1)
    ye = np.linspace(0.0, grid.y_max, k + 1)
    half = 0.5 * np.diff(xe)
    xs = (0.5 * (xe[:-1] + xe[1:]))[:, None] + half[:, None] * _GL_NODES[None, :]
    b, g, d = params.beta, params.gamma, params.delta
    rate = g * (1.0 + d * b * xs)
    # inner[i, j, m]: integral over y cell m at node j of column i
    ey = np.exp(-rate[:, :, None] * ye[None, None, :])
    inner = (ey[:, :, :-1] - ey[:, :, 1:]) / rate[:, :, None]
    weighted = np.exp(-b * xs)[:, :, None] * inner * _GL_WEIGHTS[None, :, None]
    masses = weighted.sum(axis=1) * half[:, None]
    return masses / normalizing_constant(params, settings)


def grid_density_check(params: BecParams, pairs, grid: GridSpec,
                       settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Total-variation distance between binned pairs and exact cell masses.

    Mass outside the grid and sample points outside it form one extra bin.
    Raises ConfigurationError if the grid misses more than 1e-6 of the mass.
    """
    masses = grid_cell_masses(params, grid, settings)
    inside = float(masses.sum())
    if inside < GRID_MASS_FLOOR:
        raise ConfigurationError(
            f"grid holds only {inside:.9f} of the mass; need at least {GRID_MASS_FLOOR}"
        )
    x, y = as_arrays(pairs)
    n = x.size
    k = int(grid.cells_per_axis)
    counts, _, _ = np.histogram2d(x, y, bins=k, range=[[0.0, grid.x_max], [0.0, grid.y_max]])
    emp = counts / n
    emp_out = 1.0 - emp.sum()
    return 0.5 * (float(np.abs(emp - masses).sum()) + abs(emp_out - max(0.0, 1.0 - inside)))


def expected_tv_bound(masses: np.ndarray, n: int) -> float:
    """Mean-absolute-deviation bound on the sampling TV for a multinomial with ``masses``.

    E|p_hat - p| <= sqrt(p (1 - p) / n) per cell.
    """
    p = np.asarray(masses, dtype=float).ravel()
    p = np.append(p, max(0.0, 1.0 - p.sum()))
    return 0.5 * float(np.sum(np.sqrt(p * (1.0 - p) / n)))
