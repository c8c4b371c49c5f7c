"""Densities, envelope, mixture weights and acceptance rates.

Everything here is a pure function of its arguments. Functions that take only
``delta`` work on the standardized scale (beta = 1); divide standardized X by
beta to return to original units.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .quadrature import DEFAULT_SETTINGS, QuadratureSettings, integrate

__all__ = [
    "Algorithm",
    "BecParams",
    "EnvelopeConfig",
    "QuadratureSettings",
    "Route",
    "DEFAULT_C",
    "UPPER_LIMIT",
    "unnormalized_density",
    "marginal_x_unnormalized",
    "conditional_y_rate",
    "envelope_g",
    "mixture_weights",
    "g1_cdf",
    "g1_inverse_cdf",
    "tail_integral",
    "acceptance_rate_a",
    "acceptance_rate_b",
    "acceptance_rate_c",
    "proposition_lower_bound",
    "normalizing_constant",
    "choose_algorithm",
]

DEFAULT_C = 0.7

# exp(-746) underflows to zero in double precision.
UPPER_LIMIT = 746.0

# Below this value of delta*c, log1p(delta*c)/delta is replaced by its series.
_SERIES_CUTOFF = 1e-8


class Algorithm(str, enum.Enum):
    A = "a"
    B = "b"
    C = "c"
    AUTO = "auto"


class Route(NamedTuple):
    """Concrete sampler choice: the algorithm and, for B, its split point."""

    algorithm: Algorithm
    c: float | None


def _check_real(name, value, *, positive=False):
    value = float(value)
    if math.isnan(value) or math.isinf(value):
        raise DomainError(f"{name} must be finite, got {value}")
    if positive and not value > 0:
        raise DomainError(f"{name} must be > 0, got {value}")
    if not positive and value < 0:
        raise DomainError(f"{name} must be >= 0, got {value}")
    return value


@dataclass(frozen=True)
class BecParams:
    """Parameters of f(x, y) = exp(-(beta x + gamma y + delta beta gamma x y))."""

    beta: float
    gamma: float
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "beta", _check_real("beta", self.beta, positive=True))
        object.__setattr__(self, "gamma", _check_real("gamma", self.gamma, positive=True))
        object.__setattr__(self, "delta", _check_real("delta", self.delta))


@dataclass(frozen=True)
class EnvelopeConfig:
    """Split point ``c`` and the masses of the two envelope components.

    ``d1`` is the mass of the bounded piece (1 + delta x)^-1 on (0, c) and
    ``d2`` the mass of the exponential tail on [c, inf).
    """

    delta: float
    c: float
    d1: float
    d2: float

    @property
    def total_mass(self) -> float:
        return self.d1 + self.d2

    @property
    def threshold(self) -> float:
        """Probability of drawing from the bounded component."""
        return self.d1 / (self.d1 + self.d2)


def unnormalized_density(params: BecParams, x: float, y: float) -> float:
    x = _check_real("x", x)
    y = _check_real("y", y)
    b, g, d = params.beta, params.gamma, params.delta
    return math.exp(-(b * x + g * y + d * b * g * x * y))


def marginal_x_unnormalized(delta: float, x: float) -> float:
    """Standardized marginal of X: exp(-x) / (1 + delta x)."""
    delta = _check_real("delta", delta)
    x = _check_real("x", x)
    return math.exp(-x) / (1.0 + delta * x)


def conditional_y_rate(params: BecParams, x: float) -> float:
    """Rate of the exponential law of Y given X = x (x in original units)."""
    x = _check_real("x", x)
    return params.gamma * (1.0 + params.delta * params.beta * x)


def envelope_g(delta: float, c: float, x: float) -> float:
    delta = _check_real("delta", delta)
    c = _check_real("c", c)
    x = _check_real("x", x)
    if x < c:
        return 1.0 / (1.0 + delta * x)
    return math.exp(-x) / (1.0 + delta * c)


def _d1(delta: float, c: float) -> float:
    dc = delta * c
    if dc < _SERIES_CUTOFF:
        return c * (1.0 - 0.5 * dc)
    return math.log1p(dc) / delta


@lru_cache(maxsize=256)
def mixture_weights(delta: float, c: float) -> EnvelopeConfig:
    delta = _check_real("delta", delta)
    c = _check_real("c", c)
    return EnvelopeConfig(delta=delta, c=c, d1=_d1(delta, c), d2=math.exp(-c) / (1.0 + delta * c))


def g1_cdf(delta: float, c: float, x: float) -> float:
    """CDF of the normalized bounded component, log(1 + delta x) / log(1 + delta c)."""
    delta = _check_real("delta", delta, positive=True)
    c = _check_real("c", c, positive=True)
    x = _check_real("x", x)
    if x >= c:
        return 1.0
    return math.log1p(delta * x) / math.log1p(delta * c)


def g1_inverse_cdf(delta: float, c: float, u: float) -> float:
    """Inverse CDF of the bounded component: ((1 + c delta)^u - 1) / delta."""
    delta = _check_real("delta", delta, positive=True)
    c = _check_real("c", c, positive=True)
    if not 0.0 < u < 1.0:
        raise DomainError(f"u must lie in (0, 1), got {u}")
    return math.expm1(u * math.log1p(c * delta)) / delta


@lru_cache(maxsize=1024)
def _tail_integral(delta: float, settings: QuadratureSettings) -> float:
    if delta == 0.0:
        return 1.0
    # Seed a breakpoint at the integrand's inner scale 1/delta.
    knee = 1.0 / delta
    result = integrate(
        lambda x: np.exp(-x) / (1.0 + delta * x),
        0.0,
        UPPER_LIMIT,
        settings,
        breakpoints=(knee,) if knee < UPPER_LIMIT else (),
    )
    return result.value


def tail_integral(delta: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Integral of exp(-x) / (1 + delta x) over (0, inf)."""
    return _tail_integral(_check_real("delta", delta), settings)


def acceptance_rate_a(delta: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Acceptance rate of the product-exponential envelope."""
    return tail_integral(delta, settings)


# Algorithm C shares the exponential envelope for X, hence the same rate.
acceptance_rate_c = acceptance_rate_a


def acceptance_rate_b(delta: float, c: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Acceptance rate of the two-piece envelope with split point ``c``.

    At delta = 0 the continuous limit 1 / (c + exp(-c)) is returned. ``c = 0``
    is accepted and gives the exponential-envelope rate.
    """
    delta = _check_real("delta", delta)
    c = _check_real("c", c)
    if delta == 0.0:
        return 1.0 / (c + math.exp(-c))
    return tail_integral(delta, settings) / mixture_weights(delta, c).total_mass


def proposition_lower_bound(c: float) -> float:
    """Lower bound (e^c + 1/c)^-1 on the two-piece rate, valid for every delta > 0."""
    c = _check_real("c", c, positive=True)
    return 1.0 / (math.exp(c) + 1.0 / c)


def normalizing_constant(params: BecParams, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Total mass of the unnormalized density over the positive quadrant."""
    return tail_integral(params.delta, settings) / (params.beta * params.gamma)


def choose_algorithm(delta: float) -> Route:
    """Exponential envelope for delta < 1, otherwise the two-piece envelope at c = 0.7."""
    delta = _check_real("delta", delta)
    if delta < 1.0:
        return Route(Algorithm.C, None)
    return Route(Algorithm.B, DEFAULT_C)
