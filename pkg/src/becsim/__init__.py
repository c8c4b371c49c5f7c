"""Random variate generation for the bivariate exponential-conditionals law."""

from .core_math import (
    DEFAULT_C,
    Algorithm,
    BecParams,
    EnvelopeConfig,
    Route,
    acceptance_rate_a,
    acceptance_rate_b,
    acceptance_rate_c,
    choose_algorithm,
    conditional_y_rate,
    envelope_g,
    g1_cdf,
    g1_inverse_cdf,
    marginal_x_unnormalized,
    mixture_weights,
    normalizing_constant,
    proposition_lower_bound,
    tail_integral,
    unnormalized_density,
)
from .errors import BecError, ConfigurationError, DomainError, QuadratureError, RunawayError
from .quadrature import QuadratureSettings
from .samplers import (
    DrawStats,
    SamplePair,
    UniformSource,
    sample_a,
    sample_auto,
    sample_b,
    sample_c,
    sample_many,
)

__version__ = "0.1.0"
