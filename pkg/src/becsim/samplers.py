"""Rejection samplers A, B and C for the BEC distribution.

Each sampler draws uniforms from a :class:`UniformSource` in a fixed order,
so a given seed always produces the same pairs:

* A: u1, u2, u3 per proposal.
* B: u0, u1, u2 per proposal, then u3 once a proposal is accepted.
* C: u1, u2 per proposal, then u3 once a proposal is accepted.
"""

from __future__ import annotations

import math
import secrets
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Optional

import numpy as np

from .core_math import DEFAULT_C, Algorithm, BecParams, choose_algorithm, mixture_weights
from .errors import DomainError, RunawayError

DEFAULT_MAX_TRIALS = 10**9

_UINT64_MAX = 2**64 - 1
# 52 random bits mapped to (k + 1/2) 2^-52: strictly inside (0, 1).
_SCALE = 2.0**-52
_BLOCK = 4096


class UniformSource:
    """Seedable stream of uniforms strictly inside (0, 1).

    Each uniform consumes exactly one 64-bit PCG64 output, so the stream is
    independent of internal buffering.
    """

    def __init__(self, seed: int | None = None):
        if seed is None:
            seed = secrets.randbits(64)
        if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= _UINT64_MAX:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
        self.seed = int(seed)
        self._bitgen = np.random.PCG64(self.seed)
        self._buf: list[float] = []
        self._pos = 0

    def __repr__(self):
        return f"UniformSource(seed={self.seed})"

    def _refill(self):
        raw = self._bitgen.random_raw(_BLOCK) >> np.uint64(12)
        self._buf = ((raw.astype(np.float64) + 0.5) * _SCALE).tolist()
        self._pos = 0

    def uniform(self) -> float:
        if self._pos >= len(self._buf):
            self._refill()
        u = self._buf[self._pos]
        self._pos += 1
        return u

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)])

    def spawn_seeds(self, k: int) -> list[int]:
        """Derive ``k`` independent child seeds from this source's seed."""
        children = np.random.SeedSequence(self.seed).spawn(k)
        return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


class SamplePair(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class DrawStats:
    proposals: int
    accepted: int

    @property
    def acceptance_fraction(self) -> float:
        return self.accepted / self.proposals if self.proposals else float("nan")

    @property
    def mean_trials(self) -> float:
        return self.proposals / self.accepted if self.accepted else float("nan")


# A proposal returns the standardized pair (beta X, gamma Y) or None on rejection.
Proposal = Callable[[Callable[[], float]], Optional[tuple]]


def _propose_a(delta: float) -> Proposal:
    log, exp = math.log, math.exp

    def propose(uniform):
        x = -log(uniform())
        y = -log(uniform())
        if uniform() <= exp(-delta * x * y):
            return x, y
        return None

    return propose


@dataclass(frozen=True)
class _BTables:
    delta: float
    c: float
    threshold: float
    log1p_cd: float
    one_plus_cd: float


@lru_cache(maxsize=256)
def _b_tables(delta: float, c: float) -> _BTables:
    env = mixture_weights(delta, c)
    return _BTables(delta, c, env.threshold, math.log1p(c * delta), 1.0 + delta * c)


def _propose_b(delta: float, c: float) -> Proposal:
    if not delta > 0:
        raise DomainError("algorithm B needs delta > 0; use algorithm C at delta = 0")
    if not c > 0:
        raise DomainError("algorithm B needs c > 0; use algorithm C for c = 0")
    t = _b_tables(delta, c)
    threshold, log1p_cd, one_plus_cd = t.threshold, t.log1p_cd, t.one_plus_cd
    log, exp, expm1 = math.log, math.exp, math.expm1

    def propose(uniform):
        u0 = uniform()
        u1 = uniform()
        u2 = uniform()
        if u0 < threshold:
            x = expm1(u1 * log1p_cd) / delta
            accept = u2 < exp(-x)
        else:
            # ties at u0 == threshold go to the exponential tail
            x = c - log(u1)
            accept = u2 < one_plus_cd / (1.0 + delta * x)
        if not accept:
            return None
        return x, -log(uniform()) / (1.0 + delta * x)

    return propose


def _propose_c(delta: float) -> Proposal:
    log = math.log

    def propose(uniform):
        x = -log(uniform())
        if uniform() < 1.0 / (1.0 + delta * x):
            return x, -log(uniform()) / (1.0 + delta * x)
        return None

    return propose


def proposal_for(params: BecParams, algorithm: Algorithm | str, c: float | None = None) -> Proposal:
    """Single-proposal step for ``algorithm``; AUTO is resolved via choose_algorithm."""
    algorithm = Algorithm(algorithm)
    if algorithm is Algorithm.AUTO:
        algorithm, c = choose_algorithm(params.delta)
    if algorithm is Algorithm.A:
        return _propose_a(params.delta)
    if algorithm is Algorithm.C:
        return _propose_c(params.delta)
    return _propose_b(params.delta, DEFAULT_C if c is None else float(c))


def _draw(params, propose, source, max_trials):
    uniform = source.uniform
    trials = 0
    while trials < max_trials:
        trials += 1
        pair = propose(uniform)
        if pair is not None:
            return SamplePair(pair[0] / params.beta, pair[1] / params.gamma), trials
    raise RunawayError(f"no acceptance after {max_trials} proposals (params={params})")


def sample_a(params: BecParams, source: UniformSource, max_trials: int = DEFAULT_MAX_TRIALS):
    """One draw from the product-exponential envelope; returns (pair, trials)."""
    return _draw(params, _propose_a(params.delta), source, max_trials)


def sample_b(params: BecParams, c: float, source: UniformSource, max_trials: int = DEFAULT_MAX_TRIALS):
    """One draw using the two-piece envelope split at ``c``; returns (pair, trials).

    Requires delta > 0 and c > 0.
    """
    return _draw(params, _propose_b(params.delta, float(c)), source, max_trials)


def sample_c(params: BecParams, source: UniformSource, max_trials: int = DEFAULT_MAX_TRIALS):
    """One draw from the exponential envelope on X; returns (pair, trials)."""
    return _draw(params, _propose_c(params.delta), source, max_trials)


def sample_auto(params: BecParams, source: UniformSource, max_trials: int = DEFAULT_MAX_TRIALS):
    route = choose_algorithm(params.delta)
    return _draw(params, proposal_for(params, route.algorithm, route.c), source, max_trials)


def sample_many(
    params: BecParams,
    n: int,
    algorithm: Algorithm | str = Algorithm.AUTO,
    source: UniformSource | None = None,
    c: float | None = None,
    max_trials: int = DEFAULT_MAX_TRIALS,
) -> tuple[list[SamplePair], DrawStats]:
    """Draw ``n`` pairs, returning them with aggregate proposal counts."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if source is None:
        raise DomainError("sample_many needs a uniform source")
    propose = proposal_for(params, algorithm, c)
    pairs = []
    proposals = 0
    for _ in range(int(n)):
        pair, trials = _draw(params, propose, source, max_trials)
        pairs.append(pair)
        proposals += trials
    return pairs, DrawStats(proposals=proposals, accepted=len(pairs))
