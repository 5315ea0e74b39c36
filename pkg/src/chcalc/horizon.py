"""Closed-form sample-complexity bounds and the critical horizon.

All quantities are evaluated in log space so that attenuation over gaps up
to 1e4 steps never underflows to a hard zero; bounds that exceed float
range come back as +inf rather than garbage.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

from .errors import InvalidArgument

_LOG_FLOAT_MAX = math.log(sys.float_info.max)

REGIME_DECAYED = "DECAYED"
REGIME_SEPARATED = "SEPARATED"


@dataclass(frozen=True)
class HorizonParams:
    """Bundle (n, delta2, epsilon, eta) feeding every bound.

    n is the outcome-sample budget, delta2 the chi-squared separation of the
    hypotheses at the tested step, epsilon the target total testing error,
    and eta the per-step contraction rate.
    """

    n: int
    delta2: float
    epsilon: float
    eta: float

    def __post_init__(self):
        if self.n < 1:
            raise InvalidArgument("n must be a positive integer")
        if not (self.delta2 > 0):
            raise InvalidArgument("delta2 must be positive")
        if not (0 < self.epsilon < 0.5):
            raise InvalidArgument("epsilon must lie in (0, 1/2)")
        if not (0 < self.eta < 1):
            raise InvalidArgument("eta must lie in (0,1)")


@dataclass(frozen=True)
class SampleBound:
    """A sample-complexity lower bound with its regime flag.

    In the SEPARATED regime (attenuated divergence above 1) the displayed
    bound is vacuous: O(1) samples already distinguish the hypotheses.
    ``log_bound`` is the natural log of the bound, always finite, for
    callers that compare bounds across large gaps.
    """

    bound: float
    regime: str
    log_bound: float


def _bound_from_log(log_bound: float) -> float:
    if log_bound > _LOG_FLOAT_MAX:
        return math.inf
    return math.exp(log_bound)


def sample_lb(params: HorizonParams, gap: int) -> SampleBound:
    """Lower bound (1-eps)^2 / (eta^gap * delta2) on the samples needed to
    test a hypothesis pair ``gap`` steps upstream of the observation."""
    if gap < 0:
        raise InvalidArgument("gap must be nonnegative")
    log_attenuated = gap * math.log(params.eta) + math.log(params.delta2)
    regime = REGIME_DECAYED if log_attenuated <= 0 else REGIME_SEPARATED
    log_bound = 2.0 * math.log1p(-params.epsilon) - log_attenuated
    return SampleBound(bound=_bound_from_log(log_bound), regime=regime, log_bound=log_bound)


def critical_horizon(params: HorizonParams) -> float:
    """Largest gap at which the sample budget still permits testing at
    error epsilon: max(0, ln(n*delta2/(1-eps)^2) / ln(1/eta)).

    Returned as a real; callers floor when they need a step index.
    """
    numerator = (
        math.log(params.n) + math.log(params.delta2) - 2.0 * math.log1p(-params.epsilon)
    )
    return max(0.0, numerator / math.log(1.0 / params.eta))


def critical_horizon_simplified(n: float, delta2: float, eta: float) -> float:
    """The epsilon-free form max(0, ln(n*delta2) / ln(1/eta))."""
    if not (n > 0 and delta2 > 0):
        raise InvalidArgument("n and delta2 must be positive")
    if not (0 < eta < 1):
        raise InvalidArgument("eta must lie in (0,1)")
    return max(0.0, (math.log(n) + math.log(delta2)) / math.log(1.0 / eta))


def minimax_error_lb(params: HorizonParams, gap: int) -> float:
    """Floor on the minimax testing error with n samples at the given gap:
    (1 - sqrt(((1 + eta^gap*delta2)^n - 1) / 2)) / 2, clamped to [0, 1/2]."""
    if gap < 0:
        raise InvalidArgument("gap must be nonnegative")
    attenuated = math.exp(gap * math.log(params.eta) + math.log(params.delta2))
    exponent = params.n * math.log1p(attenuated)
    if exponent > _LOG_FLOAT_MAX:
        return 0.0
    tensorized = math.expm1(exponent)
    return max(0.0, 0.5 * (1.0 - math.sqrt(tensorized / 2.0)))


def sample_cap_for_error(params: HorizonParams, gap: int) -> float:
    """Any n at or below ln(1 + 2(1-2eps)^2) / (eta^gap * delta2) forces
    minimax error at least epsilon."""
    if gap < 0:
        raise InvalidArgument("gap must be nonnegative")
    log_numer = math.log1p(2.0 * (1.0 - 2.0 * params.epsilon) ** 2)
    log_cap = math.log(log_numer) - gap * math.log(params.eta) - math.log(params.delta2)
    return _bound_from_log(log_cap)


def approx_lumpability_tv(
    eta: float,
    delta2: float,
    gap: int,
    delta_step: float,
    epsilon: float,
) -> tuple[float, float]:
    """Outcome TV bound under approximately Markov abstraction, and the
    implied sample lower bound.

    A per-step abstraction discrepancy of delta_step (in TV) adds
    2 * gap * delta_step on top of the decayed signal term
    sqrt(eta^gap * delta2 / 2). Returns (tv_bound, n_lb) where testing at
    minimax error epsilon needs n >= (1 - 2*epsilon) / tv_bound.
    """
    if not (0 < eta < 1):
        raise InvalidArgument("eta must lie in (0,1)")
    if not (delta2 > 0):
        raise InvalidArgument("delta2 must be positive")
    if gap < 0:
        raise InvalidArgument("gap must be nonnegative")
    if delta_step < 0:
        raise InvalidArgument("delta_step must be nonnegative")
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must lie in (0, 1/2)")
    signal = math.sqrt(math.exp(gap * math.log(eta)) * delta2 / 2.0)
    tv_bound = min(1.0, signal + 2.0 * gap * delta_step)
    n_lb = math.inf if tv_bound == 0 else (1.0 - 2.0 * epsilon) / tv_bound
    return tv_bound, n_lb


def noisy_outcome_adjust(params: HorizonParams, eta_g: float) -> float:
    """Critical horizon when the terminal observation itself is a noisy
    channel with contraction eta_g: shortened by ln(1/eta_g)/ln(1/eta)."""
    if not (0 < eta_g <= 1):
        raise InvalidArgument("eta_g must lie in (0, 1]")
    shrink = math.log(1.0 / eta_g) / math.log(1.0 / params.eta)
    return max(0.0, critical_horizon(params) - shrink)


def achievability_n(eta: float, delta2: float, gap: int, p0: float) -> float:
    """Samples at which a likelihood-ratio test on a Bernoulli outcome pair
    succeeds, matching the lower bound up to constants.

    The pair is (p0, p0 + delta) with delta = sqrt(eta^gap * delta2); the
    returned n is the reciprocal of its chi-squared divergence,
    p1*(1-p1) / (eta^gap * delta2). In the SEPARATED regime
    (eta^gap * delta2 > 1) a constant 1.0 is returned; delta2 = 0 returns
    +inf (the hypotheses are indistinguishable).
    """
    if not (0 < eta < 1):
        raise InvalidArgument("eta must lie in (0,1)")
    if delta2 < 0:
        raise InvalidArgument("delta2 must be nonnegative")
    if gap < 0:
        raise InvalidArgument("gap must be nonnegative")
    if not (0 < p0 < 1):
        raise InvalidArgument("p0 must lie in (0,1)")
    if delta2 == 0:
        return math.inf
    attenuated = math.exp(gap * math.log(eta) + math.log(delta2))
    if attenuated > 1.0:
        return 1.0
    p1 = p0 + math.sqrt(attenuated)
    if not (0 < p1 < 1):
        raise InvalidArgument(f"shifted parameter p1={p1!r} must lie in (0,1)")
    chi2_bernoulli = attenuated * (1.0 / p1 + 1.0 / (1.0 - p1))
    return 1.0 / chi2_bernoulli
