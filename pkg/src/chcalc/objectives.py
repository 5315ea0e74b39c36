"""Additive vs. multiplicative objectives under the independent-steps model.

With per-step success probability p over H steps, the expected number of
correct steps is H*p while the probability that every step is correct is
p^H. The gap between the two is what makes "mostly correct" chains invalid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidArgument


@dataclass(frozen=True)
class ObjectivePoint:
    """Per-step success probability p, horizon H, and interpolation weight lambda."""

    p: float
    H: int
    lam: float = 0.0

    def __post_init__(self):
        if not (0 <= self.p <= 1):
            raise InvalidArgument("p must lie in [0, 1]")
        if self.H < 1:
            raise InvalidArgument("H must be a positive integer")
        if not (0 <= self.lam <= 1):
            raise InvalidArgument("lambda must lie in [0, 1]")


def _check_p_h(p: float, h: int) -> None:
    if not (0 <= p <= 1):
        raise InvalidArgument("p must lie in [0, 1]")
    if h < 1:
        raise InvalidArgument("H must be a positive integer")


def _pow(p: float, k: int) -> float:
    # 0**0 = 1 by convention so H = 1 behaves at p = 0.
    return 1.0 if k == 0 else p**k


def j_add(p: float, h: int) -> float:
    """Expected number of correct steps, H*p."""
    _check_p_h(p, h)
    return h * p


def j_mult(p: float, h: int) -> float:
    """Probability all H steps are correct, p^H."""
    _check_p_h(p, h)
    return _pow(p, h)


def grad_attenuation(p: float, h: int) -> float:
    """Factor p^(H-1) by which the multiplicative gradient trails the additive one."""
    _check_p_h(p, h)
    return _pow(p, h - 1)


def dj_add_dp(p: float, h: int) -> float:
    """d(H*p)/dp = H."""
    _check_p_h(p, h)
    return float(h)


def dj_mult_dp(p: float, h: int) -> float:
    """d(p^H)/dp = H * p^(H-1)."""
    _check_p_h(p, h)
    return h * _pow(p, h - 1)


def j_interp(p: float, h: int, lam: float) -> tuple[float, float]:
    """Interpolated objective (1-lam)*H*p + lam*p^H and its p-derivative.

    Both component gradients are nonnegative here, so the derivative is at
    least (1-lam)*H: keeping lam <= 1-c preserves a c fraction of the
    additive learning signal.
    """
    _check_p_h(p, h)
    if not (0 <= lam <= 1):
        raise InvalidArgument("lambda must lie in [0, 1]")
    value = (1.0 - lam) * j_add(p, h) + lam * j_mult(p, h)
    grad = (1.0 - lam) * dj_add_dp(p, h) + lam * dj_mult_dp(p, h)
    return value, grad


def _log_binom_pmf(k: int, n: int, log_p: float, log_q: float) -> float:
    return (
        math.lgamma(n + 1)
        - math.lgamma(k + 1)
        - math.lgamma(n - k + 1)
        + k * log_p
        + (n - k) * log_q
    )


def mostly_correct_but_wrong_prob(p: float, h: int, threshold: float) -> float:
    """P(X >= ceil(threshold*H) and X < H) for X ~ Binomial(H, p).

    The probability that a chain clears the step-quality bar yet still
    contains at least one wrong step. Exact tail sum with log-binomial
    coefficients, good for H up to 1e4.
    """
    _check_p_h(p, h)
    if not (0 < threshold <= 1):
        raise InvalidArgument("threshold must lie in (0, 1]")
    if p == 1.0:
        return 0.0
    k_lo = math.ceil(threshold * h)
    if k_lo >= h:
        return 0.0
    if p == 0.0:
        return 0.0 if k_lo >= 1 else 1.0
    log_p, log_q = math.log(p), math.log1p(-p)
    total = 0.0
    for k in range(k_lo, h):
        total += math.exp(_log_binom_pmf(k, h, log_p, log_q))
    return min(1.0, total)
