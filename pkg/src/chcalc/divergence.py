"""Chi-squared and total-variation divergences, tensorization, and decay curves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AbsoluteContinuityViolated, InvalidArgument
from .markov import ChainSpec, ProbVec, propagate

# Entries below this are treated as zero for support purposes; propagation
# leaves denormal dust that must not masquerade as real mass.
SUPPORT_EPS = 1e-15


def _check_dims(p: ProbVec, q: ProbVec) -> None:
    if p.size != q.size:
        raise InvalidArgument(
            f"dimension mismatch: distributions have {p.size} and {q.size} states"
        )


def chi2(p: ProbVec, q: ProbVec) -> float:
    """Chi-squared divergence sum_i (p_i - q_i)^2 / q_i, with q the reference.

    Components where both p_i and q_i are below the support threshold
    contribute 0; p-mass on a q-null component raises
    AbsoluteContinuityViolated.
    """
    _check_dims(p, q)
    pe, qe = p.entries, q.entries
    q_null = qe < SUPPORT_EPS
    if np.any(q_null & (pe >= SUPPORT_EPS)):
        raise AbsoluteContinuityViolated(
            "P has mass where the reference Q does not; chi2 is infinite"
        )
    support = ~q_null
    diff = pe[support] - qe[support]
    return float(np.sum(diff * diff / qe[support]))


def tv(p: ProbVec, q: ProbVec) -> float:
    """Total variation distance, half the L1 difference."""
    _check_dims(p, q)
    return float(0.5 * np.abs(p.entries - q.entries).sum())


def tensorize_chi2(chi2_single: float, n: int) -> float:
    """Chi-squared of an n-fold product: (1 + chi2)^n - 1.

    Evaluated as expm1(n * log1p(chi2)) so it stays accurate for chi2 down
    to 1e-12 and n up to 1e9; overflow returns +inf.
    """
    if chi2_single < 0:
        raise InvalidArgument("chi2 must be nonnegative")
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    exponent = n * math.log1p(chi2_single)
    if exponent > 700.0:
        return math.inf
    return math.expm1(exponent)


def tv_upper_from_chi2(chi2_value: float) -> float:
    """Upper bound on TV from chi-squared: min(1, sqrt(chi2 / 2))."""
    if chi2_value < 0:
        raise InvalidArgument("chi2 must be nonnegative")
    return min(1.0, math.sqrt(chi2_value / 2.0))


def lecam_total_error(p: ProbVec, q: ProbVec) -> float:
    """Minimum summed type-I + type-II error of any test between p and q.

    Equals 1 - TV(p, q): 1 for identical distributions, 0 for disjoint
    supports.
    """
    return 1.0 - tv(p, q)


@dataclass(frozen=True)
class DecayCurve:
    """Chi-squared between two propagated distributions at each step.

    ``values[k]`` is (step u, chi2(P_u || Q_u)) for u = start_step + k; the
    final entry is the divergence between the terminal distributions.
    """

    start_step: int
    horizon: int
    values: tuple[tuple[int, float], ...]

    @property
    def initial_chi2(self) -> float:
        return self.values[0][1]

    @property
    def terminal_chi2(self) -> float:
        return self.values[-1][1]

    def chi2_after(self, k: int) -> float:
        """Divergence after k propagation steps from start_step."""
        if not 0 <= k < len(self.values):
            raise InvalidArgument(f"k={k} outside [0, {len(self.values)})")
        return self.values[k][1]

    def csv_rows(self, eta: float | None = None) -> list[dict]:
        """Rows step / distance_to_end / chi2_measured / chi2_theory.

        The theory column is eta^(u - start_step) * initial chi2 when a
        homogeneous contraction rate is supplied, blank otherwise.
        """
        rows = []
        for u, value in self.values:
            theory = eta ** (u - self.start_step) * self.initial_chi2 if eta is not None else ""
            rows.append(
                {
                    "step": u,
                    "distance_to_end": self.horizon - u,
                    "chi2_measured": value,
                    "chi2_theory": theory,
                }
            )
        return rows


def decay_curve(spec: ChainSpec, p_t: ProbVec, q_t: ProbVec, t: int) -> DecayCurve:
    """Exact chi-squared at every step from t to the horizon.

    Both distributions are pushed through the chain's kernels by matrix
    multiplication; nothing is sampled.
    """
    if not 0 <= t <= spec.horizon:
        raise InvalidArgument(f"t={t} outside [0, {spec.horizon}]")
    if p_t.size != spec.states or q_t.size != spec.states:
        raise InvalidArgument("distribution dimensions must match the chain")
    values = [(t, chi2(p_t, q_t))]
    p, q = p_t, q_t
    for u in range(t, spec.horizon):
        kernel = spec.kernel_at(u)
        p = propagate(p, kernel)
        q = propagate(q, kernel)
        values.append((u + 1, chi2(p, q)))
    return DecayCurve(start_step=t, horizon=spec.horizon, values=tuple(values))
