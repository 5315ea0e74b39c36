"""Inspection schedules: minimax-uniform placement, greedy information-distance
scheduling, feasibility thresholds, budgets, and the end-to-end design procedure.

The terminal outcome always acts as a free checkpoint at time H, so every
feasibility check covers the final segment too.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Sequence

from .errors import Infeasible, InvalidArgument
from .horizon import HorizonParams, critical_horizon, sample_lb

_LOG_FLOAT_MAX = math.log(sys.float_info.max)


@dataclass(frozen=True)
class Schedule:
    """Strictly increasing intermediate inspection times inside {1, ..., H-1}.

    The augmented sequence 0 < t_1 < ... < t_m < H partitions the horizon
    into m+1 segments; segment i covers steps [t_i, t_{i+1}).
    """

    horizon: int
    times: tuple[int, ...]

    def __post_init__(self):
        if self.horizon < 1:
            raise InvalidArgument("horizon must be a positive integer")
        times = tuple(int(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise InvalidArgument("inspection times must be strictly increasing")
        if times and (times[0] < 1 or times[-1] > self.horizon - 1):
            raise InvalidArgument("inspection times must lie strictly inside (0, H)")

    @property
    def m(self) -> int:
        return len(self.times)

    def augmented(self) -> tuple[int, ...]:
        return (0, *self.times, self.horizon)

    def segments(self) -> list[tuple[int, int]]:
        aug = self.augmented()
        return list(zip(aug, aug[1:]))


@dataclass(frozen=True)
class SegmentSummary:
    """One segment [start, end): its length, cumulative information distance,
    attenuation, and the sample bound for its first (worst) step."""

    start: int
    end: int
    length: int
    info_distance: float
    attenuation: float
    worst_step_sample_lb: float

    def to_json_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "length": self.length,
            "info_distance": self.info_distance,
            "attenuation": self.attenuation,
            "sample_lb": self.worst_step_sample_lb,
        }


@dataclass(frozen=True)
class BudgetParams:
    """Per-trajectory terminal-evaluation and per-inspection costs."""

    c_out: float
    c_insp: float

    def __post_init__(self):
        if not (self.c_out > 0):
            raise InvalidArgument("c_out must be positive")
        if self.c_insp < 0:
            raise InvalidArgument("c_insp must be nonnegative")


def downstream_distance(schedule: Schedule, t: int) -> int:
    """Steps from t to its next checkpoint (the terminal outcome counts)."""
    if not 0 <= t < schedule.horizon:
        raise InvalidArgument(f"t={t} outside [0, {schedule.horizon})")
    for u in schedule.times:
        if u > t:
            return u - t
    return schedule.horizon - t


def maximal_gap(schedule: Schedule) -> int:
    """Longest run of steps between consecutive checkpoints."""
    aug = schedule.augmented()
    return max(b - a for a, b in zip(aug, aug[1:]))


def uniform_schedule(horizon: int, m: int) -> Schedule:
    """Near-uniform placement t_i = floor(i*H/(m+1)), the minimax-optimal
    schedule under homogeneous contraction."""
    if m < 0:
        raise InvalidArgument("m must be nonnegative")
    if m > horizon - 1:
        raise InvalidArgument(f"m={m} exceeds the {horizon - 1} interior slots")
    times = tuple(i * horizon // (m + 1) for i in range(1, m + 1))
    return Schedule(horizon=horizon, times=times)


def min_gap_value(horizon: int, m: int) -> int:
    """Minimal achievable maximal gap with m inspections: ceil(H/(m+1))."""
    if horizon < 1:
        raise InvalidArgument("horizon must be a positive integer")
    if m < 0:
        raise InvalidArgument("m must be nonnegative")
    return -(-horizon // (m + 1))


def min_inspections(horizon: int, h_crit: float) -> int:
    """Necessary inspection count max(0, ceil(H / h_crit) - 1).

    This is a necessary condition only; integer rounding of segment
    lengths can require one more (see ``min_inspections_sufficient``).
    """
    if horizon < 1:
        raise InvalidArgument("horizon must be a positive integer")
    if h_crit <= 0:
        raise Infeasible(
            "critical horizon is zero: no inspection schedule makes any step testable"
        )
    return max(0, math.ceil(horizon / h_crit) - 1)


def min_inspections_sufficient(horizon: int, h_crit: float) -> int:
    """Smallest m whose minimax gap ceil(H/(m+1)) fits inside the horizon."""
    if h_crit <= 0:
        raise Infeasible(
            "critical horizon is zero: no inspection schedule makes any step testable"
        )
    m = min_inspections(horizon, h_crit)
    while min_gap_value(horizon, m) > h_crit:
        m += 1
    return m


def feasibility_threshold(n: float, delta2: float, epsilon: float) -> float:
    """Per-segment information budget Gamma = ln(n*delta2) - 2*ln(1-epsilon)."""
    if not (n > 0 and delta2 > 0):
        raise InvalidArgument("n and delta2 must be positive")
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must lie in (0, 1/2)")
    return math.log(n) + math.log(delta2) - 2.0 * math.log1p(-epsilon)


def step_info_distances(etas: Sequence[float]) -> list[float]:
    """Per-step information distance w_t = ln(1/eta_t)."""
    out = []
    for t, eta in enumerate(etas):
        if not (0 < eta <= 1):
            raise InvalidArgument(f"etas[{t}] must lie in (0, 1], got {eta!r}")
        out.append(math.log(1.0 / eta))
    return out


def greedy_schedule(
    etas: Sequence[float],
    gamma: float,
    inspection_fidelity: float | None = None,
) -> Schedule:
    """Minimum-cardinality schedule keeping every segment's cumulative
    information distance within the budget.

    From each placed checkpoint, the next one goes at the largest index the
    budget allows. An imperfect inspection channel with contraction
    ``inspection_fidelity`` shrinks the per-segment budget by
    ln(1/fidelity). Raises Infeasible (with the step index) if any single
    step alone exceeds the effective budget.
    """
    if not (gamma > 0):
        raise InvalidArgument("gamma must be positive")
    horizon = len(etas)
    if horizon < 1:
        raise InvalidArgument("etas must cover at least one step")
    budget = gamma
    if inspection_fidelity is not None:
        if not (0 < inspection_fidelity <= 1):
            raise InvalidArgument("inspection_fidelity must lie in (0, 1]")
        budget = gamma - math.log(1.0 / inspection_fidelity)
    weights = step_info_distances(etas)
    for t, w in enumerate(weights):
        if w > budget:
            raise Infeasible(
                f"step {t} alone carries information distance {w:.6g} above the "
                f"effective per-segment budget {budget:.6g}",
                step=t,
            )
    times = []
    start = 0
    while start < horizon:
        total = 0.0
        end = start
        while end < horizon and total + weights[end] <= budget:
            total += weights[end]
            end += 1
        if end < horizon:
            times.append(end)
        start = end
    return Schedule(horizon=horizon, times=tuple(times))


def _segment_attenuations(
    schedule: Schedule, etas_or_eta: float | Sequence[float]
) -> list[tuple[int, int, float]]:
    """(start, end, log-attenuation) per segment."""
    if isinstance(etas_or_eta, (int, float)):
        eta = float(etas_or_eta)
        if not (0 < eta <= 1):
            raise InvalidArgument("eta must lie in (0, 1]")
        # length * w, not a prefix-sum difference: equal-length segments must
        # tie exactly so the smallest-index tie-break is meaningful.
        w = math.log(1.0 / eta)
        return [(a, b, (b - a) * w) for a, b in schedule.segments()]
    if len(etas_or_eta) != schedule.horizon:
        raise InvalidArgument(
            f"etas length {len(etas_or_eta)} must equal horizon {schedule.horizon}"
        )
    weights = step_info_distances(etas_or_eta)
    prefix = [0.0]
    for w in weights:
        prefix.append(prefix[-1] + w)
    return [(a, b, prefix[b] - prefix[a]) for a, b in schedule.segments()]


def worst_case_sample_lb(
    schedule: Schedule,
    etas_or_eta: float | Sequence[float],
    delta2: float,
    epsilon: float,
) -> tuple[int, float]:
    """The hardest step under a schedule and its sample lower bound.

    The hardest step is the first step of the segment with the largest
    cumulative information distance (ties broken toward the smallest step
    index); its bound is (1-eps)^2 / (attenuation * delta2).
    """
    if not (delta2 > 0):
        raise InvalidArgument("delta2 must be positive")
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must lie in (0, 1/2)")
    segments = _segment_attenuations(schedule, etas_or_eta)
    worst_start, _, worst_info = max(segments, key=lambda seg: (seg[2], -seg[0]))
    log_bound = 2.0 * math.log1p(-epsilon) + worst_info - math.log(delta2)
    bound = math.inf if log_bound > _LOG_FLOAT_MAX else math.exp(log_bound)
    return worst_start, bound


def segment_report(
    schedule: Schedule,
    etas_or_eta: float | Sequence[float],
    delta2: float,
    epsilon: float,
) -> list[SegmentSummary]:
    """Per-segment lengths, information distances, attenuations, and bounds."""
    if not (delta2 > 0):
        raise InvalidArgument("delta2 must be positive")
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must lie in (0, 1/2)")
    out = []
    for a, b, info in _segment_attenuations(schedule, etas_or_eta):
        log_bound = 2.0 * math.log1p(-epsilon) + info - math.log(delta2)
        bound = math.inf if log_bound > _LOG_FLOAT_MAX else math.exp(log_bound)
        out.append(
            SegmentSummary(
                start=a,
                end=b,
                length=b - a,
                info_distance=info,
                attenuation=math.exp(-info),
                worst_step_sample_lb=bound,
            )
        )
    return out


def budget_lb(
    budget: BudgetParams,
    m: int,
    horizon: int,
    eta: float,
    delta2: float,
    epsilon: float,
) -> float:
    """Minimum total budget (c_out + m*c_insp) * (1-eps)^2 / (eta^gap * delta2)
    with the minimax gap ceil(H/(m+1))."""
    if m < 0:
        raise InvalidArgument("m must be nonnegative")
    params = HorizonParams(n=1, delta2=delta2, epsilon=epsilon, eta=eta)
    gap = min_gap_value(horizon, m)
    per_trajectory = budget.c_out + m * budget.c_insp
    needed = sample_lb(params, gap)
    return per_trajectory * needed.bound


@dataclass(frozen=True)
class BudgetScan:
    """Budget minimization over the inspection count.

    ``m_scan`` minimizes the budget lower bound outright; ``m_rule`` is the
    practical choice (smallest m whose minimax gap fits the critical
    horizon), present only when a sample budget n was supplied.
    """

    m_scan: int
    budget_scan: float
    m_rule: int | None
    budget_rule: float | None

    def to_json_dict(self) -> dict:
        return {
            "m_scan": self.m_scan,
            "budget_scan": self.budget_scan,
            "m_rule": self.m_rule,
            "budget_rule": self.budget_rule,
        }


def budget_optimize(
    budget: BudgetParams,
    horizon: int,
    eta: float,
    delta2: float,
    epsilon: float,
    n: int | None = None,
) -> BudgetScan:
    """Scan m = 0..min(H-1, 10^4) for the cheapest feasible design."""
    best_m, best_value = 0, math.inf
    for m in range(0, min(horizon - 1, 10_000) + 1):
        value = budget_lb(budget, m, horizon, eta, delta2, epsilon)
        if value < best_value:
            best_m, best_value = m, value
    m_rule = None
    budget_rule = None
    if n is not None:
        h_crit = critical_horizon(HorizonParams(n=n, delta2=delta2, epsilon=epsilon, eta=eta))
        if h_crit > 0:
            m_rule = min_inspections_sufficient(horizon, h_crit)
            budget_rule = budget_lb(budget, m_rule, horizon, eta, delta2, epsilon)
    return BudgetScan(m_scan=best_m, budget_scan=best_value, m_rule=m_rule, budget_rule=budget_rule)


def poly_density_min(horizon: int, p: float, eta: float) -> float:
    """Asymptotic estimate of the inspections needed for sample complexity
    O(H^p): (H * ln(1/eta)) / (p * ln H) - 1, floored at 0."""
    if horizon < 3:
        raise InvalidArgument("horizon must be at least 3")
    if not (p > 0):
        raise InvalidArgument("p must be positive")
    if not (0 < eta < 1):
        raise InvalidArgument("eta must lie in (0,1)")
    return max(0.0, horizon * math.log(1.0 / eta) / (p * math.log(horizon)) - 1.0)


@dataclass(frozen=True)
class DesignPlan:
    """Output of the five-step inspection design procedure."""

    mode: str  # "homogeneous" or "heterogeneous"
    horizon: int
    n: int
    delta2: float
    epsilon: float
    gamma: float
    h_crit: float | None
    m_necessary: int | None
    m_sufficient: int | None
    schedule: Schedule
    max_gap: int
    segments: list[SegmentSummary]
    worst_step: int
    worst_sample_lb: float
    feasible: bool
    per_trajectory_cost: float | None
    budget_required: float | None
    planned_cost: float | None

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "horizon": self.horizon,
            "n": self.n,
            "delta2": self.delta2,
            "epsilon": self.epsilon,
            "gamma": self.gamma,
            "h_crit": self.h_crit,
            "m_necessary": self.m_necessary,
            "m_sufficient": self.m_sufficient,
            "times": list(self.schedule.times),
            "max_gap": self.max_gap,
            "segments": [s.to_json_dict() for s in self.segments],
            "worst_step": self.worst_step,
            "worst_sample_lb": self.worst_sample_lb,
            "feasible": self.feasible,
            "per_trajectory_cost": self.per_trajectory_cost,
            "budget_required": self.budget_required,
            "planned_cost": self.planned_cost,
        }


def design_procedure(
    *,
    horizon: int,
    n: int,
    delta2: float,
    epsilon: float,
    eta: float | None = None,
    etas: Sequence[float] | None = None,
    budget: BudgetParams | None = None,
    inspection_fidelity: float | None = None,
) -> DesignPlan:
    """Run the full design procedure: information budget, critical horizon,
    minimum inspection count, placement, and budget check.

    Provide ``eta`` for homogeneous contraction (uniform placement) or
    ``etas`` for per-step rates (greedy placement). Raises Infeasible when
    no schedule can cover some step.
    """
    if (eta is None) == (etas is None):
        raise InvalidArgument("provide exactly one of eta or etas")
    gamma = feasibility_threshold(n, delta2, epsilon)
    if gamma <= 0:
        raise Infeasible(
            f"information budget Gamma={gamma:.6g} is not positive: "
            "the sample budget cannot test even an adjacent step"
        )
    if eta is not None:
        params = HorizonParams(n=n, delta2=delta2, epsilon=epsilon, eta=eta)
        h_crit = critical_horizon(params)
        m_necessary = min_inspections(horizon, h_crit)
        m_sufficient = min_inspections_sufficient(horizon, h_crit)
        schedule = uniform_schedule(horizon, m_sufficient)
        rates: float | Sequence[float] = eta
        mode = "homogeneous"
    else:
        if len(etas) != horizon:
            raise InvalidArgument(f"etas length {len(etas)} must equal horizon {horizon}")
        schedule = greedy_schedule(etas, gamma, inspection_fidelity)
        rates = list(etas)
        h_crit = None
        m_necessary = None
        m_sufficient = None
        mode = "heterogeneous"
    segments = segment_report(schedule, rates, delta2, epsilon)
    worst_step, worst_bound = worst_case_sample_lb(schedule, rates, delta2, epsilon)
    per_trajectory = budget.c_out + schedule.m * budget.c_insp if budget else None
    return DesignPlan(
        mode=mode,
        horizon=horizon,
        n=n,
        delta2=delta2,
        epsilon=epsilon,
        gamma=gamma,
        h_crit=h_crit,
        m_necessary=m_necessary,
        m_sufficient=m_sufficient,
        schedule=schedule,
        max_gap=maximal_gap(schedule),
        segments=segments,
        worst_step=worst_step,
        worst_sample_lb=worst_bound,
        feasible=n >= worst_bound,
        per_trajectory_cost=per_trajectory,
        budget_required=per_trajectory * worst_bound if per_trajectory is not None else None,
        planned_cost=per_trajectory * n if per_trajectory is not None else None,
    )
