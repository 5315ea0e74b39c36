"""Seeded Monte Carlo harness for the synthetic validation experiments.

Every experiment is deterministic given (config, master_seed): the random
stream for replicate r, unit u is derived counter-style from
SeedSequence([master_seed, kind_id, r, u]), so results are independent of
worker-thread count and adding replicates never perturbs earlier ones.
Thread count is capped by the CH_THREADS environment variable (default 1).

Theory columns always come from the calculator modules; nothing is
re-derived inline.
"""

from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import divergence, inspection, markov, objectives, width
from .errors import Infeasible, InvalidArgument
from .horizon import critical_horizon, critical_horizon_simplified, HorizonParams

KIND_IDS = {"decay": 0, "width": 1, "inspection": 2, "horizon": 3, "mismatch": 4, "oracle": 5}

# Exhaustive schedule enumeration is exponential in H.
ORACLE_MAX_HORIZON = 14


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: kind, master seed, replicate count, and kind-specific params."""

    kind: str
    master_seed: int
    replicates: int
    params: dict

    def __post_init__(self):
        if self.kind not in KIND_IDS:
            raise InvalidArgument(
                f"kind must be one of {sorted(KIND_IDS)}, got {self.kind!r}"
            )
        if not (0 <= self.master_seed < 2**64):
            raise InvalidArgument("master_seed must be a 64-bit nonnegative integer")
        if self.replicates < 1:
            raise InvalidArgument("replicates must be at least 1")
        _VALIDATORS[self.kind](self.params)

    @classmethod
    def from_json_dict(cls, data: dict) -> "ExperimentConfig":
        unknown = set(data) - {"kind", "master_seed", "replicates", "params"}
        if unknown:
            raise InvalidArgument(f"unknown config fields: {sorted(unknown)}")
        return cls(
            kind=data.get("kind", ""),
            master_seed=int(data.get("master_seed", 0)),
            replicates=int(data.get("replicates", 1)),
            params=dict(data.get("params", {})),
        )

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "master_seed": self.master_seed,
            "replicates": self.replicates,
            "params": dict(self.params),
        }


@dataclass
class ResultTable:
    """Rectangular results plus run metadata (metadata goes to the JSON
    sidecar, never into the CSV)."""

    columns: list[str]
    rows: list[list]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise InvalidArgument("every row must match the column count")

    def column(self, name: str) -> list:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def to_csv_string(self) -> str:
        """Header plus rows; reals at 17 significant digits (round-trip exact),
        LF line endings. Cell values must not contain commas."""
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(_format_cell(cell) for cell in row))
        return "\n".join(lines) + "\n"


def _format_cell(cell) -> str:
    if isinstance(cell, bool):
        return str(int(cell))
    if isinstance(cell, (int, np.integer)):
        return str(int(cell))
    if isinstance(cell, (float, np.floating)):
        return format(float(cell), ".17g")
    text = str(cell)
    if "," in text or "\n" in text:
        raise InvalidArgument("table cells must not contain commas or newlines")
    return text


def unit_rng(master_seed: int, kind: str, replicate: int, unit: int) -> np.random.Generator:
    """Deterministic per-unit generator; see module docstring."""
    seq = np.random.SeedSequence([master_seed, KIND_IDS[kind], replicate, unit])
    return np.random.Generator(np.random.PCG64(seq))


def _worker_count() -> int:
    raw = os.environ.get("CH_THREADS", "1")
    try:
        count = int(raw)
    except ValueError as exc:
        raise InvalidArgument(f"CH_THREADS must be an integer, got {raw!r}") from exc
    return max(1, count)


def _map_units(fn: Callable, units: Sequence) -> list:
    """Apply fn to units, optionally across threads; output order is the
    input order regardless of completion order."""
    workers = _worker_count()
    if workers <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, units))


# ---------------------------------------------------------------------------
# config validation


def _require(params: dict, allowed: set) -> None:
    unknown = set(params) - allowed
    if unknown:
        raise InvalidArgument(f"unknown experiment params: {sorted(unknown)}")


def _get(params: dict, key: str, default):
    return params.get(key, default)


def _validate_decay(params: dict) -> None:
    _require(params, {"etas", "states", "H"})
    etas = _get(params, "etas", [0.7, 0.8, 0.9, 0.95])
    if not etas or any(not (0 < e <= 1) for e in etas):
        raise InvalidArgument("decay etas must lie in (0, 1]")
    if _get(params, "states", 10) < 2:
        raise InvalidArgument("states must be at least 2")
    if _get(params, "H", 40) < 1:
        raise InvalidArgument("H must be a positive integer")


def _validate_width(params: dict) -> None:
    _require(params, {"rho", "value", "widths", "groups"})
    rho = _get(params, "rho", 0.15)
    if not (0 <= rho < 1):
        raise InvalidArgument("rho must lie in [0, 1)")
    value = _get(params, "value", 0.5)
    if not (0 <= value <= 1):
        raise InvalidArgument("value must lie in [0, 1]")
    widths = _get(params, "widths", [1, 4, 16, 64, 256])
    if not widths or any(w < 1 for w in widths):
        raise InvalidArgument("widths must be positive integers")
    if _get(params, "groups", 100_000) < 2:
        raise InvalidArgument("groups must be at least 2")


def _validate_inspection(params: dict) -> None:
    _require(params, {"H", "states", "eta", "epsilon", "schedules", "n_per_test", "trials"})
    h = _get(params, "H", 20)
    if h < 1:
        raise InvalidArgument("H must be a positive integer")
    if _get(params, "states", 10) < 2:
        raise InvalidArgument("states must be at least 2")
    eta = _get(params, "eta", 0.9)
    if not (0 < eta < 1):
        raise InvalidArgument("eta must lie in (0,1)")
    epsilon = _get(params, "epsilon", 0.1)
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must lie in (0, 1/2)")
    for times in _get(params, "schedules", [[5, 10, 15], [2, 4, 6], [14, 16, 18], [2, 13, 14]]):
        inspection.Schedule(horizon=h, times=tuple(times))
    if _get(params, "n_per_test", 30) < 1:
        raise InvalidArgument("n_per_test must be at least 1")
    if _get(params, "trials", 20_000) < 1:
        raise InvalidArgument("trials must be at least 1")


def _validate_horizon(params: dict) -> None:
    _require(params, {"H", "states", "etas", "n", "epsilon", "obs_per_trial", "trials"})
    if _get(params, "H", 40) < 1:
        raise InvalidArgument("H must be a positive integer")
    if _get(params, "states", 10) < 2:
        raise InvalidArgument("states must be at least 2")
    etas = _get(params, "etas", [0.7, 0.8])
    if not etas or any(not (0 < e < 1) for e in etas):
        raise InvalidArgument("horizon etas must lie in (0,1)")
    if _get(params, "n", 1000) < 1:
        raise InvalidArgument("n must be a positive integer")
    epsilon = _get(params, "epsilon", 0.1)
    if not (0 < epsilon < 0.5):
        raise InvalidArgument("epsilon must lie in (0, 1/2)")
    if _get(params, "obs_per_trial", 2) < 1:
        raise InvalidArgument("obs_per_trial must be at least 1")
    if _get(params, "trials", 10_000) < 1:
        raise InvalidArgument("trials must be at least 1")


def _validate_mismatch(params: dict) -> None:
    _require(params, {"p", "H", "threshold", "chains"})
    p = _get(params, "p", 0.99)
    if not (0 <= p <= 1):
        raise InvalidArgument("p must lie in [0, 1]")
    if _get(params, "H", 100) < 1:
        raise InvalidArgument("H must be a positive integer")
    threshold = _get(params, "threshold", 0.8)
    if not (0 < threshold <= 1):
        raise InvalidArgument("threshold must lie in (0, 1]")
    if _get(params, "chains", 100_000) < 1:
        raise InvalidArgument("chains must be at least 1")


def _validate_oracle(params: dict) -> None:
    _require(params, {"max_H", "max_m", "greedy_cases"})
    max_h = _get(params, "max_H", 12)
    if not (2 <= max_h <= ORACLE_MAX_HORIZON):
        raise InvalidArgument(f"max_H must lie in [2, {ORACLE_MAX_HORIZON}]")
    if _get(params, "max_m", 4) < 0:
        raise InvalidArgument("max_m must be nonnegative")
    if _get(params, "greedy_cases", 50) < 0:
        raise InvalidArgument("greedy_cases must be nonnegative")


_VALIDATORS = {
    "decay": _validate_decay,
    "width": _validate_width,
    "inspection": _validate_inspection,
    "horizon": _validate_horizon,
    "mismatch": _validate_mismatch,
    "oracle": _validate_oracle,
}


# ---------------------------------------------------------------------------
# frozen golden configs


GOLDEN_DECAY = {
    "kind": "decay",
    "master_seed": 20260810,
    "replicates": 1,
    "params": {"etas": [0.7, 0.8, 0.9, 0.95], "states": 10, "H": 40},
}

GOLDEN_WIDTH = {
    "kind": "width",
    "master_seed": 20260810,
    "replicates": 1,
    "params": {"rho": 0.15, "value": 0.5, "widths": [1, 4, 16, 64, 256], "groups": 100_000},
}

# The chain kernel retains fraction eta of the mean signal per step
# (identity weight eta, so its chi-squared contraction coefficient is
# eta**2); each checkpoint emits one success-set membership bit per
# trajectory, and attribution error is the summed type-I + type-II rate,
# whose single-bit optimum is the Le Cam total error.
GOLDEN_INSPECTION = {
    "kind": "inspection",
    "master_seed": 20260810,
    "replicates": 1,
    "params": {
        "H": 20,
        "states": 10,
        "eta": 0.9,
        "epsilon": 0.1,
        "schedules": [[5, 10, 15], [2, 4, 6], [14, 16, 18], [2, 13, 14]],
        "n_per_test": 1,
        "trials": 20_000,
    },
}

GOLDEN_HORIZON = {
    "kind": "horizon",
    "master_seed": 20260810,
    "replicates": 1,
    "params": {
        "H": 40,
        "states": 10,
        "etas": [0.7, 0.8],
        "n": 1000,
        "epsilon": 0.1,
        "obs_per_trial": 2,
        "trials": 10_000,
    },
}

GOLDEN_MISMATCH = {
    "kind": "mismatch",
    "master_seed": 20260810,
    "replicates": 1,
    "params": {"p": 0.99, "H": 100, "threshold": 0.8, "chains": 100_000},
}


# ---------------------------------------------------------------------------
# experiments


def _fit_loglinear(distances: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of ln(values) against distance, with R^2."""
    y = np.log(values)
    slope, intercept = np.polyfit(distances, y, 1)
    predicted = slope * distances + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def run_decay(cfg: ExperimentConfig) -> ResultTable:
    """Exact divergence decay curves, one per contraction rate.

    Row (step u, distance d = H - u) reports the chi-squared divergence
    between the hypothesis pair placed at step u and propagated to the
    terminal state. For these kernels the uniform reference is stationary,
    so that value equals the single curve started at step 0 read after d
    steps. The log-linear fit per eta lands in metadata["fits"].
    """
    params = cfg.params
    etas = _get(params, "etas", [0.7, 0.8, 0.9, 0.95])
    states = _get(params, "states", 10)
    h = _get(params, "H", 40)

    def one_eta(eta: float):
        kernel = markov.mixture_kernel(eta, states)
        spec = markov.ChainSpec(
            horizon=h,
            kernels=kernel,
            success_set=frozenset({0}),
            initial=markov.point_mass(0, states),
        )
        curve = divergence.decay_curve(
            spec, markov.point_mass(0, states), markov.uniform_dist(states), 0
        )
        curve_rows = curve.csv_rows(eta=eta)
        rows = []
        for u in range(h + 1):  # u = perturbation step, d = H - u propagation steps
            by_distance = curve_rows[h - u]
            rows.append(
                [
                    u,
                    h - u,
                    eta,
                    by_distance["chi2_measured"],
                    by_distance["chi2_theory"],
                ]
            )
        distances = np.array([row[1] for row in rows], dtype=float)
        measured = np.array([row[3] for row in rows], dtype=float)
        slope, r2 = _fit_loglinear(distances, measured)
        return rows, {"slope": slope, "r2": r2}

    results = _map_units(one_eta, list(etas))
    rows = [row for unit_rows, _ in results for row in unit_rows]
    fits = {repr(eta): fit for eta, (_, fit) in zip(etas, results)}
    return ResultTable(
        columns=["step", "distance_to_end", "eta", "chi2_measured", "chi2_theory"],
        rows=rows,
        metadata={"fits": fits},
    )


def run_width(cfg: ExperimentConfig) -> ResultTable:
    """Empirical effective width of equicorrelated rollout groups.

    The measured value is the ratio of the empirical single-outcome
    variance to the variance of the group means, i.e. how many independent
    rollouts the group average is worth.
    """
    params = cfg.params
    rho = _get(params, "rho", 0.15)
    value = _get(params, "value", 0.5)
    widths = list(_get(params, "widths", [1, 4, 16, 64, 256]))
    groups = _get(params, "groups", 100_000)

    def one_unit(args):
        replicate, unit, w = args
        rng = unit_rng(cfg.master_seed, "width", replicate, unit)
        outcomes = width.equicorrelated_outcomes(value, w, rho, groups, rng)
        var_single = float(outcomes.var(ddof=1))
        if w == 1:
            w_eff_emp = 1.0
            var_mean = var_single
        else:
            var_mean = float(outcomes.mean(axis=1).var(ddof=1))
            w_eff_emp = var_single / var_mean
        return [
            replicate,
            w,
            groups,
            w_eff_emp,
            width.effective_width(w, rho),
            var_single,
            var_mean,
            width.correlated_variance(value, w, rho),
        ]

    units = [
        (replicate, unit, w)
        for replicate in range(cfg.replicates)
        for unit, w in enumerate(widths)
    ]
    rows = _map_units(one_unit, units)
    return ResultTable(
        columns=[
            "replicate",
            "W",
            "groups",
            "w_eff_empirical",
            "w_eff_theory",
            "var_single_empirical",
            "var_group_mean_empirical",
            "var_theory",
        ],
        rows=rows,
    )


def _midpoint_threshold(q0: float, q1: float, n_obs: int) -> int:
    """Smallest count X at which X/n_obs is at least the midpoint of q0 > q1
    (ties classify toward the larger probability)."""
    mid = 0.5 * (q0 + q1)
    return math.ceil(n_obs * mid - 1e-12)


def exact_two_point_accuracy(q0: float, q1: float, n_obs: int) -> float:
    """Accuracy of the nearest-probability test on n_obs Bernoulli draws when
    the hypothesis (q0 vs q1) is drawn uniformly."""
    if not (0 <= q1 <= q0 <= 1):
        raise InvalidArgument("need 0 <= q1 <= q0 <= 1")
    if n_obs < 1:
        raise InvalidArgument("n_obs must be at least 1")
    k_star = _midpoint_threshold(q0, q1, n_obs)
    correct0 = sum(
        math.comb(n_obs, k) * q0**k * (1 - q0) ** (n_obs - k) for k in range(k_star, n_obs + 1)
    )
    correct1 = sum(
        math.comb(n_obs, k) * q1**k * (1 - q1) ** (n_obs - k) for k in range(0, k_star)
    )
    return 0.5 * (correct0 + correct1)


def _outcome_probs_by_distance(states: int, h: int, kernel: markov.Kernel) -> list[float]:
    """P(Z_d in success set | Z_0 = delta_0) for d = 0..h, success set {0}."""
    spec = markov.ChainSpec(
        horizon=h,
        kernels=kernel,
        success_set=frozenset({0}),
        initial=markov.point_mass(0, states),
    )
    probs = []
    dist = markov.point_mass(0, states)
    probs.append(markov.outcome_prob(dist, spec.success_set))
    for d in range(h):
        dist = markov.propagate(dist, spec.kernel_at(d))
        probs.append(markov.outcome_prob(dist, spec.success_set))
    return probs


def run_inspection(cfg: ExperimentConfig) -> ResultTable:
    """Worst-case attribution error of competing inspection schedules.

    For each step t the hypotheses are (point mass on state 0, uniform) at
    t; the nearest downstream checkpoint emits one success-set membership
    bit per trajectory and the step's error is the summed type-I + type-II
    rate of the midpoint-threshold test on n_per_test such bits. Draws are
    shared across schedules (matched seeds), so refining a schedule never
    increases its measured error. The reported theory column is the Le Cam
    total error of a single checkpoint bit.
    """
    params = cfg.params
    h = _get(params, "H", 20)
    states = _get(params, "states", 10)
    eta = _get(params, "eta", 0.9)
    epsilon = _get(params, "epsilon", 0.1)
    schedules = [
        inspection.Schedule(horizon=h, times=tuple(times))
        for times in _get(
            params, "schedules", [[5, 10, 15], [2, 4, 6], [14, 16, 18], [2, 13, 14]]
        )
    ]
    n_per_test = _get(params, "n_per_test", 30)
    trials = _get(params, "trials", 20_000)

    # Identity weight eta keeps fraction eta of the mean signal per step;
    # the chi-squared contraction coefficient of this kernel is eta**2.
    kernel = markov.mixture_kernel(eta * eta, states)
    eta_chi2 = eta * eta
    q_by_distance = _outcome_probs_by_distance(states, h, kernel)
    q1 = 1.0 / states
    delta2 = divergence.chi2(markov.point_mass(0, states), markov.uniform_dist(states))

    def one_step(args):
        replicate, t = args
        rng = unit_rng(cfg.master_seed, "inspection", replicate, t)
        u0 = rng.random((trials, n_per_test))
        u1 = rng.random((trials, n_per_test))
        errors = {}
        for sched in schedules:
            d = inspection.downstream_distance(sched, t)
            q0 = q_by_distance[d]
            k_star = _midpoint_threshold(q0, q1, n_per_test)
            x0 = (u0 < q0).sum(axis=1)
            x1 = (u1 < q1).sum(axis=1)
            err0 = float(np.mean(x0 < k_star))
            err1 = float(np.mean(x1 >= k_star))
            errors[sched.times] = err0 + err1
        return errors

    rows = []
    for replicate in range(cfg.replicates):
        step_errors = _map_units(one_step, [(replicate, t) for t in range(h)])
        for sched in schedules:
            measured = [errors[sched.times] for errors in step_errors]
            worst_measured = max(measured)
            worst_step, worst_bound = inspection.worst_case_sample_lb(
                sched, eta_chi2, delta2, epsilon
            )
            worst_gap = inspection.maximal_gap(sched)
            lecam_worst = max(
                divergence.lecam_total_error(
                    markov.ProbVec([1 - q_by_distance[inspection.downstream_distance(sched, t)],
                                    q_by_distance[inspection.downstream_distance(sched, t)]]),
                    markov.ProbVec([1 - q1, q1]),
                )
                for t in range(h)
            )
            rows.append(
                [
                    replicate,
                    ";".join(str(t) for t in sched.times),
                    worst_step,
                    worst_gap,
                    worst_measured,
                    lecam_worst,
                    worst_bound,
                ]
            )
    return ResultTable(
        columns=[
            "replicate",
            "schedule",
            "worst_step",
            "max_gap",
            "err_worst_measured",
            "err_worst_lecam",
            "sample_lb_worst",
        ],
        rows=rows,
        metadata={"eta_chi2": eta_chi2, "delta2": delta2},
    )


def run_horizon(cfg: ExperimentConfig) -> ResultTable:
    """Attribution accuracy against distance from the outcome.

    Per trial the hypothesis is drawn uniformly, the corresponding initial
    distribution (point mass vs. uniform) is propagated d steps, and
    obs_per_trial Bernoulli outcome bits are classified by the nearer of
    the two exact outcome probabilities. Critical-horizon markers for the
    configured sample budget n come from the horizon module.
    """
    params = cfg.params
    h = _get(params, "H", 40)
    states = _get(params, "states", 10)
    etas = list(_get(params, "etas", [0.7, 0.8]))
    n = _get(params, "n", 1000)
    epsilon = _get(params, "epsilon", 0.1)
    obs = _get(params, "obs_per_trial", 2)
    trials = _get(params, "trials", 10_000)

    delta2 = divergence.chi2(markov.point_mass(0, states), markov.uniform_dist(states))
    q1 = 1.0 / states
    probs = {eta: _outcome_probs_by_distance(states, h, markov.mixture_kernel(eta, states)) for eta in etas}
    markers = {
        repr(eta): {
            "h_crit_simplified": critical_horizon_simplified(n, delta2, eta),
            "h_crit": critical_horizon(
                HorizonParams(n=n, delta2=delta2, epsilon=epsilon, eta=eta)
            ),
        }
        for eta in etas
    }

    def one_unit(args):
        replicate, unit, eta, d = args
        rng = unit_rng(cfg.master_seed, "horizon", replicate, unit)
        q0 = probs[eta][d]
        k_star = _midpoint_threshold(q0, q1, obs)
        is_h1 = rng.random(trials) < 0.5
        draws = rng.random((trials, obs))
        q_per_trial = np.where(is_h1, q1, q0)
        x = (draws < q_per_trial[:, None]).sum(axis=1)
        classified_h1 = x < k_star
        accuracy = float(np.mean(classified_h1 == is_h1))
        return [
            replicate,
            eta,
            d,
            q0,
            q1,
            accuracy,
            exact_two_point_accuracy(q0, q1, obs),
            markers[repr(eta)]["h_crit_simplified"],
        ]

    units = []
    unit = 0
    for replicate in range(cfg.replicates):
        unit = 0
        for eta in etas:
            for d in range(h + 1):
                units.append((replicate, unit, eta, d))
                unit += 1
    rows = _map_units(one_unit, units)
    return ResultTable(
        columns=[
            "replicate",
            "eta",
            "distance",
            "q0",
            "q1",
            "accuracy_measured",
            "accuracy_exact",
            "h_crit_marker",
        ],
        rows=rows,
        metadata={"markers": markers, "delta2": delta2},
    )


def run_mismatch(cfg: ExperimentConfig) -> ResultTable:
    """Sampled frequency of chains that clear the step-quality bar yet
    contain a wrong step, against the exact binomial value."""
    params = cfg.params
    p = _get(params, "p", 0.99)
    h = _get(params, "H", 100)
    threshold = _get(params, "threshold", 0.8)
    chains = _get(params, "chains", 100_000)
    exact = objectives.mostly_correct_but_wrong_prob(p, h, threshold)

    def one_replicate(replicate: int):
        rng = unit_rng(cfg.master_seed, "mismatch", replicate, 0)
        correct = rng.random((chains, h)) < p
        counts = correct.sum(axis=1)
        hits = (counts >= math.ceil(threshold * h)) & (counts < h)
        sampled = float(np.mean(hits))
        se = math.sqrt(max(exact * (1 - exact), 1e-300) / chains)
        return [replicate, chains, h, p, threshold, sampled, exact, se]

    rows = _map_units(one_replicate, list(range(cfg.replicates)))
    return ResultTable(
        columns=[
            "replicate",
            "chains",
            "H",
            "p",
            "threshold",
            "fraction_sampled",
            "fraction_exact",
            "standard_error",
        ],
        rows=rows,
    )


# ---------------------------------------------------------------------------
# brute-force oracles


def oracle_min_gap(horizon: int, m: int) -> int:
    """Exhaustive minimum of the maximal gap over all m-inspection schedules."""
    if horizon > ORACLE_MAX_HORIZON:
        raise InvalidArgument(f"horizon must be at most {ORACLE_MAX_HORIZON} for enumeration")
    if not 0 <= m <= horizon - 1:
        raise InvalidArgument("need 0 <= m <= horizon - 1")
    best = horizon
    for times in itertools.combinations(range(1, horizon), m):
        gap = inspection.maximal_gap(inspection.Schedule(horizon=horizon, times=times))
        best = min(best, gap)
    return best


def oracle_min_inspections(
    etas: Sequence[float], gamma: float, inspection_fidelity: float | None = None
) -> int:
    """Exhaustive minimum inspection count subject to the per-segment
    information budget (terminal segment included)."""
    horizon = len(etas)
    if horizon > ORACLE_MAX_HORIZON:
        raise InvalidArgument(f"horizon must be at most {ORACLE_MAX_HORIZON} for enumeration")
    budget = gamma
    if inspection_fidelity is not None:
        budget = gamma - math.log(1.0 / inspection_fidelity)
    weights = inspection.step_info_distances(etas)
    if any(w > budget for w in weights):
        offender = next(t for t, w in enumerate(weights) if w > budget)
        raise Infeasible(
            f"step {offender} alone exceeds the effective per-segment budget", step=offender
        )
    prefix = [0.0]
    for w in weights:
        prefix.append(prefix[-1] + w)

    def feasible(times: tuple[int, ...]) -> bool:
        aug = (0, *times, horizon)
        return all(prefix[b] - prefix[a] <= budget for a, b in zip(aug, aug[1:]))

    for m in range(0, horizon):
        for times in itertools.combinations(range(1, horizon), m):
            if feasible(times):
                return m
    return horizon - 1


def run_oracle(cfg: ExperimentConfig) -> ResultTable:
    """Cross-check the closed-form gap minimum and the greedy scheduler
    against exhaustive enumeration on small horizons."""
    params = cfg.params
    max_h = _get(params, "max_H", 12)
    max_m = _get(params, "max_m", 4)
    greedy_cases = _get(params, "greedy_cases", 50)

    rows = []
    for h in range(2, max_h + 1):
        for m in range(0, min(max_m, h - 1) + 1):
            oracle_value = oracle_min_gap(h, m)
            formula_value = inspection.min_gap_value(h, m)
            rows.append(
                ["min_gap", h, m, float(m), oracle_value, formula_value,
                 int(oracle_value == formula_value)]
            )

    def one_case(case: int):
        rng = unit_rng(cfg.master_seed, "oracle", 0, case)
        h = int(rng.integers(3, max_h + 1))
        etas = rng.uniform(0.35, 0.99, size=h)
        weights = [math.log(1.0 / e) for e in etas]
        gamma = max(weights) * float(rng.uniform(1.05, 3.0))
        greedy_m = inspection.greedy_schedule(etas, gamma).m
        oracle_m = oracle_min_inspections(etas, gamma)
        return ["greedy", h, greedy_m, gamma, oracle_m, greedy_m, int(oracle_m == greedy_m)]

    rows.extend(_map_units(one_case, list(range(greedy_cases))))
    return ResultTable(
        columns=["check", "H", "m", "param", "oracle_value", "computed_value", "match"],
        rows=rows,
    )


_RUNNERS = {
    "decay": run_decay,
    "width": run_width,
    "inspection": run_inspection,
    "horizon": run_horizon,
    "mismatch": run_mismatch,
    "oracle": run_oracle,
}


def run_experiment(cfg: ExperimentConfig) -> ResultTable:
    """Dispatch on cfg.kind; attaches config echo, seed, and wall time to
    the table metadata."""
    start = time.perf_counter()
    table = _RUNNERS[cfg.kind](cfg)
    table.metadata = {
        "config": cfg.to_json_dict(),
        "master_seed": cfg.master_seed,
        "kind": cfg.kind,
        "wall_time_s": time.perf_counter() - start,
        **{k: v for k, v in table.metadata.items()},
    }
    return table
