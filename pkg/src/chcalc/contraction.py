"""Bounds and estimates for the chi-squared contraction coefficient of a kernel.

The exact coefficient is a non-convex supremum over input pairs, so it is
only computed for recognized special matrix forms. Everything else gets
bracketing: Dobrushin and diversity upper bounds plus a seeded randomized
lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .divergence import chi2
from .errors import AbsoluteContinuityViolated, InvalidArgument
from .markov import Kernel, ProbVec, point_mass, propagate

# Point-mass reference distributions violate absolute continuity; the
# empirical estimator mixes in this much uniform mass before dividing.
SMOOTHING = 1e-6


def dobrushin_alpha(kernel: Kernel) -> float:
    """Minimum pairwise row overlap: min_{z,z'} sum_y min(K(y|z), K(y|z'))."""
    rows = kernel.rows
    n = kernel.size
    if n == 1:
        return 1.0
    overlap = np.minimum(rows[:, None, :], rows[None, :, :]).sum(axis=2)
    off_diagonal = overlap[~np.eye(n, dtype=bool)]
    return float(min(1.0, off_diagonal.min()))


def dobrushin_bound(kernel: Kernel) -> float:
    """Upper bound 1 - alpha(K) on the chi-squared contraction coefficient."""
    return 1.0 - dobrushin_alpha(kernel)


def diversity_bound(kernel: Kernel) -> float:
    """Upper bound 1 - |Z| * min-entry; vacuous (1.0) when some entry is 0."""
    floor = float(kernel.rows.min())
    return float(min(1.0, max(0.0, 1.0 - kernel.size * floor)))


def two_state_exact(p: float) -> float:
    """Exact coefficient (1 - 2p)^2 of the symmetric two-state kernel."""
    if not (0 <= p <= 0.5):
        raise InvalidArgument("p must lie in [0, 1/2]")
    return (1.0 - 2.0 * p) ** 2


def _smoothed(dist: ProbVec) -> ProbVec:
    size = dist.size
    mixed = (1.0 - SMOOTHING) * dist.entries + SMOOTHING / size
    return ProbVec(mixed)


def _contraction_ratio(kernel: Kernel, p: ProbVec, q: ProbVec) -> float:
    denom = chi2(p, q)
    if denom <= 0.0:
        return 0.0
    try:
        return chi2(propagate(p, kernel), propagate(q, kernel)) / denom
    except AbsoluteContinuityViolated:
        # Kernel entries between the support threshold and the smoothing
        # floor can make the pushed pair unmeasurable; skipping the pair
        # keeps the estimate a valid lower bound.
        return 0.0


def empirical_eta_lower(kernel: Kernel, trials: int, seed: int) -> float:
    """Randomized lower bound on the chi-squared contraction coefficient.

    Takes the max achieved ratio chi2(PK || QK) / chi2(P || Q) over all
    ordered point-mass pairs (with the reference side smoothed toward
    uniform by SMOOTHING) plus ``trials`` random pairs of a point mass
    against a Dirichlet(1,...,1) interior point. Deterministic given the
    seed; trial t always uses the rng derived from (seed, t), so the result
    does not depend on evaluation order.
    """
    if trials < 1:
        raise InvalidArgument("trials must be at least 1")
    n = kernel.size
    best = 0.0
    for i in range(n):
        p = point_mass(i, n)
        for j in range(n):
            if i == j:
                continue
            q = _smoothed(point_mass(j, n))
            best = max(best, _contraction_ratio(kernel, p, q))
    for t in range(trials):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, t])))
        p = point_mass(int(rng.integers(n)), n)
        draw = rng.dirichlet(np.ones(n))
        # Nudge the draw strictly inside the simplex so the denominator
        # divergence is always finite.
        q = ProbVec((draw + 1e-9) / (1.0 + n * 1e-9), tol=1e-9)
        best = max(best, _contraction_ratio(kernel, p, q))
    return min(1.0, best)


def _exact_special_form(kernel: Kernel) -> float | None:
    """Exact coefficient for recognized forms, None otherwise.

    Recognized: all rows identical (0), permutation matrices (1, lossless),
    and the symmetric two-state kernel ((1 - 2p)^2). The identity-uniform
    mixture on more than two states is deliberately not claimed: its
    contraction over the unrestricted pair supremum exceeds the
    stationary-reference value, so only bounds apply.
    """
    rows = kernel.rows
    n = kernel.size
    if np.all(np.abs(rows - rows[0]) <= 1e-12):
        return 0.0
    is_binary = np.all((np.abs(rows) <= 1e-12) | (np.abs(rows - 1.0) <= 1e-12))
    if is_binary and np.all(np.abs(rows.sum(axis=0) - 1.0) <= 1e-12):
        return 1.0
    if n == 2 and abs(rows[0, 0] - rows[1, 1]) <= 1e-12 and abs(rows[0, 1] - rows[1, 0]) <= 1e-12:
        p = float(rows[0, 1])
        return (1.0 - 2.0 * p) ** 2
    return None


@dataclass(frozen=True)
class ContractionReport:
    """Bracketing information for a kernel's contraction coefficient.

    ``empirical_lower`` is a lower bound only, never the coefficient
    itself; ``gap`` is the unresolved bracket up to the tightest upper
    bound. ``exact`` is set only for recognized special matrix forms.
    """

    dobrushin_alpha: float
    dobrushin_bound: float
    diversity_bound: float
    empirical_lower: float
    exact: float | None
    trials: int
    seed: int
    smoothing: float = SMOOTHING

    @property
    def gap(self) -> float:
        return min(self.dobrushin_bound, self.diversity_bound) - self.empirical_lower

    def to_json_dict(self) -> dict:
        return {
            "dobrushin_alpha": self.dobrushin_alpha,
            "dobrushin_bound": self.dobrushin_bound,
            "diversity_bound": self.diversity_bound,
            "empirical_lower": self.empirical_lower,
            "exact": self.exact,
            "gap": self.gap,
            "trials": self.trials,
            "seed": self.seed,
            "smoothing": self.smoothing,
        }


def contraction_report(kernel: Kernel, trials: int = 2000, seed: int = 0) -> ContractionReport:
    """Compute all bounds, the randomized lower bound, and any exact value."""
    return ContractionReport(
        dobrushin_alpha=dobrushin_alpha(kernel),
        dobrushin_bound=dobrushin_bound(kernel),
        diversity_bound=diversity_bound(kernel),
        empirical_lower=empirical_eta_lower(kernel, trials, seed),
        exact=_exact_special_form(kernel),
        trials=trials,
        seed=seed,
    )


def attenuation(etas: Sequence[float], t: int, u: int) -> float:
    """Cumulative attenuation prod_{j=t}^{u-1} etas[j]; 1 for an empty range."""
    if not (0 <= t <= u <= len(etas)):
        raise InvalidArgument(f"need 0 <= t <= u <= len(etas), got ({t}, {u}, {len(etas)})")
    result = 1.0
    for j in range(t, u):
        eta = etas[j]
        if not (0 < eta <= 1):
            raise InvalidArgument(f"etas[{j}] must lie in (0, 1], got {eta!r}")
        result *= eta
    return result
