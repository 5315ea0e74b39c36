import numpy as np
import pytest

from chcalc.contraction import (
    attenuation,
    contraction_report,
    diversity_bound,
    dobrushin_alpha,
    dobrushin_bound,
    empirical_eta_lower,
    two_state_exact,
)
from chcalc.errors import InvalidArgument
from chcalc.markov import Kernel, mixture_kernel, two_state_kernel

MANUFACTURING = Kernel([[0.85, 0.14, 0.01], [0.55, 0.35, 0.10], [0.20, 0.30, 0.50]])
REASONING = Kernel([[0.7, 0.2, 0.1], [0.3, 0.4, 0.3], [0.1, 0.2, 0.7]])


def _uniform_mixing(size):
    return Kernel(np.full((size, size), 1.0 / size))


class TestDobrushin:
    def test_manufacturing_alpha(self):
        assert dobrushin_alpha(MANUFACTURING) == pytest.approx(0.35)

    def test_manufacturing_bound(self):
        assert dobrushin_bound(MANUFACTURING) == pytest.approx(0.65)

    def test_identity_alpha_zero(self):
        assert dobrushin_alpha(mixture_kernel(1.0, 4)) == 0.0

    def test_equal_rows_alpha_one(self):
        assert dobrushin_alpha(_uniform_mixing(5)) == pytest.approx(1.0)
        assert dobrushin_bound(_uniform_mixing(5)) == pytest.approx(0.0)

    def test_two_state_bound(self):
        for p in (0.05, 0.2, 0.45):
            assert dobrushin_bound(two_state_kernel(p)) == pytest.approx(1 - 2 * p)


class TestDiversity:
    def test_reasoning_kernel(self):
        assert diversity_bound(REASONING) == pytest.approx(0.7)

    def test_zero_entry_is_vacuous(self):
        assert diversity_bound(MANUFACTURING.__class__([[1.0, 0.0], [0.0, 1.0]])) == 1.0

    def test_mixture_081(self):
        assert diversity_bound(mixture_kernel(0.81, 10)) == pytest.approx(0.9)


class TestTwoStateExact:
    def test_endpoints(self):
        assert two_state_exact(0.0) == 1.0
        assert two_state_exact(0.5) == 0.0

    def test_formula(self):
        assert two_state_exact(0.1) == pytest.approx(0.64)

    def test_range(self):
        with pytest.raises(InvalidArgument):
            two_state_exact(0.6)


class TestEmpiricalLower:
    def test_two_state_converges(self):
        value = empirical_eta_lower(two_state_kernel(0.1), trials=10_000, seed=11)
        assert 0.64 - 1e-3 <= value <= 0.64 + 1e-9

    def test_two_state_tight_band(self):
        value = empirical_eta_lower(two_state_kernel(0.1), trials=20_000, seed=0)
        assert 0.6399 <= value <= 0.6401

    def test_identity_is_one(self):
        assert empirical_eta_lower(mixture_kernel(1.0, 4), trials=10, seed=0) == pytest.approx(1.0)

    def test_uniform_mixing_is_zero(self):
        assert empirical_eta_lower(_uniform_mixing(4), trials=10, seed=0) == pytest.approx(0.0, abs=1e-12)

    def test_deterministic_given_seed(self):
        a = empirical_eta_lower(MANUFACTURING, trials=200, seed=5)
        b = empirical_eta_lower(MANUFACTURING, trials=200, seed=5)
        assert a == b


class TestReport:
    def test_bounds_order(self):
        report = contraction_report(MANUFACTURING, trials=500, seed=1)
        assert report.empirical_lower <= min(report.dobrushin_bound, report.diversity_bound) + 1e-9
        assert 0 <= report.gap

    def test_exact_recognized_for_two_state(self):
        report = contraction_report(two_state_kernel(0.1), trials=50, seed=2)
        assert report.exact == pytest.approx(0.64)
        assert report.empirical_lower <= 0.64 + 1e-9

    def test_exact_recognized_for_permutation(self):
        cycle = np.roll(np.eye(4), 1, axis=1)
        report = contraction_report(Kernel(cycle), trials=50, seed=2)
        assert report.exact == 1.0

    def test_mixture_not_claimed_exact(self):
        # over unrestricted input pairs the mixture kernel contracts less
        # than at its stationary reference, so no exact value is reported
        report = contraction_report(mixture_kernel(0.81, 10), trials=500, seed=2)
        assert report.exact is None
        assert report.empirical_lower <= report.dobrushin_bound + 1e-9

    def test_exact_absent_for_general_kernel(self):
        assert contraction_report(MANUFACTURING, trials=50, seed=2).exact is None

    def test_json_payload(self):
        payload = contraction_report(MANUFACTURING, trials=50, seed=2).to_json_dict()
        assert payload["smoothing"] == 1e-6
        assert set(payload) >= {"dobrushin_alpha", "diversity_bound", "empirical_lower", "gap"}


class TestAttenuation:
    def test_empty_product(self):
        assert attenuation([0.5, 0.5], 1, 1) == 1.0

    def test_homogeneous_25_steps(self):
        value = attenuation([0.85] * 30, 0, 25)
        assert value == pytest.approx(0.85**25, rel=1e-12)
        assert value == pytest.approx(0.017197809852207906, rel=1e-12)

    def test_service_journey_prefix(self):
        etas = [0.6] * 11 + [0.95] * 39
        value = attenuation(etas, 0, 16)
        assert value == pytest.approx(0.6**11 * 0.95**5, rel=1e-12)
        assert value == pytest.approx(0.0028072544611392, rel=1e-9)

    def test_multiplicative(self):
        etas = [0.9, 0.8, 0.7, 0.95, 0.85]
        assert attenuation(etas, 0, 3) * attenuation(etas, 3, 5) == pytest.approx(
            attenuation(etas, 0, 5), rel=1e-15
        )

    def test_range_errors(self):
        with pytest.raises(InvalidArgument):
            attenuation([0.9], 1, 0)
        with pytest.raises(InvalidArgument):
            attenuation([0.9], 0, 2)
        with pytest.raises(InvalidArgument):
            attenuation([1.5], 0, 1)
