import numpy as np
import pytest

from fedcsa.benchmark import (
    CheckResult,
    analytic_target_risk,
    run_selfcheck,
    true_ratio,
    unbiasedness_check,
    variance_ordering_checks,
)
from fedcsa.rng import make_rng


def test_analytic_risk_value():
    # (0.5 - 1)^2 + 0.2^2 + 1
    assert analytic_target_risk() == pytest.approx(1.29, abs=1e-12)
    assert analytic_target_risk(1.0, 0.0) == pytest.approx(1.0, abs=1e-12)


def test_true_ratio_spot_values():
    assert true_ratio(np.array([0.0]), 1.0)[0] == pytest.approx(np.exp(0.5))
    assert true_ratio(np.array([2.0]), 2.0)[0] == pytest.approx(np.exp(-2.0))
    # importance weights average to 1 under the source law
    x = 1.0 + make_rng(0).standard_normal(200_000)
    assert abs(float(true_ratio(x, 1.0).mean()) - 1.0) < 0.02


def test_check_result_line_format():
    ok = CheckResult("demo", True, 0.00123456789, 1.0)
    assert ok.line() == "PASS demo: observed 0.00123457 vs bound 1"
    bad = CheckResult("demo", False, 2.0, 1.5)
    assert bad.line() == "FAIL demo: observed 2 vs bound 1.5"


def test_fast_selfcheck_passes():
    results = run_selfcheck(fast=True)
    assert [r.name for r in results] == [
        "unbiasedness",
        "variance f_CV <= f_IW",
        "variance FedDAE <= FedIWE",
        "variance FedDAE <= random FedLE",
    ]
    assert all(r.passed for r in results)


def test_selfcheck_deterministic():
    assert run_selfcheck(fast=True) == run_selfcheck(fast=True)


def test_flip_eta_sabotage_is_detected():
    results = run_selfcheck(fast=True, flip_eta=True)
    by_name = {r.name: r for r in results}
    assert not by_name["variance f_CV <= f_IW"].passed
    assert not by_name["variance FedDAE <= FedIWE"].passed
    assert by_name["unbiasedness"].passed  # flipping eta leaves f_IW alone


def test_unbiasedness_at_reduced_replications():
    result = unbiasedness_check(replications=50, master_seed=1)
    assert result.passed
    assert 0.0 <= result.observed <= result.bound


def test_variance_checks_at_reduced_replications():
    results = variance_ordering_checks(replications=200, master_seed=2)
    assert all(r.passed for r in results)
    for r in results:
        assert np.isfinite(r.observed) and r.bound > 0
