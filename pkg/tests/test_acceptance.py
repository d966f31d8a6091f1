"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Criteria 1-4 evaluate the three benchmark experiments at their default
configurations; both methods are fit once per dataset and the reports are
shared across criteria (criterion 10 triggers a second full run for the
byte-identity check).  Run with ``pytest tests/test_acceptance.py -v -s``
to see the per-criterion lines.
"""

import itertools

import numpy as np
import pytest

from dapien.cli import ExperimentConfig, run_experiment
from dapien.distributions import (
    GammaParams,
    GaussianParams,
    fit_gamma,
    fit_gaussian,
    gamma_cdf,
    gamma_interval,
    gamma_inverse_cdf,
    gaussian_interval,
    t_quantile,
)
from dapien.regressor import Activation, TrainConfig, loss_and_gradient, train
from oracles import t_two_sided_quadrature

GAUSSIAN_LIMIT_NDF = 1e6  # t critical values converge to the Gaussian ones


@pytest.fixture(scope="session")
def suite_runs(tmp_path_factory):
    """Two full runs of the A/B/C suite at default configuration."""
    root = tmp_path_factory.mktemp("acceptance")
    reports, report_paths = {}, {}
    for run in (1, 2):
        for dataset in ("A", "B", "C"):
            out = root / f"run{run}" / dataset
            config = ExperimentConfig(dataset=dataset, output_dir=str(out))
            reports[(run, dataset)] = run_experiment(config)
            report_paths[(run, dataset)] = out / "report.json"
    return reports, report_paths


def _line(number, ok, detail):
    print(f"CRITERION {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def test_criterion_01_dataset_a_adaptive_intervals(suite_runs):
    """Dataset A, adaptive method: PICP in [0.92, 0.98], MPIW in [0.36, 0.54].

    Note on the coverage band: the noise of dataset A switches on the
    parity of the bit sum, which no affine-or-exponential single-layer
    width model can separate, so predicted widths are near-constant across
    groups.  Near-constant widths that satisfy MPIW <= 0.54 cap coverage
    at about 0.91 on this dataset (half the test targets are noiseless and
    always covered; the other half need half-widths >= 0.281 for 84%
    conditional coverage, i.e. MPIW >= 0.56).  The width check passes; the
    coverage band is not reachable by this architecture and the check
    records that honestly.
    """
    report = suite_runs[0][(1, "A")]["dapien"]
    picp_ok = 0.92 <= report["picp"] <= 0.98
    mpiw_ok = 0.36 <= report["mpiw"] <= 0.54
    ok = _line(
        1,
        picp_ok and mpiw_ok,
        f"PICP {report['picp']:.3f} in [0.92, 0.98]: {picp_ok}; "
        f"MPIW {report['mpiw']:.3f} in [0.36, 0.54]: {mpiw_ok}",
    )
    assert ok


def test_criterion_02_dataset_a_bootstrap_undercovers(suite_runs):
    report = suite_runs[0][(1, "A")]["bootstrap"]
    ok = _line(
        2,
        report["picp"] < 0.75 and report["mpiw"] < 0.2,
        f"bootstrap PICP {report['picp']:.3f} < 0.75, MPIW {report['mpiw']:.3f} < 0.2",
    )
    assert ok


def test_criterion_03_dataset_b(suite_runs):
    dapien = suite_runs[0][(1, "B")]["dapien"]
    boot = suite_runs[0][(1, "B")]["bootstrap"]
    ok = _line(
        3,
        0.90 <= dapien["picp"] <= 0.97
        and 1.4 <= dapien["mpiw"] <= 2.2
        and boot["picp"] < 0.80,
        f"adaptive PICP {dapien['picp']:.3f} in [0.90, 0.97], "
        f"MPIW {dapien['mpiw']:.3f} in [1.4, 2.2]; "
        f"bootstrap PICP {boot['picp']:.3f} < 0.80",
    )
    assert ok


def test_criterion_04_dataset_c(suite_runs):
    dapien = suite_runs[0][(1, "C")]["dapien"]
    boot = suite_runs[0][(1, "C")]["bootstrap"]
    ok = _line(
        4,
        dapien["picp"] >= 0.94
        and dapien["mpiw"] < 30.0
        and boot["picp"] >= 0.98
        and boot["mpiw"] > 2.0 * dapien["mpiw"],
        f"adaptive PICP {dapien['picp']:.3f} >= 0.94, MPIW {dapien['mpiw']:.1f} < 30; "
        f"bootstrap PICP {boot['picp']:.3f} >= 0.98, "
        f"MPIW {boot['mpiw']:.1f} > 2x{dapien['mpiw']:.1f}",
    )
    assert ok


def test_criterion_05_oracle_coverage():
    """Intervals from true generator parameters hit nominal coverage.

    True-parameter Gaussian intervals use the asymptotic critical value
    (the t machinery at very large ndf), so only the quantile code is
    exercised, never estimation.
    """
    rng = np.random.default_rng(123)
    n = 10**5
    worst = 0.0
    for confidence in (0.80, 0.90, 0.95, 0.99):
        params = GaussianParams(mean=5.0, variance=0.04)
        lo, hi = gaussian_interval(params, t_quantile(confidence, GAUSSIAN_LIMIT_NDF))
        draws = rng.normal(5.0, 0.2, size=n)
        cover = float(np.mean((draws >= lo) & (draws <= hi)))
        worst = max(worst, abs(cover - confidence))
        assert abs(cover - confidence) <= 0.015

        for gamma_params in (GammaParams(1.0, 1.0, 0.0), GammaParams(4.0, 2.0, 10.0)):
            lo, hi = gamma_interval(gamma_params, confidence)
            draws = gamma_params.location + rng.gamma(
                shape=gamma_params.shape, scale=1.0 / gamma_params.rate, size=n
            )
            cover = float(np.mean((draws >= lo) & (draws <= hi)))
            worst = max(worst, abs(cover - confidence))
            assert abs(cover - confidence) <= 0.015
    _line(5, True, f"worst |coverage - nominal| = {worst:.4f} <= 0.015")


def test_criterion_06_quantile_round_trips():
    worst_rt = 0.0
    for shape, rate, loc in itertools.product((0.5, 1.0, 4.0), (0.5, 2.0), (-3.0, 0.0, 10.0)):
        params = GammaParams(shape, rate, loc)
        for p in (0.001, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999):
            err = abs(gamma_cdf(gamma_inverse_cdf(p, params), params) - p)
            worst_rt = max(worst_rt, err)
            assert err <= 1e-8

    worst_t = 0.0
    for confidence in (0.8, 0.9, 0.95, 0.99):
        for ndf in (2.0, 5.0, 20.0, 1000.0):
            err = abs(t_quantile(confidence, ndf) - t_two_sided_quadrature(confidence, ndf))
            worst_t = max(worst_t, err)
            assert err <= 1e-5
    _line(6, True, f"worst CDF round trip {worst_rt:.2e} <= 1e-8; "
                   f"worst t vs quadrature {worst_t:.2e} <= 1e-5")


def test_criterion_07_gradient_checks():
    rng = np.random.default_rng(17)
    X = rng.integers(0, 2, size=(40, 6)).astype(float)
    h = 1e-6
    worst = 0.0
    for activation in Activation:
        t = rng.uniform(0.1, 3.0, 40)
        for _ in range(100):
            w = rng.normal(0.0, 0.5, 6)
            b = float(rng.normal(0.0, 0.5))
            _, gw, gb = loss_and_gradient(w, b, X, t, activation, 1e-3)
            analytic = np.concatenate([gw, [gb]])
            theta = np.concatenate([w, [b]])
            numeric = np.empty_like(theta)
            for i in range(theta.size):
                plus, minus = theta.copy(), theta.copy()
                plus[i] += h
                minus[i] -= h
                lp, _, _ = loss_and_gradient(plus[:-1], plus[-1], X, t, activation, 1e-3)
                lm, _, _ = loss_and_gradient(minus[:-1], minus[-1], X, t, activation, 1e-3)
                numeric[i] = (lp - lm) / (2.0 * h)
            rel = np.linalg.norm(analytic - numeric) / max(1.0, np.linalg.norm(analytic))
            worst = max(worst, rel)
            assert rel < 1e-4
    _line(7, True, f"worst relative gradient error {worst:.2e} < 1e-4, both activations")


def test_criterion_08_least_squares_equivalence():
    rng = np.random.default_rng(29)
    worst = 0.0
    for d in (2, 3, 4, 5, 6, 7, 8):
        X = np.array(list(itertools.product([0, 1], repeat=d)), dtype=float)
        t = X @ rng.normal(0.0, 1.0, d) + float(rng.normal())
        model = train(X, t, Activation.IDENTITY, TrainConfig(seed=d))
        A = np.hstack([X, np.ones((X.shape[0], 1))])
        ref = np.linalg.solve(A.T @ A, A.T @ t)
        err = float(np.max(np.abs(np.concatenate([model.weights, [model.bias]]) - ref)))
        worst = max(worst, err)
        assert err < 1e-4, f"d={d}"
    _line(8, True, f"worst per-coefficient gap to normal equations {worst:.2e} < 1e-4")


def test_criterion_09_fit_recovery():
    rng = np.random.default_rng(42)
    gauss = fit_gaussian(rng.normal(5.0, 0.2, size=10**5))
    gauss_ok = abs(gauss.mean - 5.0) < 0.01 and abs(gauss.variance - 0.04) < 0.002

    rng = np.random.default_rng(42)
    expo = fit_gamma(rng.gamma(1.0, 1.0, size=10**5))
    expo_ok = (
        abs(expo.shape - 1.0) < 0.05
        and abs(expo.rate - 1.0) < 0.05
        and abs(expo.location) < 0.01
    )

    rng = np.random.default_rng(2)
    shifted = fit_gamma(10.0 + rng.gamma(4.0, 0.5, size=10**5))
    shifted_ok = (
        abs(shifted.shape - 4.0) < 0.2
        and abs(shifted.rate - 2.0) < 0.1
        and abs(shifted.location - 10.0) < 0.01
    )
    ok = _line(
        9,
        gauss_ok and expo_ok and shifted_ok,
        f"gaussian ({gauss.mean:.4f}, {gauss.variance:.5f}); "
        f"gamma ({expo.shape:.4f}, {expo.rate:.4f}, {expo.location:.5f}); "
        f"shifted gamma ({shifted.shape:.3f}, {shifted.rate:.3f}, {shifted.location:.4f})",
    )
    assert ok


def test_criterion_10_determinism(suite_runs):
    _, report_paths = suite_runs
    identical = all(
        report_paths[(1, ds)].read_bytes() == report_paths[(2, ds)].read_bytes()
        for ds in ("A", "B", "C")
    )
    ok = _line(10, identical, "byte-identical report.json across two full suite runs")
    assert ok
