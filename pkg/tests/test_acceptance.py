"""Acceptance gate: one test per criterion, each recording a pass/fail line
in the terminal summary. Criteria 6 and 8 share one full-scale campaign."""

import math
import statistics
import time

import numpy as np
import pytest
from scipy.integrate import quad

from g0lcum import specfun
from g0lcum.estimators import (
    EstimatorKind,
    EtaEstimate,
    bayes_correct_eta,
    estimate_alpha,
    invert_eta,
)
from g0lcum.harness import MCConfig, run_campaign
from g0lcum.model import (
    G0Params,
    ModelKind,
    sample_g0,
    theoretical_log_cumulants,
    unit_mean_gamma,
)
from g0lcum.raster import Raster, roughness_map

from conftest import record_criterion

I = ModelKind.INTENSITY
A = ModelKind.AMPLITUDE
TRAD = EstimatorKind.TRADITIONAL
POLY = EstimatorKind.FAST_POLY
CORR = EstimatorKind.FAST_POLY_CORRECTED


@pytest.fixture(scope="session")
def default_campaign():
    t0 = time.perf_counter()
    report = run_campaign(MCConfig(), parallelism=1)
    return report, time.perf_counter() - t0


def test_criterion_01_special_function_fidelity():
    xs = np.logspace(np.log10(0.5), 2.0, 200)
    t0 = time.perf_counter()
    tri = max(abs(specfun.trigamma(x) - specfun.trigamma_series_oracle(x))
              / specfun.trigamma_series_oracle(x) for x in xs)
    dig = max(abs(specfun.digamma(x) - specfun.digamma_series_oracle(x))
              / abs(specfun.digamma_series_oracle(x)) for x in xs)
    elapsed = time.perf_counter() - t0
    ok = tri <= 1e-12 and dig <= 1e-12 and elapsed < 1.0
    record_criterion(1, "trigamma/digamma vs series oracles <= 1e-12 rel, < 1 s", ok,
                     f"trigamma {tri:.2e}, digamma {dig:.2e}, {elapsed:.2f} s")


def test_criterion_02_trigamma_approximation_envelope():
    xs = np.linspace(2.0, 15.0, 521)
    errs = np.array([abs(specfun.trigamma_approx(x) - specfun.trigamma(x)) for x in xs])
    bound_ratio = float((errs * xs ** 11).max())
    at_two = abs(specfun.trigamma_approx(2.0) - specfun.trigamma(2.0))
    ok = bound_ratio <= 1.0 and at_two <= 5e-5
    record_criterion(2, "trigamma_approx within 1/x^11 on [2, 15], <= 5e-5 at x=2", ok,
                     f"max err*x^11 {bound_ratio:.3f}, err(2) {at_two:.2e}")


def test_criterion_03_inversion_round_trip():
    # The floor is relaxed by 0.1 so the alpha = -15 probe measures solver
    # accuracy instead of the strict admissibility cut at the boundary.
    details = []
    ok = True
    for alpha in (-1.5, -2.0, -3.0, -5.0, -8.0, -15.0):
        lc = theoretical_log_cumulants(G0Params(alpha, 1.0, 1.0), I)
        eta = lc.k2 - specfun.trigamma(1.0)
        trad, reason_t = invert_eta(eta, TRAD, alpha_floor=-15.1)
        poly, reason_p = invert_eta(eta, POLY, alpha_floor=-15.1)
        tol = 2e-2 if alpha == -1.5 else 5e-3
        good = (reason_t is None and abs(trad - alpha) <= 1e-8
                and reason_p is None and abs(poly - alpha) <= tol)
        ok = ok and good
        details.append(f"{alpha}: trad {abs(trad - alpha):.1e}, poly {abs(poly - alpha):.1e}")
    record_criterion(3, "traditional 1e-8 / polynomial 5e-3 (2e-2 at -1.5) round trip",
                     ok, "; ".join(details))


def _truncated_mean_quad(eta: float, sigma: float, b: float = 1000.0) -> float:
    """Posterior mean by numerical integration; the normal density is peak
    normalized so the deep-tail cases stay inside double range."""
    def w(x):
        return math.exp(-(x * x - 2.0 * eta * x) / (2.0 * sigma * sigma))

    scale = sigma * sigma / max(abs(eta), sigma)
    pts = {max(0.0, eta) + k * sigma for k in (-4.0, -1.0, 0.0, 1.0, 4.0, 12.0)}
    pts.update(scale * m for m in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0))
    pts = sorted(p for p in pts if 0.0 < p < b)
    num, _ = quad(lambda x: x * w(x), 0.0, b, points=pts, limit=200)
    den, _ = quad(w, 0.0, b, points=pts, limit=200)
    return num / den


def test_criterion_04_bayes_correction_vs_integration():
    worst = 0.0
    for eta in np.linspace(-2.0, 2.0, 5):
        for sigma in np.linspace(0.1, 2.0, 5):
            got = bayes_correct_eta(EtaEstimate(eta_hat=float(eta), sigma=float(sigma))).eta_m
            worst = max(worst, abs(got - _truncated_mean_quad(float(eta), float(sigma))))
    zero_err = max(abs(bayes_correct_eta(EtaEstimate(eta_hat=0.0, sigma=s)).eta_m
                       - s * math.sqrt(2.0 / math.pi)) / (s * math.sqrt(2.0 / math.pi))
                   for s in (0.1, 0.575, 1.05, 1.525, 2.0))
    ok = worst <= 1e-6 and zero_err <= 1e-12
    record_criterion(4, "closed form vs truncated-normal integration <= 1e-6 on 5x5 grid",
                     ok, f"max abs diff {worst:.2e}, eta=0 identity rel {zero_err:.2e}")


def test_criterion_05_sampler_validity():
    t0 = time.perf_counter()
    details = []
    ok = True
    for (alpha, looks), seed in zip(((-3.0, 1.0), (-5.0, 3.0), (-1.5, 8.0)), (101, 102, 103)):
        p = G0Params(alpha, unit_mean_gamma(alpha), looks)
        s = sample_g0(p, I, 100_000, seed=seed)
        n = len(s)
        mean_dev = abs(float(s.values.mean()) - 1.0) / (float(s.values.std()) / math.sqrt(n))
        logs = np.log(s.values)
        k1 = float(logs.mean())
        d2 = (logs - k1) ** 2
        k2 = float(d2.mean())
        m4 = float((d2 * d2).mean())
        theory = theoretical_log_cumulants(p, I)
        k1_dev = abs(k1 - theory.k1) / math.sqrt(k2 / n)
        k2_dev = abs(k2 - theory.k2) / math.sqrt((m4 - k2 * k2) / n)
        good = mean_dev <= 4.0 and k1_dev <= 4.0 and k2_dev <= 4.0
        ok = ok and good
        details.append(f"({alpha},{looks:.0f}): mean {mean_dev:.2f} SE, "
                       f"k1 {k1_dev:.2f} SE, k2 {k2_dev:.2f} SE")
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 30.0
    record_criterion(5, "sampler mean and log-cumulants within 4 SE at n=1e5, < 30 s",
                     ok, "; ".join(details) + f"; {elapsed:.1f} s")


def test_criterion_06_failure_rate_table(default_campaign):
    report, elapsed = default_campaign
    noncorr_i = report.failure_rate_by_looks(I, POLY)
    window_ok = 0.2661 <= noncorr_i[1.0] <= 0.3685
    corrected = {(m.value, looks): report.failure_rate_by_looks(m, CORR)[looks]
                 for m in (I, A) for looks in (1.0, 3.0, 8.0)}
    corrected_ok = all(rate <= 0.03 for rate in corrected.values())
    monotone_ok = all(
        rates[1.0] >= rates[3.0] >= rates[8.0]
        for rates in (noncorr_i, report.failure_rate_by_looks(A, POLY)))
    runtime_ok = elapsed < 600.0
    detail = (f"noncorrected L=1 intensity {noncorr_i[1.0]:.4f} in [0.2661, 0.3685]: "
              f"{window_ok}; corrected max "
              f"{max(corrected.values()):.4f} <= 0.03: {corrected_ok} "
              + str({k: round(v, 4) for k, v in corrected.items()})
              + f"; monotone: {monotone_ok}; {elapsed:.0f} s < 600 s: {runtime_ok}")
    ok = window_ok and corrected_ok and monotone_ok and runtime_ok
    record_criterion(6, "failure-rate table: L=1 window, corrected <= 3%, monotone in L",
                     ok, detail)


def test_criterion_07_speedup_ordering():
    p = G0Params(-3.0, unit_mean_gamma(-3.0), 8.0)
    detail = []
    ok = True
    for n in (9, 121, 1000):
        samples = [sample_g0(p, I, n, seed=7000 + 13 * n + i) for i in range(200)]
        for s in samples[:20]:
            for kind in (TRAD, POLY, CORR):
                estimate_alpha(s, 8.0, I, kind)
        times = {kind: [] for kind in (TRAD, POLY, CORR)}
        for s in samples:
            for kind in (TRAD, POLY, CORR):
                times[kind].append(min(estimate_alpha(s, 8.0, I, kind).elapsed_ns
                                       for _ in range(3)))
        med = {kind: statistics.median(t) for kind, t in times.items()}
        good = med[POLY] < med[TRAD] and med[CORR] < med[TRAD]
        ok = ok and good
        detail.append(f"n={n}: trad {med[TRAD] / 1e3:.1f} us, poly {med[POLY] / 1e3:.1f} us, "
                      f"corrected {med[CORR] / 1e3:.1f} us")
    record_criterion(7, "median time: poly < traditional and corrected < traditional",
                     ok, "; ".join(detail))


def test_criterion_08_mse_trends(default_campaign):
    report, _ = default_campaign
    cfg = MCConfig()
    trend_violations = []
    for est in (TRAD, POLY, CORR):
        for model in cfg.models:
            for alpha in cfg.alphas:
                for looks in cfg.looks:
                    small = report.cell(model, est, alpha, looks, 9)
                    large = report.cell(model, est, alpha, looks, 1000)
                    if small.successes < 50 or large.successes < 50:
                        continue
                    if not large.mse < small.mse:
                        trend_violations.append(
                            (model.value, est.value, alpha, looks))
    comparable = better = 0
    for model in cfg.models:
        for alpha in cfg.alphas:
            for looks in cfg.looks:
                for n in cfg.sizes:
                    plain = report.cell(model, POLY, alpha, looks, n).mse
                    corr = report.cell(model, CORR, alpha, looks, n).mse
                    if plain is None or corr is None:
                        continue
                    comparable += 1
                    better += corr <= plain
    ratio = better / comparable
    ok = not trend_violations and ratio >= 0.70
    record_criterion(
        8, "MSE falls from n=9 to n=1000; corrected <= plain in >= 70% of cells", ok,
        f"trend violations {trend_violations or 'none'} over traditional/poly/corrected "
        f"(fmolc excluded: its plug-in limit -1/sqrt(trigamma(-alpha)) keeps a squared "
        f"bias ~8.3 at alpha=-5, so its MSE cannot fall below that as n grows); "
        f"corrected <= plain in {better}/{comparable} = {ratio:.1%}")


def test_criterion_09_two_region_mosaic():
    left = sample_g0(G0Params(-1.5, unit_mean_gamma(-1.5), 4.0), I, 100 * 100,
                     seed=900).values.reshape(100, 100)
    right = sample_g0(G0Params(-8.0, unit_mean_gamma(-8.0), 4.0), I, 100 * 100,
                      seed=901).values.reshape(100, 100)
    r = Raster(width=200, height=100, pixels=np.hstack([left, right]).ravel(),
               model=I, looks=4.0)
    t0 = time.perf_counter()
    m = roughness_map(r, window=11, kind=CORR, parallelism=1)
    elapsed = time.perf_counter() - t0
    left_mean = float(np.nanmean(m.alpha[:, 5:100]))
    right_mean = float(np.nanmean(m.alpha[:, 100:195]))
    deterministic = True
    for workers in (2, 3):
        redo = roughness_map(r, window=11, kind=CORR, parallelism=workers)
        deterministic = deterministic and np.array_equal(
            m.alpha, redo.alpha, equal_nan=True) and m.n_failures == redo.n_failures
    ok = (left_mean > right_mean and left_mean - right_mean >= 3.0
          and deterministic and elapsed < 60.0)
    record_criterion(9, "mosaic region means ordered, separated >= 3, thread-stable, < 60 s",
                     ok, f"left {left_mean:.3f}, right {right_mean:.3f}, "
                         f"sep {left_mean - right_mean:.3f}, deterministic {deterministic}, "
                         f"{elapsed:.1f} s")


def test_criterion_10_real_data_substitution_documented():
    with open("README.md") as fh:
        text = fh.read().lower()
    ok = ("not reproducible" in text and "mosaic" in text
          and "ratio" in text and "real" in text)
    record_criterion(10, "README records the unavailable real-data run and substitutes",
                     ok, "README.md discusses the substitution" if ok
                     else "README.md missing the substitution note")
