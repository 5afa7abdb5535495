"""Monte Carlo sampler tests: determinism, moments, and law cross-checks."""
import math

import numpy as np
import pytest
from scipy import stats

from ofdm_im import (
    ComplexSampleSet,
    EmSettings,
    HexScenario,
    MoGDist,
    MultiCellConfig,
    PathlossModel,
    TrialPlan,
    analytic_sinr_cdf,
    confusion_mutual_info,
    empirical_cdf,
    empirical_mutual_info,
    exact_mog_enumeration,
    index_error_prob,
    interferer_distances,
    rate_index,
    mog_pdf_real,
    qam_constellation,
    received_power,
    sample_noise_plus_ici,
    sample_noise_plus_ici_powers,
    sample_received,
    simulate_index_error,
    simulate_sinr,
    sum_rate_upper_bound,
)
from ofdm_im.mc import derive_seed

BASE_FIELD = MultiCellConfig(density=1e-4, n_f=4, alpha=3.0, tx_power=40.0,
                       serving_distance=50.0, noise_var=7.5e-11)


def test_trial_plan_validation_and_chunks():
    plan = TrialPlan(trials=10, master_seed=1, chunk_size=4)
    assert plan.chunks() == [(0, 4), (1, 4), (2, 2)]
    assert TrialPlan(trials=5, master_seed=1).chunk_size == 5
    assert TrialPlan(trials=10 ** 7, master_seed=1).chunk_size == 250_000
    with pytest.raises(ValueError):
        TrialPlan(trials=0, master_seed=1)
    with pytest.raises(ValueError):
        TrialPlan(trials=10, master_seed=-1)
    with pytest.raises(ValueError):
        TrialPlan(trials=10, master_seed=2 ** 64)
    with pytest.raises(ValueError):
        TrialPlan(trials=10, master_seed=1, chunk_size=11)
    with pytest.raises(ValueError):
        TrialPlan(trials=10, master_seed=1, chunk_size=0)


def test_derive_seed_is_stable_and_distinct():
    seeds = [derive_seed(20250801, i) for i in range(10)]
    assert len(set(seeds)) == 10
    assert all(0 <= s < 2 ** 64 for s in seeds)
    assert seeds == [derive_seed(20250801, i) for i in range(10)]
    assert derive_seed(20250802, 0) != seeds[0]


def test_qam_constellation_normalization():
    for order in (4, 16, 64):
        pts = qam_constellation(order)
        assert len(pts) == order
        assert math.isclose(float(np.mean(np.abs(pts) ** 2)), 1.0,
                            rel_tol=1e-12)
        assert abs(complex(pts.sum())) < 1e-12
    # 4QAM is constant modulus
    assert np.allclose(np.abs(qam_constellation(4)), 1.0)
    with pytest.raises(ValueError):
        qam_constellation(8)


def test_index_error_uniform_limit():
    est = simulate_index_error(1e-9, 4, TrialPlan(200_000, 20250801))
    assert abs(est.estimate - 0.75) <= est.three_sigma()
    assert est.confusion.shape == (4, 4)
    assert est.confusion.sum() == 200_000


def test_index_error_matches_closed_form():
    plan_seed = 20250801
    for rho in (1.0, 10.0, 100.0):
        for n_f in (2, 4, 8):
            est = simulate_index_error(rho, n_f,
                                       TrialPlan(1_000_000, plan_seed))
            want = index_error_prob(rho, n_f)
            assert abs(est.estimate - want) <= est.three_sigma(), (rho, n_f)


def test_index_error_deterministic_across_workers():
    plan = TrialPlan(30_000, 7, chunk_size=7_000)
    a = simulate_index_error(2.0, 4, plan, workers=1)
    b = simulate_index_error(2.0, 4, plan, workers=3)
    assert a.estimate == b.estimate
    assert np.array_equal(a.confusion, b.confusion)
    assert a.three_sigma() == 3.0 * a.stderr


def test_index_error_domain():
    plan = TrialPlan(100, 1)
    with pytest.raises(ValueError):
        simulate_index_error(0.0, 4, plan)
    with pytest.raises(ValueError):
        simulate_index_error(1.0, 1, plan)


def test_confusion_mutual_info_limits():
    perfect = np.diag([250, 250, 250, 250])
    assert math.isclose(confusion_mutual_info(perfect), 2.0, rel_tol=1e-12)
    uniform = np.full((4, 4), 100)
    assert abs(confusion_mutual_info(uniform)) < 1e-12
    with pytest.raises(ValueError):
        confusion_mutual_info(np.zeros((2, 2)))
    # the confusion-matrix rate tracks the symmetric-channel closed form
    est = simulate_index_error(1000.0, 4, TrialPlan(50_000, 3))
    assert abs(confusion_mutual_info(est.confusion) - rate_index(1000.0, 4)) < 0.03


def test_sinr_no_interference_limit():
    cfg = MultiCellConfig(density=1e-12, n_f=8, alpha=3.0, tx_power=40.0,
                          serving_distance=50.0, noise_var=7.5e-11)
    draws = simulate_sinr(cfg, TrialPlan(20_000, 11))
    scale = cfg.tx_power * cfg.serving_distance ** (-cfg.alpha) / cfg.noise_var
    # with the field this sparse the law is the pure-fading exponential
    assert stats.kstest(draws, "expon", args=(0.0, scale)).pvalue > 0.05


def test_sinr_matches_analytic_cdf_quick():
    draws = simulate_sinr(BASE_FIELD, TrialPlan(30_000, 20250801))
    grid_db = np.arange(-20.0, 41.0, 1.0)
    grid = 10.0 ** (grid_db / 10.0)
    gap = np.abs(empirical_cdf(draws, grid) - analytic_sinr_cdf(BASE_FIELD, grid))
    assert float(gap.max()) < 0.02


def test_sinr_thinning_equivalence():
    # the n_f-thinned field at density lambda and the unthinned field at
    # lambda/n_f follow the same law; independent seeds, two-sample KS
    cfg_a = MultiCellConfig(density=1e-4, n_f=4, alpha=3.0, tx_power=40.0,
                            serving_distance=50.0, noise_var=7.5e-11)
    cfg_b = MultiCellConfig(density=2.5e-5, n_f=1, alpha=3.0, tx_power=40.0,
                            serving_distance=50.0, noise_var=7.5e-11)
    a = simulate_sinr(cfg_a, TrialPlan(100_000, 707))
    b = simulate_sinr(cfg_b, TrialPlan(100_000, 808))
    assert stats.ks_2samp(a, b).pvalue > 0.05


def test_sinr_deterministic_across_workers():
    plan = TrialPlan(4_000, 13, chunk_size=1_000)
    a = simulate_sinr(BASE_FIELD, plan, workers=1)
    b = simulate_sinr(BASE_FIELD, plan, workers=3)
    assert np.array_equal(a, b)


def test_empirical_cdf_basics():
    samples = np.array([1.0, 2.0, 2.0, 4.0])
    grid = np.array([0.5, 1.0, 2.0, 3.0, 5.0])
    assert np.allclose(empirical_cdf(samples, grid),
                       [0.0, 0.25, 0.75, 0.75, 1.0])


def test_noise_plus_ici_single_interferer_variance():
    t1 = 3.2e-4
    noise_var = 1e-4
    n_f = 4
    out = sample_noise_plus_ici_powers([t1], n_f, 4, noise_var,
                                       TrialPlan(1_000_000, 20250801))
    psi = out.samples
    want = noise_var + t1 / n_f
    var = float(np.mean(np.abs(psi) ** 2))
    assert abs(var - want) < 0.02 * want
    # zero mean, separately per part, within four standard errors
    for part in (psi.real, psi.imag):
        se = float(part.std()) / math.sqrt(len(part))
        assert abs(float(part.mean())) < 4.0 * se
    assert out.meta["kind"] == "noise_plus_ici"
    assert out.meta["powers"] == (t1,)


def test_noise_plus_ici_matches_enumeration_density():
    # four-interferer toy: histogram of the real part against the exact
    # mixture real-part density, L1 over the line
    model = PathlossModel(alpha=3.0, tx_power=40.0)
    powers = [received_power(model, d)
              for d in (50.0, 86.60254037844386, 86.60254037844386,
                        132.28756555322952)]
    noise_var = 2e-4
    n_f = 4
    exact = exact_mog_enumeration(powers, n_f, noise_var)
    out = sample_noise_plus_ici_powers(powers, n_f, 4, noise_var,
                                       TrialPlan(200_000, 20250801))
    spread = math.sqrt(max(exact.variances) / 2.0)
    edges = np.linspace(-6.0 * spread, 6.0 * spread, 121)
    hist, _ = np.histogram(out.samples.real, bins=edges, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    width = edges[1] - edges[0]
    l1 = float(np.sum(np.abs(hist - mog_pdf_real(exact, centers))) * width)
    assert l1 < 0.04


def test_noise_plus_ici_hex_matches_power_list():
    scenario = HexScenario()
    model = PathlossModel(alpha=3.0, tx_power=40.0)
    plan = TrialPlan(20_000, 5)
    via_hex = sample_noise_plus_ici(scenario, model, 4, 4, 7.5e-11, plan)
    powers = [received_power(model, d) for d in interferer_distances(scenario)]
    via_powers = sample_noise_plus_ici_powers(powers, 4, 4, 7.5e-11, plan)
    assert np.array_equal(via_hex.samples, via_powers.samples)
    want = 7.5e-11 + sum(powers) / 4.0
    var = float(np.mean(np.abs(via_hex.samples) ** 2))
    assert abs(var - want) < 0.05 * want


def test_noise_plus_ici_deterministic_across_workers():
    plan = TrialPlan(30_000, 17, chunk_size=8_000)
    args = ([1e-4, 2e-4], 4, 16, 5e-5)
    a = sample_noise_plus_ici_powers(*args, plan, workers=1)
    b = sample_noise_plus_ici_powers(*args, plan, workers=3)
    assert np.array_equal(a.samples, b.samples)


def test_noise_plus_ici_validation():
    plan = TrialPlan(100, 1)
    with pytest.raises(ValueError):
        sample_noise_plus_ici_powers([], 4, 4, 1e-4, plan)
    with pytest.raises(ValueError):
        sample_noise_plus_ici_powers([-1.0], 4, 4, 1e-4, plan)
    with pytest.raises(ValueError):
        sample_noise_plus_ici_powers([1e-4], 1, 4, 1e-4, plan)
    with pytest.raises(ValueError):
        sample_noise_plus_ici_powers([1e-4], 4, 4, 0.0, plan)
    with pytest.raises(ValueError):
        sample_noise_plus_ici(HexScenario(), PathlossModel(3.0, 40.0),
                              4, 4, -1.0, plan)


def test_received_sample_variance():
    scenario = HexScenario()
    model = PathlossModel(alpha=3.0, tx_power=40.0)
    noise_var = 7.5e-11
    out = sample_received(scenario, model, 4, 4, noise_var,
                          TrialPlan(300_000, 20250801))
    serving = received_power(model, scenario.serving_distance)
    inter = sum(received_power(model, d)
                for d in interferer_distances(scenario))
    want = serving + noise_var + inter / 4.0
    var = float(np.mean(np.abs(out.samples) ** 2))
    assert abs(var - want) < 0.03 * want
    assert out.meta["kind"] == "received"
    plan = TrialPlan(20_000, 23, chunk_size=5_000)
    a = sample_received(scenario, model, 4, 4, noise_var, plan, workers=1)
    b = sample_received(scenario, model, 4, 4, noise_var, plan, workers=3)
    assert np.array_equal(a.samples, b.samples)


def test_mutual_info_gaussian_limit():
    # far-away interferers leave a pure serving-plus-noise channel; with a
    # constant-modulus constellation the received signal is exactly
    # Gaussian, so the estimate must land on log2(1 + snr)
    scenario = HexScenario(isd=1e6, serving_distance=50.0)
    model = PathlossModel(alpha=3.0, tx_power=40.0)
    serving = received_power(model, scenario.serving_distance)
    snr = 10.0
    noise_var = serving / snr
    est = empirical_mutual_info(scenario, model, 4, 4, noise_var,
                                TrialPlan(50_000, 20250801),
                                EmSettings(q_prime=1, restarts=1))
    assert abs(est.mi - math.log2(1.0 + snr)) < 0.05
    assert est.mi == est.h_received - est.h_noise_ici


def test_mutual_info_below_closed_form_bound():
    scenario = HexScenario()
    model = PathlossModel(alpha=3.0, tx_power=40.0)
    est = empirical_mutual_info(scenario, model, 4, 4, 7.5e-11,
                                TrialPlan(20_000, 20250801),
                                EmSettings(q_prime=2, restarts=2))
    bound = sum_rate_upper_bound(est.fit_noise_ici, est.fit_received,
                                 convention="consistent")
    assert est.mi <= bound + 1e-12
    assert est.stderr > 0


def test_mutual_info_reproducible_and_guarded():
    scenario = HexScenario()
    model = PathlossModel(alpha=3.0, tx_power=40.0)
    settings = EmSettings(q_prime=2, restarts=1)
    a = empirical_mutual_info(scenario, model, 4, 4, 7.5e-11,
                              TrialPlan(10_000, 31), settings)
    b = empirical_mutual_info(scenario, model, 4, 4, 7.5e-11,
                              TrialPlan(10_000, 31), settings, workers=3)
    assert a.mi == b.mi
    assert a.fit_received == b.fit_received
    assert a.fit_noise_ici == b.fit_noise_ici
    with pytest.raises(ValueError):
        empirical_mutual_info(scenario, model, 4, 4, 7.5e-11,
                              TrialPlan(9_999, 31), settings)


def test_complex_sample_set_csv(tmp_path):
    samples = np.array([0.25 + 1j, -2.0 - 0.125j])
    out = ComplexSampleSet(samples, {"kind": "demo", "n_f": 4})
    path = out.write_csv(tmp_path / "samples.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "# kind = demo"
    assert lines[1] == "# n_f = 4"
    assert lines[2] == "re,im"
    assert lines[3] == "0.25,1.0"
    assert lines[4] == "-2.0,-0.125"
    with pytest.raises(ValueError):
        ComplexSampleSet(np.array([], dtype=complex))
    with pytest.raises(ValueError):
        ComplexSampleSet(np.array([np.nan + 0j]))


def test_mog_dist_equality_used_by_reproducibility():
    # frozen dataclass equality is field-wise; the reproducibility tests
    # above rely on it
    a = MoGDist((1.0,), (2.0,))
    b = MoGDist((1.0,), (2.0,))
    assert a == b
