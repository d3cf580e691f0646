import math

import numpy as np
import pytest

from relaysop.expdist import hypoexp_pdf
from relaysop.model import NetworkConfig, Scheme, SecrecyTarget
from relaysop.montecarlo import (ChannelRealization, McSettings, _sample_chunk,
                                 _scheme_snrs, estimate_sop, run_scheme,
                                 sample_realization)

SEED = 20250809


def fig2_config(n, snr_db):
    from relaysop.presets import family_config
    return family_config("fig2", n, snr_db)


class TestSampling:
    def test_sample_mean_matches_inverse_rate(self):
        cfg = NetworkConfig(1, (1.0,), (1.0,), 0.5, (1.0,), 1.0)
        _, _, gsd, _, _ = _sample_chunk(cfg, SEED, 0, 1_000_000)
        # E = 1/beta = 2, sigma of the mean = 2/sqrt(n)
        assert abs(gsd.mean() - 2.0) <= 3.0 * (2.0 / 1e3)

    def test_tail_probability(self):
        cfg = NetworkConfig(1, (1.0,), (1.0,), 1.0, (1.0,), 1.0)
        _, _, _, gke, _ = _sample_chunk(cfg, SEED, 0, 1_000_000)
        p = np.mean(gke[:, 0] > 1.0)
        sigma = math.sqrt(math.exp(-1.0) * (1 - math.exp(-1.0)) / 1e6)
        assert abs(p - math.exp(-1.0)) <= 3.0 * sigma

    def test_same_seed_same_realizations(self):
        cfg = fig2_config(3, 10.0)
        r1 = [sample_realization(cfg, np.random.default_rng(99)) for _ in range(1)][0]
        r2 = sample_realization(cfg, np.random.default_rng(99))
        assert r1 == r2

    def test_realization_validates(self):
        with pytest.raises(ValueError):
            ChannelRealization((1.0,), (1.0,), -0.5, (1.0,), 0.2)


class TestRunScheme:
    # one worked realization, all four schemes
    R = ChannelRealization(gamma_sk=(4.0, 10.0), gamma_kd=(6.0, 1.0),
                           gamma_sd=2.0, gamma_ke=(3.0, 5.0), gamma_se=1.0)

    def test_max_e(self):
        assert run_scheme(self.R, Scheme.MAX_E) == (2.0 + 1.0, 1.0 + 5.0)

    def test_min_e(self):
        assert run_scheme(self.R, Scheme.MIN_E) == (2.0 + 4.0, 1.0 + 3.0)

    def test_mrc_mrc(self):
        assert run_scheme(self.R, Scheme.MRC_MRC) == (2.0 + 4.0 + 1.0, 1.0 + 3.0 + 5.0)

    def test_max_mrc(self):
        assert run_scheme(self.R, Scheme.MAX_MRC) == (2.0 + 4.0 + 1.0, 1.0 + 5.0)

    def test_tie_breaks_to_lowest_index(self):
        r = ChannelRealization((1.0, 1.0), (1.0, 1.0), 0.0, (2.0, 2.0), 0.0)
        # both taps equal: index 0 wins for both selections
        assert run_scheme(r, Scheme.MAX_E) == run_scheme(r, Scheme.MIN_E)

    def test_vectorized_agrees_with_scalar(self):
        cfg = fig2_config(3, 12.0)
        arrays = _sample_chunk(cfg, SEED, 0, 200)
        gsk, gkd, gsd, gke, gse = arrays
        for scheme in Scheme:
            gm, ge = _scheme_snrs(arrays, scheme)
            for i in range(200):
                r = ChannelRealization(gsk[i], gkd[i], float(gsd[i]),
                                       gke[i], float(gse[i]))
                m, e = run_scheme(r, scheme)
                assert m == pytest.approx(gm[i], rel=1e-12)
                assert e == pytest.approx(ge[i], rel=1e-12)


class TestEstimate:
    def test_symmetric_mrc_mrc_is_half(self):
        cfg = NetworkConfig(1, (0.6,), (1.4,), 1.0, (2.0,), 1.0)
        res = estimate_sop(cfg, Scheme.MRC_MRC, SecrecyTarget(0.0),
                           McSettings(1_000_000, SEED))
        sigma = math.sqrt(0.25 / 1e6)
        assert abs(res.value - 0.5) <= 4.0 * sigma

    def test_against_analytic(self):
        from relaysop.analytic import sop_max_e
        cfg = fig2_config(2, 20.0)
        target = SecrecyTarget(0.0)
        res = estimate_sop(cfg, Scheme.MAX_E, target, McSettings(1_000_000, SEED))
        assert abs(res.value - sop_max_e(cfg, target).value) <= 4 * res.ci_halfwidth

    def test_repeatable(self):
        cfg = fig2_config(2, 10.0)
        s = McSettings(trials=300_000, seed=42)
        a = estimate_sop(cfg, Scheme.MIN_E, SecrecyTarget(1.0), s)
        b = estimate_sop(cfg, Scheme.MIN_E, SecrecyTarget(1.0), s)
        assert a == b

    def test_worker_count_does_not_change_result(self):
        cfg = fig2_config(4, 25.0)
        s = McSettings(trials=300_000, seed=7, chunk_size=1 << 14)
        results = [estimate_sop(cfg, Scheme.MAX_MRC, SecrecyTarget(1.0), s, workers=w)
                   for w in (1, 4, 16)]
        assert results[0] == results[1] == results[2]

    def test_partial_last_chunk(self):
        cfg = fig2_config(1, 10.0)
        s = McSettings(trials=100_001, seed=3, chunk_size=1 << 15)
        res = estimate_sop(cfg, Scheme.MAX_E, SecrecyTarget(0.0), s)
        assert res.trials == 100_001

    def test_wilson_halfwidth_when_rare(self):
        # high SNR, strong eavesdropper threshold: nearly no outages
        cfg = fig2_config(4, 40.0)
        res = estimate_sop(cfg, Scheme.MAX_MRC, SecrecyTarget(0.0),
                           McSettings(trials=20_000, seed=5))
        assert res.value < 1e-3
        assert res.ci_halfwidth > 0.0  # Wilson keeps the interval informative

    def test_result_carries_provenance(self):
        cfg = fig2_config(1, 10.0)
        res = estimate_sop(cfg, Scheme.MRC_MRC, SecrecyTarget(0.0),
                           McSettings(trials=1000, seed=11))
        assert res.trials == 1000 and res.seed == 11
        assert res.ci_halfwidth is not None

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            McSettings(trials=0, seed=1)

    def test_invalid_config_rejected(self):
        cfg = NetworkConfig(1, (1.0,), (1.0,), -1.0, (1.0,), 1.0)
        with pytest.raises(ValueError):
            estimate_sop(cfg, Scheme.MAX_E, SecrecyTarget(0.0),
                         McSettings(trials=10, seed=1))


class TestPointwiseStructure:
    def test_eavesdropper_snr_dominance_chain(self):
        cfg = fig2_config(4, 15.0)
        arrays = _sample_chunk(cfg, SEED, 0, 100_000)
        _, ge_mrc = _scheme_snrs(arrays, Scheme.MRC_MRC)
        gm_maxmrc, ge_maxmrc = _scheme_snrs(arrays, Scheme.MAX_MRC)
        gm_maxe, ge_maxe = _scheme_snrs(arrays, Scheme.MAX_E)
        gm_mine, ge_mine = _scheme_snrs(arrays, Scheme.MIN_E)
        assert np.all(ge_mrc >= ge_maxmrc)
        assert np.all(ge_maxmrc >= ge_maxe)  # equal: both take the best tap
        assert np.all(ge_maxe >= ge_mine)
        # destination MRC sees at least any single selected branch
        assert np.all(gm_maxmrc >= gm_maxe)
        assert np.all(gm_maxmrc >= gm_mine)

    def test_event_forms_identical_per_trial(self):
        cfg = fig2_config(2, 10.0)
        arrays = _sample_chunk(cfg, SEED, 0, 100_000)
        gm, ge = _scheme_snrs(arrays, Scheme.MRC_MRC)
        for rs in (0.0, 0.3):
            target = SecrecyTarget(rs)
            ratio_form = (1.0 + gm) < target.rho * (1.0 + ge)
            log_form = 0.5 * np.log2((1.0 + gm) / (1.0 + ge)) < rs
            assert np.array_equal(ratio_form, log_form)

    def test_legit_sum_matches_hypoexp_cdf(self):
        # Kolmogorov-Smirnov at the 1% level against the mixture CDF
        cfg = NetworkConfig(2, (0.5, 0.75), (0.7, 0.45), 0.9, (1.0, 1.0), 1.0)
        n = 1_000_000
        gsk, gkd, gsd, _, _ = _sample_chunk(cfg, SEED, 0, n)
        total = gsd + np.minimum(gsk, gkd).sum(axis=1)
        mix = hypoexp_pdf([cfg.beta_sd, *cfg.beta_kD])
        coeffs = np.array([float(c) for c, _ in mix.terms])
        rates = np.array([r for _, r in mix.terms])
        xs = np.sort(total)
        cdf = 1.0 - ((coeffs / rates) * np.exp(-np.outer(xs, rates))).sum(axis=1)
        hi = np.arange(1, n + 1) / n
        lo = np.arange(0, n) / n
        ks = max(np.max(np.abs(hi - cdf)), np.max(np.abs(cdf - lo)))
        assert ks < 1.63 / math.sqrt(n)
