import numpy as np
import pytest

from irslink.channel import ScenarioConfig
from irslink.experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentResult,
    ResultRow,
    channel_stream,
    run_interference_vs_n,
    run_power_vs_distance,
    run_power_vs_n,
)
from irslink.beamforming import quantization_loss_bound

DIST_CFG = ExperimentConfig(
    scenario=ScenarioConfig(),
    sweep=("d", (25.0, 40.0, 50.0)),
    schemes=("joint", "bs_user_mrt", "bs_irs_mrt", "no_irs"),
    n_realizations=30,
    master_seed=11,
    keep_samples=True,
)

N_CFG = ExperimentConfig(
    scenario=ScenarioConfig(user_position=(50.0, 0.0)),
    sweep=("n", (20.0, 40.0)),
    schemes=("continuous", "b1", "b2"),
    n_realizations=25,
    master_seed=12,
    keep_samples=True,
)

INT_CFG = ExperimentConfig(
    scenario=ScenarioConfig(m_antennas=1, user_position=(50.0, 0.0)),
    sweep=("n", (10.0, 30.0)),
    schemes=("joint_amp_phase", "phase_only", "no_irs"),
    n_realizations=25,
    master_seed=13,
    keep_samples=True,
)


class TestExperimentConfig:
    def test_rejects_zero_realizations(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(n_realizations=0)

    def test_rejects_non_increasing_sweep(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(sweep=("d", (30.0, 30.0)))
        with pytest.raises(ConfigError):
            ExperimentConfig(sweep=("d", (30.0, 20.0)))

    def test_rejects_unknown_sweep_name(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(sweep=("q", (1.0, 2.0)))

    def test_rejects_oversized_seed(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(master_seed=1 << 64)


class TestResultFormatting:
    def test_csv_shape_and_order(self):
        res = ExperimentResult(
            rows=[
                ResultRow(30.0, "b_scheme", 1.5, "dBm", 10, 3),
                ResultRow(20.0, "z_scheme", -2.25, "dBm", 10, 3),
                ResultRow(20.0, "a_scheme", 0.125, "dBm", 10, 3),
            ]
        )
        text = res.to_csv_text()
        lines = text.strip().split("\n")
        assert lines[0] == "sweep_value,scheme,metric_value,metric_unit,n_realizations,master_seed"
        assert lines[1] == "20,a_scheme,0.125000,dBm,10,3"
        assert lines[2] == "20,z_scheme,-2.250000,dBm,10,3"
        assert lines[3] == "30,b_scheme,1.500000,dBm,10,3"

    def test_value_lookup(self):
        res = ExperimentResult(rows=[ResultRow(20.0, "x", 1.0, "dB", 1, 0)])
        assert res.value(20.0, "x") == 1.0
        with pytest.raises(KeyError):
            res.value(21.0, "x")


@pytest.fixture(scope="module")
def dist_result():
    return run_power_vs_distance(DIST_CFG)


@pytest.fixture(scope="module")
def n_result():
    return run_power_vs_n(N_CFG)


@pytest.fixture(scope="module")
def int_result():
    return run_interference_vs_n(INT_CFG)


class TestPowerVsDistance:
    def test_reproducible_and_worker_invariant(self, dist_result):
        again = run_power_vs_distance(DIST_CFG)
        parallel = run_power_vs_distance(DIST_CFG, workers=3)
        assert dist_result.to_csv_text() == again.to_csv_text() == parallel.to_csv_text()

    def test_one_row_per_sweep_and_scheme(self, dist_result):
        assert len(dist_result.rows) == 3 * 4
        assert all(np.isfinite(r.metric_value) for r in dist_result.rows)

    def test_no_irs_power_increases_with_distance(self, dist_result):
        powers = [dist_result.value(d, "no_irs") for d in (25.0, 40.0, 50.0)]
        assert powers[0] < powers[1] < powers[2]

    def test_surface_proximity_dip(self, dist_result):
        assert dist_result.value(50.0, "joint") < dist_result.value(40.0, "joint")
        assert dist_result.value(25.0, "joint") < dist_result.value(40.0, "joint")

    def test_per_sample_dominance(self, dist_result):
        for d in (25.0, 40.0, 50.0):
            joint = dist_result.samples[(d, "joint")]
            bs_user = dist_result.samples[(d, "bs_user_mrt")]
            no_irs = dist_result.samples[(d, "no_irs")]
            assert np.all(joint <= bs_user + 1e-6)
            assert np.all(bs_user <= no_irs + 1e-6)

    def test_unknown_scheme_rejected(self):
        bad = ExperimentConfig(sweep=("d", (30.0,)), schemes=("joint", "zf"), n_realizations=2)
        with pytest.raises(ConfigError):
            run_power_vs_distance(bad)

    def test_wrong_sweep_variable_rejected(self):
        bad = ExperimentConfig(sweep=("n", (10.0,)), schemes=("joint",), n_realizations=2)
        with pytest.raises(ConfigError):
            run_power_vs_distance(bad)


class TestPowerVsN:
    def test_reproducible_and_worker_invariant(self, n_result):
        assert (
            n_result.to_csv_text()
            == run_power_vs_n(N_CFG).to_csv_text()
            == run_power_vs_n(N_CFG, workers=4).to_csv_text()
        )

    def test_emits_power_quant_and_loss_rows(self, n_result):
        schemes = {r.scheme for r in n_result.rows}
        assert schemes == {
            "continuous", "b1", "b2", "b1_quant", "b2_quant",
            "loss_b1", "loss_b2", "loss_b1_quant", "loss_b2_quant",
        }
        units = {r.scheme: r.metric_unit for r in n_result.rows}
        assert units["b1"] == "dBm" and units["loss_b1"] == "dB"

    def test_more_elements_need_less_power(self, n_result):
        for scheme in ("continuous", "b1", "b2"):
            assert n_result.value(40.0, scheme) < n_result.value(20.0, scheme)

    def test_quantization_costs_power(self, n_result):
        for n in (20.0, 40.0):
            assert n_result.value(n, "loss_b1") > n_result.value(n, "loss_b2") > 0.0

    def test_refinement_never_hurts(self, n_result):
        for n in (20.0, 40.0):
            for b in (1, 2):
                assert n_result.value(n, f"b{b}") <= n_result.value(n, f"b{b}_quant") + 1e-9

    def test_loss_stays_below_asymptotic_bound(self, n_result):
        for n in (20.0, 40.0):
            for b in (1, 2):
                bound = quantization_loss_bound(b)
                assert n_result.value(n, f"loss_b{b}") <= bound + 0.3
                assert n_result.value(n, f"loss_b{b}_quant") <= bound + 0.3

    def test_rejects_fractional_element_count(self):
        bad = ExperimentConfig(sweep=("n", (10.5,)), schemes=("continuous",), n_realizations=2)
        with pytest.raises(ConfigError):
            run_power_vs_n(bad)


class TestInterferenceVsN:
    def test_reproducible_and_worker_invariant(self, int_result):
        assert (
            int_result.to_csv_text()
            == run_interference_vs_n(INT_CFG).to_csv_text()
            == run_interference_vs_n(INT_CFG, workers=3).to_csv_text()
        )

    def test_requires_single_antenna(self):
        bad = ExperimentConfig(
            scenario=ScenarioConfig(m_antennas=5),
            sweep=("n", (10.0,)),
            schemes=("no_irs",),
            n_realizations=2,
        )
        with pytest.raises(ConfigError, match="m_antennas = 1"):
            run_interference_vs_n(bad)

    def test_no_irs_level_is_flat_across_n(self, int_result):
        # the direct channel draw is shared across sweep values
        assert int_result.value(10.0, "no_irs") == int_result.value(30.0, "no_irs")

    def test_scheme_ordering(self, int_result):
        for n in (10.0, 30.0):
            joint = int_result.value(n, "joint_amp_phase")
            phase = int_result.value(n, "phase_only")
            none = int_result.value(n, "no_irs")
            assert joint <= phase <= none

    def test_margin_samples_recorded(self, int_result):
        margins = int_result.samples[(30.0, "margin")]
        assert margins.shape == (25,)

    def test_full_cancellation_when_feasible(self, int_result):
        for n in (10.0, 30.0):
            margins = int_result.samples[(n, "margin")]
            joint = int_result.samples[(n, "joint_amp_phase")]
            none = int_result.samples[(n, "no_irs")]
            feasible = margins >= 0
            assert np.all(joint[feasible] <= 1e-6 * none[feasible])

    def test_median_residual_vanishes_with_enough_elements(self):
        # at sixty elements the cascade is strong enough on nearly every
        # draw, so the median residual is essentially zero
        cfg = ExperimentConfig(
            scenario=ScenarioConfig(m_antennas=1),
            sweep=("n", (60.0,)),
            schemes=("joint_amp_phase", "no_irs"),
            n_realizations=50,
            master_seed=14,
            keep_samples=True,
        )
        res = run_interference_vs_n(cfg)
        joint = res.samples[(60.0, "joint_amp_phase")]
        direct = res.samples[(60.0, "no_irs")]
        assert np.median(joint) < 1e-6 * np.median(direct)


class TestChannelStream:
    def test_streams_shared_across_sweeps_differ_across_realizations(self):
        a = channel_stream(5, 0)
        b = channel_stream(5, 1)
        assert a != b
        assert channel_stream(5, 0) == a
