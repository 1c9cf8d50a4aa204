import random

import pytest

from waitr.env_model import Event, GridSpec
from waitr.ted import (
    EventDensitySeries,
    TEDConfig,
    activate,
    activations_to_csv,
    density_rate,
    density_series_for_cells,
    forecast_weights,
)


def series(node, rho, dt=1.0):
    return EventDensitySeries(node=node, rho=list(rho), frame_interval=dt)


class TestDensityRate:
    def test_constant_rho_is_flat(self):
        s = series(0, [3, 3, 3, 3])
        for t in range(1, 4):
            assert density_rate(s, t) == 0.0

    def test_direct_difference(self):
        assert density_rate(series(0, [1, 4]), 1) == 3.0

    def test_frame_interval_scales(self):
        assert density_rate(series(0, [1, 4], dt=2.0), 1) == 1.5

    def test_random_series_matches_elementwise_oracle(self):
        rng = random.Random(17)
        rho = [rng.uniform(0, 10) for _ in range(30)]
        s = series(1, rho)
        for t in range(1, 30):
            assert density_rate(s, t) == rho[t] - rho[t - 1]

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            density_rate(series(0, [1, 2]), 0)
        with pytest.raises(IndexError):
            density_rate(series(0, [1, 2]), 2)


class TestActivate:
    def test_huge_delta_gives_empty_set(self):
        all_series = [series(i, [0, 5, 9]) for i in range(4)]
        assert activate(all_series, 1, TEDConfig(delta=1e12)) == set()

    def test_single_node_above_threshold(self):
        all_series = [series(0, [1, 4]), series(1, [4, 4])]
        assert activate(all_series, 1, TEDConfig(delta=2.9)) == {0}

    def test_strict_inequality_on_zero_rate(self):
        all_series = [series(0, [2, 2, 2])]
        assert activate(all_series, 1, TEDConfig(delta=0.0)) == set()

    def test_matches_brute_force_filter(self):
        rng = random.Random(23)
        all_series = [series(i, [rng.uniform(0, 6) for _ in range(8)]) for i in range(50)]
        cfg = TEDConfig(delta=1.0)
        for t in range(1, 8):
            expected = {s.node for s in all_series if (s.rho[t] - s.rho[t - 1]) > 1.0}
            assert activate(all_series, t, cfg) == expected

    def test_monotone_in_threshold(self):
        rng = random.Random(41)
        all_series = [series(i, [rng.uniform(0, 6) for _ in range(6)]) for i in range(30)]
        for t in range(1, 6):
            a = activate(all_series, t, TEDConfig(delta=0.5))
            b = activate(all_series, t, TEDConfig(delta=1.5))
            assert b <= a


class TestForecastWeights:
    def test_persistence_holds_flat(self):
        cfg = TEDConfig(predictor_kind="persistence", horizon=4)
        out = forecast_weights([series(0, [2, 5, 1])], 1, cfg)
        assert [f.weight for f in out[0]] == [5, 5, 5, 5]

    def test_linear_trend_clamps_at_zero(self):
        cfg = TEDConfig(predictor_kind="linear_trend", horizon=3)
        out = forecast_weights([series(0, [15, 5])], 1, cfg)
        assert [f.weight for f in out[0]] == [0.0, 0.0, 0.0]

    def test_linear_trend_closed_form(self):
        # base 4, rate 2, horizon 3: weights 6, 8, 10 with confidences 0.9^k
        cfg = TEDConfig(predictor_kind="linear_trend", horizon=3, confidence_decay=0.9)
        out = forecast_weights([series(7, [2, 4])], 1, cfg)
        assert [f.weight for f in out[7]] == [6.0, 8.0, 10.0]
        assert [round(f.confidence, 6) for f in out[7]] == [0.9, 0.81, 0.729]

    def test_confidence_strictly_decreasing(self):
        cfg = TEDConfig(predictor_kind="persistence", horizon=5, confidence_decay=0.8)
        out = forecast_weights([series(0, [1, 1])], 1, cfg)
        confs = [f.confidence for f in out[0]]
        assert all(a > b for a, b in zip(confs, confs[1:]))

    def test_forecasts_nonnegative(self):
        rng = random.Random(3)
        all_series = [series(i, [rng.uniform(0, 8) for _ in range(6)]) for i in range(20)]
        for kind in ("persistence", "linear_trend"):
            cfg = TEDConfig(predictor_kind=kind, horizon=6)
            for t in range(6):
                for fs in forecast_weights(all_series, t, cfg).values():
                    assert all(f.weight >= 0 for f in fs)

    def test_t_zero_linear_trend_has_no_rate(self):
        cfg = TEDConfig(predictor_kind="linear_trend", horizon=2)
        out = forecast_weights([series(0, [3, 9])], 0, cfg)
        assert [f.weight for f in out[0]] == [3.0, 3.0]


class TestDensitySeriesForCells:
    def test_counts_events_within_radius(self):
        spec = GridSpec(width=10, height=10, frames=4, cell_size=0.25)
        events = [Event(frame=1, cell=(5, 5), magnitude=2.0),
                  Event(frame=1, cell=(5, 6), magnitude=2.0),
                  Event(frame=2, cell=(9, 9), magnitude=2.0),
                  Event(frame=3, cell=(5, 5), magnitude=2.0, count=2)]
        out = density_series_for_cells({0: (5, 5), 1: (0, 0)}, events, spec, radius=0.5)
        assert out[0].node == 0 and out[0].rho == [2.0, 0.0, 2.0]
        assert out[1].rho == [0.0, 0.0, 0.0]


def test_activations_csv_shape():
    text = activations_to_csv([(2, 7, 1.25, True)])
    assert text == "frame,node_id,rate,activated\n2,7,1.250000,1\n"
