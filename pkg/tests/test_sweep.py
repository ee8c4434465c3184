import json
from pathlib import Path

import numpy as np
import pytest

from uavcpn.analysis import average_success_probability
from uavcpn.sweep import Axis, SweepSpec, apply_point, compare, read_csv, run_sweep, to_csv, to_json
from uavcpn.units import ScenarioConfig, load_config

GOLDEN = Path(__file__).parent / "data" / "golden_sweep.csv"
GOLDEN_SPEC = SweepSpec((Axis("cn_dist_radius", 200, 1000, 3), Axis("altitude", 300, 900, 2)),
                        engine="both", n_trials=40, gus_per_trial=25, seed=123)


def test_axis_parse():
    assert Axis.parse("altitude:100:1000:19") == Axis("altitude", 100.0, 1000.0, 19)
    ax = Axis.parse("cn_density:1:100:3:log")
    np.testing.assert_allclose(ax.values(), [1.0, 10.0, 100.0])


@pytest.mark.parametrize("text", ["altitude:100:1000", "height:1:2:3", "altitude:0:10:3",
                                  "altitude:1:10:1", "altitude:1:10:3:cubic"])
def test_axis_parse_rejects(text):
    with pytest.raises(ValueError):
        Axis.parse(text)


def test_spec_invariants():
    ax = Axis("altitude", 100, 200, 2)
    with pytest.raises(ValueError):
        SweepSpec(())
    with pytest.raises(ValueError):
        SweepSpec((ax, Axis("t_max", 1, 2, 2), Axis("cn_density", 1, 2, 2)))
    with pytest.raises(ValueError):
        SweepSpec((ax, ax))
    with pytest.raises(ValueError):
        SweepSpec((ax,), engine="fast")


def test_columns_per_engine():
    ax = (Axis("altitude", 100, 200, 2),)
    tail = ["lambda_center", "service_radius_center_m", "wall_time_s"]
    assert SweepSpec(ax).columns() == ["altitude_m", "theory_prob"] + tail
    assert SweepSpec(ax, "mc").columns() == ["altitude_m", "mc_mean", "mc_ci"] + tail
    assert SweepSpec(ax, "both").columns() == ["altitude_m", "theory_prob", "mc_mean", "mc_ci"] + tail


def test_axis_units():
    base = ScenarioConfig()
    spec = SweepSpec((Axis("cn_density", 1, 2, 2), Axis("t_max", 40, 50, 2)))
    cfg = apply_point(base, spec, (7.0, 45.0))
    assert cfg.cn_density == pytest.approx(7e-6) and cfg.t_max == pytest.approx(0.045)
    spec = SweepSpec((Axis("compute_latency", 1, 2, 2),))
    assert apply_point(base, spec, (2.0,)).compute_model.mean() == pytest.approx(2e-3)


def test_one_axis_altitude_sweep():
    spec = SweepSpec((Axis("altitude", 100, 1000, 19),))
    records = run_sweep(spec, ScenarioConfig())
    assert len(records) == 19
    assert all(r.theory_prob is not None and r.mc_mean is None for r in records)
    assert [r.values[0] for r in records] == pytest.approx(np.linspace(100, 1000, 19).tolist())


def test_two_axis_row_major():
    spec = SweepSpec((Axis("cn_density", 1, 10, 3), Axis("altitude", 100, 500, 4)))
    records = run_sweep(spec, ScenarioConfig())
    assert len(records) == 12
    assert [r.values for r in records[:4]] == [(1.0, h) for h in np.linspace(100, 500, 4)]
    assert records[4].values[0] == 5.5


def test_parallel_sweep_keeps_grid_order():
    spec = SweepSpec((Axis("altitude", 100, 1000, 6),))
    serial = run_sweep(spec, ScenarioConfig())
    parallel = run_sweep(spec, ScenarioConfig(), jobs=2)
    assert [r.theory_prob for r in serial] == [r.theory_prob for r in parallel]


def test_theory_column_is_the_analysis_value():
    spec = SweepSpec((Axis("altitude", 300, 600, 2),))
    for rec in run_sweep(spec, ScenarioConfig()):
        assert rec.theory_prob == average_success_probability(ScenarioConfig(altitude=rec.values[0]))


def test_compare_zero_density_passes():
    rows = compare(ScenarioConfig(cn_density=0.0), [100.0, 500.0], n_trials=20, gus_per_trial=10)
    assert all(r.passed and r.theory == 0.0 and r.mc == 0.0 for r in rows)


def test_compare_theory_matches_analysis():
    rows = compare(ScenarioConfig(), [400.0], n_trials=50, gus_per_trial=10)
    assert rows[0].theory == average_success_probability(ScenarioConfig(altitude=400.0))


def _strip_wall_time(text):
    comments, rows = read_csv(text)
    for r in rows:
        r.pop("wall_time_s")
    return comments, rows


def test_golden_sweep_csv():
    text = to_csv(GOLDEN_SPEC, ScenarioConfig(), run_sweep(GOLDEN_SPEC, ScenarioConfig()))
    if not GOLDEN.exists():  # pragma: no cover - regenerate by deleting the file
        GOLDEN.write_text(text)
    header = text.splitlines()[len(_strip_wall_time(text)[0])]
    assert header == ("cn_dist_radius_m,altitude_m,theory_prob,mc_mean,mc_ci,lambda_center,"
                      "service_radius_center_m,wall_time_s")
    got_comments, got_rows = _strip_wall_time(text)
    want_comments, want_rows = _strip_wall_time(GOLDEN.read_text())
    assert got_comments == want_comments
    assert len(got_rows) == len(want_rows) == 6
    for got, want in zip(got_rows, want_rows):
        assert list(got) == list(want)
        assert got["mc_mean"] == want["mc_mean"] and got["mc_ci"] == want["mc_ci"]
        for k in ("theory_prob", "lambda_center", "service_radius_center_m"):
            assert got[k] == pytest.approx(want[k], rel=1e-9)


def test_csv_header_records_effective_config():
    base = load_config("", {"uav_altitude_m": "250"})
    text = to_csv(GOLDEN_SPEC, base, [])
    comments, rows = read_csv(text)
    assert rows == []
    assert comments[0].startswith("uavcpn ")
    assert "config uav_altitude_m = 250" in comments
    assert "seed = 123" in comments


def test_json_mirror():
    spec = SweepSpec((Axis("altitude", 300, 600, 2),))
    doc = json.loads(to_json(spec, ScenarioConfig(), run_sweep(spec, ScenarioConfig())))
    assert doc["columns"] == spec.columns()
    assert len(doc["rows"]) == 2 and set(doc["rows"][0]) == set(spec.columns())
