import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from geoswarm.config import preset_config
from geoswarm.errors import ConfigError, DegenerateHeading, NoEstimates
from geoswarm.formation import ExtensionSpec, Side
from geoswarm.observables import Dictionary
from geoswarm.scenario import (
    ScenarioConfig,
    StepRecord,
    VelocityMode,
    build_geometry,
    compare_dictionaries,
    practical_modes,
    rmse,
    run_practical,
    run_scenario,
    sensing_range,
)
from geoswarm.surfaces import Surface

FLAT = Surface.flat()


def flat_cfg(**overrides):
    base = dict(
        surface=FLAT,
        leader_init=np.array([0.0, 0.0, 1.0, 0.0]),
        extension=ExtensionSpec(length=3.57, side=Side.LEFT, period=1.28),
        dictionary=Dictionary.RELATIVE,
        warmup=4,
        steps=12,
        step=0.01,
    )
    base.update(overrides)
    return ScenarioConfig(**base).validate()


@pytest.fixture(scope="module")
def type1_report():
    return run_scenario(preset_config("type1"))


# ------------------------------------------------------------------
# run_scenario
# ------------------------------------------------------------------

def test_reference_run_shape_and_finiteness(type1_report):
    report = type1_report
    assert len(report.records) == 36
    predictions = [r for r in report.records if r.estimated is not None]
    assert len(predictions) == 36 - 4
    assert math.isfinite(report.rmse)
    assert report.rmse >= 0
    assert all(np.all(np.isfinite(r.measurement)) for r in report.records)


def test_flat_straight_leader_is_predicted_exactly():
    report = run_scenario(flat_cfg())
    assert report.rmse <= 1e-6


def test_minimal_run_emits_single_prediction():
    report = run_scenario(flat_cfg(steps=5))
    assert len(report.records) == 5
    assert sum(r.estimated is not None for r in report.records) == 1


def test_run_is_deterministic(type1_report):
    again = run_scenario(preset_config("type1"))
    for a, b in zip(type1_report.records, again.records):
        assert np.array_equal(a.ideal, b.ideal)
        assert np.array_equal(a.measurement, b.measurement)
        if a.estimated is not None:
            assert np.array_equal(a.estimated, b.estimated)
    assert type1_report.rmse == again.rmse
    assert type1_report.avg_sensing_range == again.avg_sensing_range


def test_rmse_invariant_under_chart_translation():
    base = run_scenario(flat_cfg(dictionary=Dictionary.RELATIVE))
    moved = run_scenario(flat_cfg(leader_init=np.array([40.0, -17.0, 1.0, 0.0])))
    assert abs(base.rmse - moved.rmse) <= 1e-9


def test_absolute_position_choice_reads_prediction_directly():
    report = run_scenario(flat_cfg(dictionary=Dictionary.FOLLOWER_POS_2D))
    rec = next(r for r in report.records if r.estimated is not None)
    assert_allclose(rec.estimated, rec.prediction[:2], atol=0)
    assert rec.pred_rel is None


def test_velocity_mode_requires_combined_dictionary():
    with pytest.raises(ConfigError):
        flat_cfg(velocity_mode=VelocityMode.LAG)


def test_config_echo_round_trips_file_schema():
    echo = flat_cfg().echo()
    assert echo["surface"] == {"kind": "flat"}
    assert echo["extension"] == {"length": 3.57, "period": 1.28, "side": "left"}
    assert echo["edmd"] == {
        "dictionary": "b",
        "warmup": 4,
        "steps": 12,
        "velocity_mode": "none",
    }
    assert echo["integrator"] == {"step": 0.01}


# ------------------------------------------------------------------
# rmse over records
# ------------------------------------------------------------------

def record(offset, t=1):
    ideal = np.zeros(2)
    return StepRecord(
        t=t,
        ideal=ideal,
        follower=ideal,
        measurement=np.zeros(2),
        meas_rel=(0.0, 0.0),
        estimated=ideal + np.asarray(offset, dtype=float),
    )


def test_rmse_zero_when_estimates_match():
    assert rmse([record((0, 0)), record((0, 0), t=2)]) == 0.0


def test_rmse_single_offset():
    assert rmse([record((3, 4))]) == pytest.approx(5.0)


def test_rmse_mixed_offsets():
    assert rmse([record((0, 0)), record((3, 4), t=2)]) == pytest.approx(math.sqrt(25 / 2))


def test_rmse_requires_estimates():
    bare = record((0, 0))
    bare.estimated = None
    with pytest.raises(NoEstimates):
        rmse([bare])


# ------------------------------------------------------------------
# sensing range
# ------------------------------------------------------------------

def test_sensing_range_flat_with_estimation_vanishes():
    assert sensing_range(flat_cfg(), with_estimation=True) <= 1e-6


def test_sensing_range_flat_without_estimation_is_step_gap():
    cfg = flat_cfg()
    value = sensing_range(cfg, with_estimation=False)
    assert value == pytest.approx(1.0 * 1.28, abs=1e-9)  # leader speed x period


# ------------------------------------------------------------------
# comparisons
# ------------------------------------------------------------------

def test_compare_dictionaries_single_choice():
    rows = compare_dictionaries(flat_cfg(), [Dictionary.RELATIVE])
    assert len(rows) == 1
    assert rows[0][0] is Dictionary.RELATIVE
    assert rows[0][1] <= 1e-6


def test_compare_dictionaries_reference_scenario_prefers_local():
    rows = dict(compare_dictionaries(
        preset_config("type1"), [Dictionary.RELATIVE, Dictionary.FOLLOWER_POS_2D]
    ))
    assert rows[Dictionary.RELATIVE] < rows[Dictionary.FOLLOWER_POS_2D]


def test_compare_dictionaries_rejects_empty():
    with pytest.raises(ValueError):
        compare_dictionaries(flat_cfg(), [])


def test_practical_modes_rows_and_finiteness():
    rows = practical_modes(flat_cfg(steps=10))
    assert [mode for mode, _ in rows] == [VelocityMode.NONE, VelocityMode.LAG, VelocityMode.EDMD]
    assert all(math.isfinite(v) for _, v in rows)


def test_practical_modes_reject_stationary_leader():
    cfg = flat_cfg(leader_init=np.array([0.0, 0.0, 0.0, 0.0]))
    with pytest.raises(DegenerateHeading):
        practical_modes(cfg)


def test_run_practical_keeps_record_contract():
    cfg = dataclasses.replace(
        flat_cfg(steps=10),
        dictionary=Dictionary.VELOCITY_RELATIVE,
        velocity_mode=VelocityMode.LAG,
    )
    report = run_practical(cfg)
    assert len(report.records) == 10
    assert sum(r.estimated is not None for r in report.records) == 6
    assert math.isfinite(report.rmse)


def test_shared_geometry_matches_fresh_runs():
    cfg = preset_config("type2")
    geom = build_geometry(cfg)
    assert run_scenario(cfg, geom).rmse == run_scenario(cfg).rmse
