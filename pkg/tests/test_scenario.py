import copy
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ris_linkopt.scenario import (
    REFERENCE_SCENARIO,
    ScenarioError,
    ScenarioParseError,
    load_scenario,
    parse_scenario,
)

MINIMAL = {
    "satellite": {"lat_deg": 10.0, "lon_deg": 20.0, "alt_m": 600000.0},
    "ris": {"lat_deg": 10.0, "lon_deg": 20.01, "elements": {"count": 16}},
    "user": {"lat_deg": 10.0, "lon_deg": 20.02},
    "radio": {
        "frequency_hz": 12e9,
        "tx_power_w": 5.0,
        "gains_dbi": {"tx": 35.0, "rx": 3.0, "ris_in": 6.0, "ris_out": 6.0},
    },
}


def test_defaults_applied():
    sf = parse_scenario(MINIMAL)
    assert sf.ris.alt_m == 0.0 and sf.user.alt_m == 0.0
    assert sf.ris.passive and sf.ris.coherent and sf.ris.gamma == 1.0
    assert sf.radio.excess_loss_db == 0.0
    assert sf.error.sigma == 0.0
    assert (sf.mc.sample_count, sf.mc.seed) == (100_000, 42)
    assert sf.bfgs.tolerance == 1e-8
    assert sf.bfgs.max_iterations == 200
    assert sf.bfgs.multistart_count == 4
    assert (sf.bfgs.wolfe_c1, sf.bfgs.wolfe_c2) == (1e-4, 0.9)
    assert sf.earth_radius_m == 6371000.0


def test_units_converted_at_boundary():
    s = parse_scenario(MINIMAL).scenario()
    assert s.ris.longitude == pytest.approx(math.radians(20.01))
    assert s.radio.gain_tx == pytest.approx(10**3.5)
    assert s.radio.gain_rx == pytest.approx(10**0.3)


def test_coherent_aggregate_magnitude():
    doc = copy.deepcopy(MINIMAL)
    doc["ris"]["elements"] = {"count": 100, "gamma": 1.0, "coherent": True}
    assert parse_scenario(doc).scenario().aggregate().magnitude == pytest.approx(100.0)


def test_incoherent_surface_cancels():
    doc = copy.deepcopy(MINIMAL)
    doc["ris"]["elements"] = {"count": 8, "coherent": False}
    assert parse_scenario(doc).scenario().aggregate().magnitude == pytest.approx(0.0, abs=1e-12)


def test_explicit_elements():
    doc = copy.deepcopy(MINIMAL)
    doc["ris"]["elements"] = [{"gamma": 0.8, "phase_rad": 1.3}]
    agg = parse_scenario(doc).scenario().aggregate()
    assert (agg.magnitude, agg.phase) == pytest.approx((0.8, 1.3))


def _without(doc, *path):
    doc = copy.deepcopy(doc)
    node = doc
    for key in path[:-1]:
        node = node[key]
    del node[path[-1]]
    return doc


def _with(doc, value, *path):
    doc = copy.deepcopy(doc)
    node = doc
    for key in path[:-1]:
        node = node[key]
    node[path[-1]] = value
    return doc


@pytest.mark.parametrize(
    "doc,field",
    [
        (_without(MINIMAL, "radio", "frequency_hz"), "radio.frequency_hz"),
        (_without(MINIMAL, "radio"), "radio"),
        (_without(MINIMAL, "satellite", "alt_m"), "satellite.alt_m"),
        (_without(MINIMAL, "radio", "gains_dbi", "ris_out"), "radio.gains_dbi.ris_out"),
        (_with(MINIMAL, -1.0, "radio", "frequency_hz"), "radio.frequency_hz"),
        (_with(MINIMAL, "fast", "radio", "tx_power_w"), "radio.tx_power_w"),
        (_with(MINIMAL, 95.0, "user", "lat_deg"), "user.lat_deg"),
        (_with(MINIMAL, 0.0, "satellite", "alt_m"), "satellite.alt_m"),
        (_with(MINIMAL, {"count": 0}, "ris", "elements"), "ris.elements.count"),
        (_with(MINIMAL, {"count": 4, "gamma": 1.5}, "ris", "elements"), "ris.elements.gamma"),
        (_with(MINIMAL, [{"gamma": 2.0, "phase_rad": 0}], "ris", "elements"), "ris.elements[0].gamma"),
        (_with(MINIMAL, [], "ris", "elements"), "ris.elements"),
        (_with(MINIMAL, {"sigma_rad": -0.1}, "error"), "error.sigma_rad"),
        (_with(MINIMAL, {"samples": 0}, "mc"), "mc.samples"),
        (_with(MINIMAL, {"seed": 1.5}, "mc"), "mc.seed"),
        (_with(MINIMAL, {"wolfe_c1": 0.95}, "bfgs"), "bfgs.wolfe_c1"),
        (_with(MINIMAL, {"tolerance": 0}, "bfgs"), "bfgs.tolerance"),
        (_with(MINIMAL, {"radius_m": -5}, "earth"), "earth.radius_m"),
        (_with(MINIMAL, {"lat_deg": 10.0, "lon_deg": 20.01}, "user"), "user"),
    ],
)
def test_validation_names_field(doc, field):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(doc)
    assert info.value.path == field
    assert field in str(info.value)


def test_round_trip_reference():
    sf = parse_scenario(REFERENCE_SCENARIO)
    again = parse_scenario(json.loads(json.dumps(sf.to_dict())))
    assert again == sf
    assert again.to_dict() == sf.to_dict()


def test_round_trip_explicit_elements():
    doc = _with(MINIMAL, [{"gamma": 0.5, "phase_rad": 0.1}, {"gamma": 1.0, "phase_rad": 3.0}], "ris", "elements")
    sf = parse_scenario(doc)
    assert parse_scenario(sf.to_dict()) == sf


@settings(max_examples=50, deadline=None)
@given(
    st.floats(-80, 80),
    st.floats(-179, 179),
    st.floats(3e5, 3.6e7),
    st.floats(1e8, 1e11),
    st.floats(0.0, 3.0),
    st.integers(1, 10**6),
    st.integers(0, 2**64 - 1),
)
def test_round_trip_property(lat, lon, alt, freq, sigma, samples, seed):
    doc = copy.deepcopy(MINIMAL)
    doc["satellite"] = {"lat_deg": lat, "lon_deg": lon, "alt_m": alt}
    doc["radio"]["frequency_hz"] = freq
    doc["error"] = {"sigma_rad": sigma}
    doc["mc"] = {"samples": samples, "seed": seed}
    sf = parse_scenario(doc)
    assert parse_scenario(json.loads(json.dumps(sf.to_dict()))) == sf


def test_load_errors(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioParseError):
        load_scenario(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(MINIMAL))
    assert load_scenario(good) == parse_scenario(MINIMAL)


def test_shipped_reference_file_matches_builtin():
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "scenarios" / "reference_leo.json"
    assert load_scenario(path) == parse_scenario(REFERENCE_SCENARIO)
