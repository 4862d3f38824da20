import math
import os

import pytest

import mfcflight as mf


def test_presets_listed():
    assert "f450-analog" in mf.vehicle_presets()
    assert "tarot-analog" in mf.vehicle_presets()
    assert "pid-tarot" in mf.controller_presets()
    assert "damaged-props" in mf.fault_presets()
    assert mf.telemetry_columns()[0] == "t"
    assert len(mf.telemetry_columns()) == 20


def test_mixer_identities():
    m = mf.mix(0.5, 0.1, -0.05, 0.02, clamp=False)
    assert sum(m) == pytest.approx(2.0)
    assert m[3] - m[1] == pytest.approx(0.2)
    assert m[2] - m[0] == pytest.approx(-0.1)
    assert (m[1] + m[3]) - (m[0] + m[2]) == pytest.approx(0.08)
    assert mf.mix(0.9, 0.25, 0.0, 0.0) == [0.9, 0.65, 0.9, 1.0]


def test_estimator_recovers_constant():
    c = mf.UltraLocalConfig()
    c.alpha = 2.0
    c.window_len = 5
    s = mf.AxisControllerState(5)
    f = 0.0
    for u in (0.3, -1.0, 2.0, 0.0, 0.7):
        f = mf.estimate_f(s, c, 4.0 + c.alpha * u, u)
    assert f == pytest.approx(4.0, rel=1e-12)


def test_ipd_cancels_f_hat():
    c = mf.UltraLocalConfig()
    c.kp, c.kd = 3.0, 0.1
    assert mf.ipd_step(c, 0.0, 0.0, 0.0) == 0.0
    assert mf.ipd_step(c, 1.5, 0.0, 0.0) == pytest.approx(-1.5)
    assert mf.ipd_step(c, 0.0, 1.0, 0.0) == pytest.approx(-3.0)


def test_run_scenario_tracks():
    r = mf.run_scenario(duration=4.0)
    assert not r["diverged"]
    assert all(v < 10.0 for v in r["mae"])
    t = r["telemetry"]["t"]
    assert len(t) == 1000
    assert all(0.0 <= x <= 1.0 for x in r["telemetry"]["m1"])


def test_run_scenario_is_deterministic():
    a = mf.run_scenario(reference="acro-script", seed=7, duration=2.0)
    b = mf.run_scenario(reference="acro-script", seed=7, duration=2.0)
    assert a["telemetry"] == b["telemetry"]
    c = mf.run_scenario(reference="acro-script", seed=8, duration=2.0)
    assert a["telemetry"]["rate_roll"] != c["telemetry"]["rate_roll"]


def test_bad_names_raise_value_error():
    with pytest.raises(ValueError):
        mf.run_scenario(vehicle="no-such-frame")
    with pytest.raises(ValueError):
        mf.run_scenario(reference="sawtooth")


def test_controller_config_text():
    text = mf.controller_config("pid-tarot")
    assert "controller = pid" in text


def test_example_campaign():
    path = os.environ.get("MFC_EXAMPLE_CAMPAIGN")
    if not path or not os.path.exists(path):
        pytest.skip("example campaign not available")
    results = mf.run_campaign(path, jobs=2)
    assert results
    for r in results:
        assert not r["diverged"]
        assert all(math.isfinite(v) for v in r["mae"])
