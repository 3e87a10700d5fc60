import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stpulse.config import AnalysisConfig, load_config, load_sim_params, parse_si, pulse_channels
from stpulse.errors import MissingRequired, UnknownKey, UnparseableValue
from stpulse.simulator import PulseParams
from stpulse.waveform import Capture, Waveform

FULL = """\
# bench settings
c_ref = 10n          # reference capacitor
shunt = 10.4m        # V/A
i_ds_unit = V
bus_voltage = 400 V
thresholds = 0.2, 0.8
smoothing_points = 7
channel.v_ds = CH1
channel.i_ds = CH2
deskew.i_ds = -1.5n
window.turnoff = 2.1u, 2.4u
extend_to_onset = no
"""


def write(tmp_path, text, name="a.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


@pytest.mark.parametrize("text, value", [
    ("10n", 1e-8), ("10.4m", 0.0104), ("10.4mV/A", 0.0104), ("2u", 2e-6), ("2µs", 2e-6),
    ("47pF", 47e-12), ("250k", 250e3), ("250kHz", 250e3), ("1.5M", 1.5e6), ("400", 400.0),
    ("400 V", 400.0), ("-3e-9", -3e-9), ("1G", 1e9),
])
def test_parse_si(text, value):
    assert parse_si(text) == pytest.approx(value, rel=1e-15)


@pytest.mark.parametrize("text", ["", "abc", "1..2", "10 n n"])
def test_parse_si_rejects(text):
    with pytest.raises(ValueError):
        parse_si(text)


def test_table_values(tmp_path):
    cfg = load_config(write(tmp_path, "c_ref = 10n\nshunt = 10.4m\n"))
    assert cfg.c_ref == pytest.approx(1.0e-8, rel=1e-15)
    assert cfg.shunt_volts_per_amp == pytest.approx(0.0104, rel=1e-15)


def test_defaults(tmp_path):
    cfg = load_config(write(tmp_path, "c_ref = 10n\n"))
    assert cfg.thresholds == (0.1, 0.9)
    assert cfg.smoothing_points == 5
    assert cfg.deskew == {}
    assert cfg.settle_samples == 10


def test_full_file(tmp_path):
    cfg = load_config(write(tmp_path, FULL), mode="separate")
    assert cfg.thresholds == (0.2, 0.8)
    assert cfg.channel_map["v_ds"] == "CH1"
    assert cfg.deskew["i_ds"] == pytest.approx(-1.5e-9)
    assert cfg.window_overrides["turnoff"].t_start == pytest.approx(2.1e-6)
    assert cfg.extend_to_onset is False
    assert cfg.bus_voltage == 400


def test_empty_st_config_needs_c_ref(tmp_path):
    with pytest.raises(MissingRequired, match="c_ref"):
        load_config(write(tmp_path, "# nothing\n"), mode="st")


def test_voltage_current_needs_shunt(tmp_path):
    with pytest.raises(MissingRequired, match="shunt"):
        load_config(write(tmp_path, "i_ds_unit = V\n"), mode="pulse")


def test_unknown_key_has_line(tmp_path):
    p = write(tmp_path, "c_ref = 10n\n\nc_rf = 1\n")
    with pytest.raises(UnknownKey) as exc:
        load_config(p)
    assert exc.value.line == 3 and str(p) in str(exc.value)


@pytest.mark.parametrize("text", ["c_ref = ten\n", "c_ref 10n\n", "thresholds = 0.9, 0.1\n",
                                  "c_ref = 1\nc_ref = 2\n", "smoothing_points = 4\n"])
def test_unparseable(tmp_path, text):
    with pytest.raises(UnparseableValue):
        load_config(write(tmp_path, text))


@given(st.randoms())
def test_order_independent(tmp_path_factory, rnd):
    lines = [ln for ln in FULL.splitlines() if ln and not ln.startswith("#")]
    shuffled = lines[:]
    rnd.shuffle(shuffled)
    d = tmp_path_factory.mktemp("cfg")
    a = load_config(write(d, "\n".join(lines), "a.cfg"))
    b = load_config(write(d, "\n".join(shuffled), "b.cfg"))
    assert a == b


def test_config_dict_roundtrip(tmp_path):
    cfg = load_config(write(tmp_path, FULL))
    assert AnalysisConfig.from_dict(cfg.to_dict()) == cfg


def test_pulse_channels_apply_shunt_and_deskew():
    v = Waveform(0.0, 1e-9, [0.0, 1.0, 2.0, 3.0, 4.0], "V", "CH1")
    i = Waveform(0.0, 1e-9, [0.0104] * 5, "V", "CH2")
    cfg = AnalysisConfig(channel_map={"v_ds": "CH1", "i_ds": "CH2"}, i_ds_unit="V",
                         shunt_volts_per_amp=0.0104, deskew={"i_ds": 1e-9})
    vv, ii = pulse_channels(Capture({"CH1": v, "CH2": i}), cfg)
    assert ii.unit == "A" and vv.t0 == ii.t0 == 1e-9
    assert ii.samples == pytest.approx(1.0)
    assert len(vv) == 4


def test_invalid_config_values():
    with pytest.raises(ValueError):
        AnalysisConfig(low_frac=0.9, high_frac=0.1)
    with pytest.raises(ValueError):
        AnalysisConfig(shunt_volts_per_amp=-1)


def test_sim_params(tmp_path):
    p = write(tmp_path, "model = linear\ncapacitance = 47p\nchannel_fall_time = 20n\n")
    model, params = load_sim_params(p, "pulse")
    assert model.charge_energy() == pytest.approx(3.76e-6, rel=1e-12)
    assert isinstance(params, PulseParams) and params.channel_fall_time == 20e-9
    with pytest.raises(UnknownKey):
        load_sim_params(write(tmp_path, "frequency = 1k\n", "b.cfg"), "pulse")
    model, params = load_sim_params(None, "st")
    assert model.loop_area() == 0
