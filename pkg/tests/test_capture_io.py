import numpy as np
import pytest

from stpulse.capture_io import (
    ColumnSpec,
    parse_capture_csv,
    read_truth,
    truth_path,
    write_capture_csv,
    write_truth,
)
from stpulse.errors import IoFailure, MalformedRow, MissingColumn, NonUniformTimebase
from stpulse.simulator import (
    PulseParams,
    STParams,
    simulate_sawyer_tower,
    simulate_single_pulse,
    truth_from_dict,
    truth_to_dict,
)

PREAMBLE = """Model,MSO46
Firmware Version,1.38
Waveform Type,ANALOG
Point Format,Y
Horizontal Units,s
Horizontal Scale,4e-07
Trigger Point,0
Source,CH1 CH2
Record Length,1000
Label,
Vertical Offset,0
Probe Attenuation,10
"""


def bare_text(n=1000, dt=1e-9, delim=","):
    rng = np.random.default_rng(3)
    rows = ["time{0}v_ds{0}i_shunt".format(delim)]
    v = rng.normal(size=n)
    i = rng.normal(size=n)
    for k in range(n):
        rows.append(delim.join(repr(float(x)) for x in (k * dt, v[k], i[k])))
    return "\n".join(rows) + "\n"


def test_three_column_file(tmp_path):
    p = tmp_path / "bare.csv"
    p.write_text(bare_text())
    cap = parse_capture_csv(p)
    assert cap.labels == ["v_ds", "i_shunt"]
    assert len(cap["v_ds"]) == len(cap["i_shunt"]) == 1000
    assert cap["v_ds"].dt == pytest.approx(1e-9, rel=1e-12)


def test_vendor_preamble_is_metadata(tmp_path):
    bare = tmp_path / "bare.csv"
    bare.write_text(bare_text())
    vendor = tmp_path / "vendor.csv"
    vendor.write_text(PREAMBLE + bare_text())
    a, b = parse_capture_csv(bare), parse_capture_csv(vendor)
    assert a.labels == b.labels
    for k in a.labels:
        assert a[k] == b[k]
    assert b.metadata["Model"] == "MSO46"
    assert b.metadata["Probe Attenuation"] == "10"
    assert len(b.metadata) == 12


def test_tab_delimited(tmp_path):
    p = tmp_path / "tab.tsv"
    p.write_text(bare_text(n=50, delim="\t"))
    assert len(parse_capture_csv(p)["v_ds"]) == 50


def test_short_row_reports_line(tmp_path):
    lines = bare_text(n=20).splitlines()
    lines[7] = "6e-09,1.0"
    p = tmp_path / "bad.csv"
    p.write_text("\n".join(lines))
    with pytest.raises(MalformedRow) as exc:
        parse_capture_csv(p)
    assert exc.value.line == 8
    assert f"{p}:8:" in str(exc.value)


def test_non_numeric_row(tmp_path):
    lines = bare_text(n=20).splitlines()
    lines[5] = "4e-09,abc,1.0"
    p = tmp_path / "bad.csv"
    p.write_text("\n".join(lines))
    with pytest.raises(MalformedRow) as exc:
        parse_capture_csv(p)
    assert exc.value.line == 6


def test_jittered_timebase(tmp_path):
    lines = bare_text(n=20).splitlines()
    f = lines[10].split(",")
    f[0] = repr(9e-9 * 1.01)
    lines[10] = ",".join(f)
    p = tmp_path / "jit.csv"
    p.write_text("\n".join(lines))
    with pytest.raises(NonUniformTimebase):
        parse_capture_csv(p)


def test_missing_column(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text(bare_text(n=10))
    with pytest.raises(MissingColumn):
        parse_capture_csv(p, ColumnSpec(values=["v_ds", "i_ds"]))
    with pytest.raises(MissingColumn):
        parse_capture_csv(p, "t")


def test_time_column_case_insensitive(tmp_path):
    p = tmp_path / "c.csv"
    p.write_text(bare_text(n=10).replace("time,", "TIME,", 1))
    assert parse_capture_csv(p).labels == ["v_ds", "i_shunt"]


def test_missing_file(tmp_path):
    with pytest.raises(IoFailure):
        parse_capture_csv(tmp_path / "nope.csv")


@pytest.mark.parametrize("delim", [",", "\t"])
def test_simulator_roundtrip_bit_exact(tmp_path, gan_model, delim):
    for cap, truth in (simulate_sawyer_tower(gan_model, STParams()),
                       simulate_single_pulse(gan_model, PulseParams(pulse_duration=50e-9))):
        p = tmp_path / "sim.csv"
        write_capture_csv(cap, p, delimiter=delim)
        back = parse_capture_csv(p)
        assert back.labels == cap.labels
        for k in cap.labels:
            assert back[k] == cap[k]
        assert back.metadata == dict(cap.metadata)
        write_truth(truth_to_dict(truth), truth_path(p))
        assert truth_from_dict(read_truth(truth_path(p))) == truth
