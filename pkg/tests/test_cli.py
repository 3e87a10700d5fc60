import json

import pytest

from stpulse.cli import main


@pytest.fixture(scope="module")
def sim_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    (d / "st.params").write_text("loop_area = 0.189u\n")
    (d / "pulse.params").write_text("loop_area = 0.189u\nchannel_fall_time = 50n\n"
                                    "load_current = 14\npulse_duration = 150n\ndt = 5p\n")
    (d / "bench.cfg").write_text("c_ref = 10n\nbus_voltage = 400\n")
    assert main(["simulate", "st", "--params", str(d / "st.params"), "--out", str(d / "st.csv")]) == 0
    assert main(["simulate", "pulse", "--params", str(d / "pulse.params"),
                 "--out", str(d / "pulse.csv")]) == 0
    return d


def test_separate_scalars_table(capsys):
    assert main(["separate", "--e-on", "6.479u", "--e-off", "8.134u", "--e-charge", "6.889u"]) == 0
    out = " ".join(capsys.readouterr().out.split())
    assert "6.479 8.134 6.889 1.245 0.410" in out


def test_separate_negative_exits_nonzero(capsys):
    rc = main(["separate", "--e-on", "6.479u", "--e-off", "8.134u", "--e-charge", "9u"])
    assert rc != 0
    assert capsys.readouterr().err.startswith("NegativeComponent:")


def test_simulate_writes_truth(sim_files):
    assert (sim_files / "st.csv.truth").read_text().count("loop_area") == 1


def test_analyze_st_structured(sim_files, tmp_path):
    out = tmp_path / "st.json"
    assert main(["analyze", "st", str(sim_files / "st.csv"), "--config",
                 str(sim_files / "bench.cfg"), "--format", "structured", "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["measurements"]["e_hysteresis"]["value"] == pytest.approx(0.189e-6, rel=5e-3)
    assert d["measurements"]["e_hysteresis"]["unit"] == "J"
    assert len(d["provenance"]["inputs"]) == 2


def test_analyze_pulse_table(sim_files, capsys):
    assert main(["analyze", "pulse", str(sim_files / "pulse.csv"), "--config",
                 str(sim_files / "bench.cfg")]) == 0
    assert "e_off" in capsys.readouterr().out


def test_separate_captures_and_report(sim_files, tmp_path, capsys):
    out = tmp_path / "sep.json"
    assert main(["separate", "--pulse", str(sim_files / "pulse.csv"), "--st",
                 str(sim_files / "st.csv"), "--config", str(sim_files / "bench.cfg"),
                 "--format", "structured", "--out", str(out)]) == 0
    hyst = json.loads(out.read_text())["breakdown"]["e_hysteresis"]
    assert hyst == pytest.approx(0.189e-6, rel=1e-2)
    assert main(["report", str(out), "--format", "plot-data"]) == 0
    assert "# series: qv_loop" in capsys.readouterr().out


def test_missing_config_key(sim_files, tmp_path, capsys):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("")
    rc = main(["analyze", "st", str(sim_files / "st.csv"), "--config", str(cfg)])
    assert rc == 1
    assert capsys.readouterr().err.startswith("MissingRequired:")


def test_separate_mixed_arguments_rejected(sim_files):
    with pytest.raises(SystemExit):
        main(["separate", "--e-on", "1u", "--pulse", str(sim_files / "pulse.csv")])
