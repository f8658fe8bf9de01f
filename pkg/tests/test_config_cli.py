import json
import subprocess
import sys

import pytest

from discread import cli
from discread import config as cfgmod
from discread.errors import ConfigError

W0 = 0.6e-6


@pytest.mark.parametrize("text,expected", [
    ("780nm", 780e-9), ("4mm", 4e-3), ("1.5um", 1.5e-6), ("2e-6", 2e-6), ("0", 0.0),
    ("w0", W0), ("w0/6", W0 / 6), ("0.5w0", 0.5 * W0), ("-w0/6", -W0 / 6), ("2*w0", 2 * W0),
])
def test_parse_length(text, expected):
    assert cfgmod.parse_length(text, W0) == pytest.approx(expected, rel=1e-15, abs=0)


@pytest.mark.parametrize("text", ["12 furlongs", "nm", "w0/0", "abc"])
def test_parse_length_errors(text):
    with pytest.raises(ConfigError):
        cfgmod.parse_length(text, W0)


def test_waist_relative_needs_w0():
    with pytest.raises(ConfigError):
        cfgmod.parse_length("w0/6")


def test_file_and_overrides(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text("# comment\nna = 0.5\nphotons = 30  # inline\noffset = w0/6\n")
    cfg = cfgmod.load(p, {"photons": 40.0, "na": None})
    assert cfg.na == 0.5 and cfg.photons == 40.0 and cfg.offset == "w0/6"


@pytest.mark.parametrize("body,needle", [
    ("na = 1.2\n", "na must satisfy"),
    ("bogus = 1\n", "unknown config key"),
    ("photons = many\n", "photons"),
    ("focal_length = 100nm\n", "focal_length"),
    ("lens_diameter = 1mm\n", "lens_diameter"),
    ("detector_span = 0.5\n", "detector_span"),
    ("pixel_boundaries = -1mm,0,1mm\n", "pixel_boundaries"),
    ("na_list = 0.5,1.5\n", "na_list"),
])
def test_invalid_config_named(tmp_path, body, needle):
    p = tmp_path / "bad.cfg"
    p.write_text(body)
    with pytest.raises(ConfigError, match=needle):
        cfgmod.load(p)


def test_system_config_resolution():
    sc, w0 = cfgmod.system_config(cfgmod.load(None, {"offset": "w0/6"}))
    assert sc.offset == pytest.approx(w0 / 6) and sc.pitch == pytest.approx(w0)


def test_cli_rejects_bad_na(tmp_path, capsys):
    assert cli.main(["focus", "--na", "1.2", "--out", str(tmp_path)]) == 2
    assert "NA" in capsys.readouterr().err


def test_cli_missing_config_file(tmp_path):
    assert cli.main(["rate", "--config", str(tmp_path / "nope.cfg"), "--out", str(tmp_path)]) == 2


def test_cli_numerical_failure(tmp_path, monkeypatch):
    def boom(run, out):
        raise FloatingPointError("overflow")
    monkeypatch.setitem(cli.COMMANDS, "rate", boom)
    assert cli.main(["rate", "--out", str(tmp_path)]) == 3


def test_cli_focus(tmp_path):
    assert cli.main(["focus", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "focus.json").read_text())
    pk = doc["peaks"]
    assert pk["Ey"] < pk["Ez"] < pk["Ex"]
    assert doc["config"]["run"]["na"] == 0.47
    assert (tmp_path / "focal_map.csv").read_text().startswith("x,y,|Ex|,|Ey|,|Ez|,intensity")


def test_cli_focus_high_na(tmp_path):
    assert cli.main(["focus", "--na", "0.99", "--out", str(tmp_path)]) == 0


def test_cli_scan_single_point(tmp_path):
    assert cli.main(["scan-spot", "--na-list", "0.2", "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "spot_scan.csv").read_text().splitlines()
    assert rows[0] == "na,d86_paraxial,d86_vectorial" and len(rows) == 2
    _, p, v = map(float, rows[1].split(","))
    assert 0.98 <= v / p <= 1.02


def test_cli_read_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert cli.main(["read", "--out", str(d)]) == 0
    for name in ("signal_matrix.csv", "signal_matrix.json", "far_fields.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    doc = json.loads((a / "signal_matrix.json").read_text())
    assert doc["labels"] == ["000", "001/100", "010", "011/110", "101", "111"]
    assert all(doc["signals"][i][i] == 0.0 for i in range(6))
    assert doc["config"]["resolved"]["n_inc"] == 25.0


def test_cli_read_offset_splits_pairs(tmp_path):
    assert cli.main(["read", "--offset", "w0/6", "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "signal_matrix.json").read_text())
    assert len(doc["labels"]) == 8
    assert doc["signals"][doc["labels"].index("100")] != doc["signals"][doc["labels"].index("001")]


def test_cli_noise_presets(tmp_path):
    assert cli.main(["noise", "--out", str(tmp_path)]) == 0
    tables = {}
    for name in ("classical", "shot", "squeezed"):
        lines = (tmp_path / f"noise_{name}.csv").read_text().splitlines()[1:]
        tables[name] = {tuple(l.split(",")[:2]): list(map(float, l.split(",")[2:])) for l in lines}
    for key, (mean, vc, vq, vt, st) in tables["shot"].items():
        cm, cvc, cvq, cvt, _ = tables["classical"][key]
        sm, _, _, svt, _ = tables["squeezed"][key]
        assert mean == cm == sm
        if mean != 0.0:
            assert cvt >= vt
        else:
            assert cvc == 0.0
        if key[0] == key[1]:
            assert svt <= vt


def test_cli_discriminate_and_rate(tmp_path):
    assert cli.main(["discriminate", "--trials", "200", "--seed", "4", "--excess-db", "-100",
                     "--out", str(tmp_path)]) == 0
    doc = json.loads((tmp_path / "discriminate.json").read_text())
    assert doc["seed"] == 4 and set(doc["modes"]) == {"coherent", "squeezed"}
    assert cli.main(["rate", "--out", str(tmp_path)]) == 0
    rate = json.loads((tmp_path / "rate.json").read_text())
    assert rate["mbit_per_second"] == pytest.approx(1.57e7, rel=5e-3)


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "discread", "rate", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert out.returncode == 0 and (tmp_path / "rate.json").exists()
