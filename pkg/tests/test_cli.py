import csv
import io
import subprocess
import sys

import numpy as np
import pytest
from PIL import Image

from edgediff.cli import main
from edgediff.harness import REPORT_FIELDS
from edgediff.image_io import load_map


@pytest.fixture
def pair(tmp_path, rng):
    a = (rng.uniform(size=(24, 32, 3)) * 255).astype(np.uint8)
    b = np.clip(a.astype(int) + rng.integers(-30, 30, size=a.shape), 0, 255).astype(np.uint8)
    pa, pb = tmp_path / "ref.png", tmp_path / "test.png"
    Image.fromarray(a).save(pa)
    Image.fromarray(b).save(pb)
    return pa, pb


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_compare_defaults(pair, capsys):
    assert main(["compare", str(pair[0]), str(pair[1])]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == REPORT_FIELDS
    assert len(rows) == 2 and rows[1][1:3] == ["ICAMDIFF", "baseline"]
    assert float(rows[1][5]) > 0


def test_compare_all_with_outputs(pair, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["compare", str(pair[0]), str(pair[1]), "--model", "all", "--both",
                 "--out", str(out), "--bins", "8", "--set", "ucs=IPT"])
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 7
    assert (out / "report.csv").read_text().splitlines()[0] == ",".join(REPORT_FIELDS)
    assert (out / "maps.png").stat().st_size > 0
    m = load_map(out / "idiff_edge-aware_delta_e.png")
    assert m.shape == (24, 32) and m.min() >= 0


def test_compare_identical_is_zero(pair, capsys):
    assert main(["compare", str(pair[0]), str(pair[0]), "--edge-aware"]) == 0
    row = _rows(capsys.readouterr().out)[1]
    assert row[2] == "edge-aware" and [float(v) for v in row[5:9]] == [0.0] * 4


def test_compare_input_errors(pair, tmp_path, capsys):
    assert main(["compare", str(pair[0]), str(tmp_path / "missing.png")]) == 1
    small = tmp_path / "small.png"
    Image.fromarray(np.zeros((4, 4, 3), np.uint8)).save(small)
    assert main(["compare", str(pair[0]), str(small)]) == 1
    assert main(["compare", str(pair[0]), str(pair[1]), "--set", "bogus=1"]) == 1
    assert main(["compare", str(pair[0]), str(pair[1]), "--set", "novalue"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["compare", str(pair[0])])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["compare", str(pair[0]), str(pair[1]), "--model", "FOO"])
    assert exc.value.code == 1
    assert "error" in capsys.readouterr().err


def test_internal_failure_exit_code(pair, monkeypatch):
    import edgediff.cli as cli

    def boom(*a, **k):
        raise RuntimeError("unexpected")

    monkeypatch.setattr(cli, "run_model", boom)
    assert main(["compare", str(pair[0]), str(pair[1])]) == 2


def test_config_file(pair, tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[pipeline]\nmodel = ICAM02\n")
    assert main(["compare", str(pair[0]), str(pair[1]), "--config", str(cfg)]) == 0
    assert _rows(capsys.readouterr().out)[1][1] == "ICAM02"
    assert main(["compare", str(pair[0]), str(pair[1]), "--config", str(tmp_path / "no.ini")]) == 1


def test_csf_dump(tmp_path, capsys):
    plot = tmp_path / "csf.png"
    assert main(["csf-dump", "-n", "11", "--fmax", "30", "--plot", str(plot)]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == ["f", "A", "C1", "C2"] and len(rows) == 12
    assert [float(v) for v in rows[1]] == [0.0, 1.0, 1.0, 1.0]
    assert plot.stat().st_size > 0


def test_synth_and_sweep(tmp_path, capsys):
    scenes = tmp_path / "scenes"
    assert main(["synth", str(scenes), "--size", "48"]) == 0
    assert len(list(scenes.glob("*.pfm"))) == 3
    capsys.readouterr()
    out = tmp_path / "sweep"
    code = main(["sweep", "--scenes", str(scenes), "--tmo", "reinhard", "--param", "desaturation",
                 "--model", "ICAMDIFF", "--out", str(out)])
    assert code == 0
    rows = _rows(capsys.readouterr().out)
    assert len(rows) == 1 + 3 * 4 * 2
    assert (out / "sweep.png").exists() and (out / "report.csv").exists()
    assert (out / "curve_icamdiff_baseline.csv").exists()


def test_sweep_synthetic_crossed(capsys):
    code = main(["sweep", "--synthetic", "--size", "32", "--tmo", "durand", "--param",
                 "desaturation", "--values", "0", "0.5", "--model", "IDIFF", "--edge-aware"])
    assert code == 0
    assert len(_rows(capsys.readouterr().out)) == 1 + 3 * 2


def test_sweep_input_errors(tmp_path):
    assert main(["sweep", "--scenes", str(tmp_path / "none"), "--tmo", "durand",
                 "--param", "contrast"]) == 1
    assert main(["sweep", "--scenes", str(tmp_path), "--tmo", "durand", "--param", "contrast"]) == 1
    assert main(["sweep", "--tmo", "durand", "--param", "contrast"]) == 1
    assert main(["sweep", "--synthetic", "--size", "16", "--tmo", "durand", "--param",
                 "contrast", "--values", "0.5", "10"]) == 1


def test_entry_point():
    res = subprocess.run([sys.executable, "-m", "edgediff.cli", "--version"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "edgediff" in res.stdout


def test_config_variant_respected(pair, tmp_path, capsys):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[pipeline]\nmodel = IDIFF\nedge_aware_csf = true\n")
    assert main(["compare", str(pair[0]), str(pair[1]), "--config", str(cfg)]) == 0
    assert _rows(capsys.readouterr().out)[1][1:3] == ["IDIFF", "edge-aware"]
    assert main(["compare", str(pair[0]), str(pair[1]), "--config", str(cfg), "--baseline"]) == 0
    assert _rows(capsys.readouterr().out)[1][1:3] == ["IDIFF", "baseline"]
