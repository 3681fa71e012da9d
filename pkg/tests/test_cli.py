import json
import re
import xml.etree.ElementTree as ET
from pathlib import Path

import jsonschema
import numpy as np
import pytest

from growthscope.cli import SCHEMA_PATH, PipelineConfig, main, run_pipeline
from growthscope.errors import ConfigError
from growthscope.figures import scalogram_svg, skeleton_svg
from growthscope.skeleton import SkeletonSet
from growthscope.wavelet import ScaleGrid, cwt_slope

from conftest import make_log_series


def tree(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*"))
            if p.is_file()}


@pytest.fixture(scope="module")
def quarterly_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("q")
    assert main(["analyze", "--input", "fixture:quarterly", "--out", str(out)]) == 0
    return out


def test_outputs_and_schema(quarterly_run):
    out = quarterly_run
    report = json.loads((out / "report.json").read_text())
    jsonschema.validate(report, json.loads(SCHEMA_PATH.read_text()))
    for name in ["scalogram.csv", "skeleton.json", "regimes.json", "synthetic_1.0y.csv",
                 "density_full_field_0.5y.csv", "density_skeleton_0.5y.csv",
                 "figures/scalogram.svg", "figures/skeleton.svg", "figures/densities.svg",
                 "figures/synthetic.svg"]:
        assert (out / name).is_file(), name
        assert name in report["files"]
    assert report["input"]["date_convention"] == "year_quarter"
    assert re.fullmatch(r"[0-9a-f]{64}", report["input"]["sha256"])
    assert abs(report["trend"]["rho_lt"] - 0.020) <= 0.002
    assert (out / "density_full_field_0.5y.csv").read_text().startswith("rho_per_year,pdf\n")


def test_rerun_is_byte_identical(quarterly_run, tmp_path):
    assert main(["analyze", "--input", "fixture:quarterly", "--out", str(tmp_path)]) == 0
    assert tree(tmp_path) == tree(quarterly_run)


def test_svgs_parse_and_are_self_contained(quarterly_run):
    for p in (quarterly_run / "figures").glob("*.svg"):
        text = p.read_text()
        root = ET.fromstring(text)
        assert root.tag.endswith("svg")
        assert "href" not in text and "<image" not in text


def test_no_figures_and_window(tmp_path):
    rc = main(["analyze", "--input", "fixture:annual", "--window", "1950:2007",
               "--no-figures", "--out", str(tmp_path)])
    assert rc == 0
    assert not (tmp_path / "figures").exists()
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["input"]["start"] == 1950.0 and report["input"]["end"] == 2007.0
    assert report["config"]["window"] == [1950.0, 2007.0]


def test_unreadable_input_exit_2(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["analyze", "--input", str(tmp_path / "missing.csv"), "--out", str(out)]) == 2
    assert not out.exists()
    assert "missing.csv" in capsys.readouterr().err


def test_malformed_input_exit_2(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1800,1\n1801,x\n")
    out = tmp_path / "out"
    assert main(["analyze", "--input", str(bad), "--dates", "year_only", "--out", str(out)]) == 2
    assert not out.exists()


@pytest.mark.parametrize("flags", [
    ["--bandwidth", "-0.1"],
    ["--pdf-scales", "500"],
    ["--input", "fixture:nope"],
    ["--scales", "0.01::16"],
])
def test_config_errors_exit_1(tmp_path, flags):
    argv = ["analyze", "--input", "fixture:annual", "--out", str(tmp_path / "o")] + flags
    assert main(argv) == 1
    assert not (tmp_path / "o").exists()


def test_numeric_failure_exit_3(tmp_path, capsys):
    # one huge collapse makes 1 + g <= 0 at some skeleton intercept
    t = np.arange(1900, 1960)
    v = np.exp(np.where(t < 1930, 0.0, -40.0))
    p = tmp_path / "crash.csv"
    p.write_text("\n".join(f"{a},{float(b)!r}" for a, b in zip(t, v)))
    rc = main(["analyze", "--input", str(p), "--dates", "year_only", "--out",
               str(tmp_path / "o"), "--pdf-scales", "1", "--synthetic-scales", "1"])
    assert rc == 3
    assert "numeric failure" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text("[analyze]\ninput = fixture:annual\nbandwidth = 0.004\npdf-scales = 1,2\n"
                   "no_such = 1\n")
    assert main(["analyze", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    cfg.write_text("[analyze]\ninput = fixture:annual\nbandwidth = 0.004\npdf-scales = 1,2\n"
                   "figures = no\n")
    out = tmp_path / "o"
    assert main(["analyze", "--config", str(cfg), "--bandwidth", "0.003", "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["bandwidth"] == 0.003
    assert report["config"]["pdf_scales"] == [1.0, 2.0]
    assert report["config"]["figures"] is False


def test_config_validation():
    with pytest.raises(ConfigError):
        PipelineConfig(input="x", out="y", coi="sometimes")
    with pytest.raises(ConfigError):
        PipelineConfig(input="x", out="y", quantile=1.5)
    with pytest.raises(ConfigError):
        PipelineConfig(input="x", out="y", pdf_scales=(1.0, -2.0))


def test_coi_include_changes_sample_counts():
    a = run_pipeline(PipelineConfig(input="fixture:annual", out="-", pdf_scales=(1.0,),
                                    synthetic_scales=(1.0,), figures=False))
    b = run_pipeline(PipelineConfig(input="fixture:annual", out="-", pdf_scales=(1.0,),
                                    synthetic_scales=(1.0,), figures=False, coi="include"))
    assert a.densities[0].n_samples < b.densities[0].n_samples == 211


def test_linear_scalogram_is_uniform_inside_cone():
    t = np.arange(1900.0, 2000.0)
    s = make_log_series(t, 0.02 * t)
    f = cwt_slope(s, ScaleGrid.default(1.0, s.span))
    svg = scalogram_svg(f, center=0.02)
    inside = set(re.findall(r'class="cell coi"[^>]*fill="(#[0-9a-f]{6})"', svg))
    inside |= set(re.findall(r'fill="(#[0-9a-f]{6})"[^>]*class="cell coi"', svg))
    assert len(inside) == 1


def test_empty_skeleton_svg():
    svg = skeleton_svg(SkeletonSet((), ScaleGrid([1.0])), (1900.0, 2000.0))
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")
    assert "<polyline" not in svg and "<line" in svg


def test_quarterly_scalogram_alternates(quarterly_run):
    text = (quarterly_run / "figures" / "scalogram.svg").read_text()
    assert 'class="cell coi"' in text


def test_module_entry_point():
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "growthscope", "--version"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip()
