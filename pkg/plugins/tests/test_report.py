# tests/test_report.py
import csv
import json
import math
import os
import sys

import pytest

# Tambahkan direktori utama (root) ke path agar bisa mengimpor dari core
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "..")))

from core.evaluation import EvalReport
from core.output_writer import check_output_path, write_report
from core.report_generator import (ReportEntry, average_decrease, build_report_table, format_improvement,
                                   format_metric, generate_html_content, generate_text_content)


def report(**metrics):
    base = dict(rms=4.174, avg_err=1.021, bad05=8.14, bad1=4.0, bad2=2.0, evaluated=100, excluded=3, invalid_estimates=1)
    base.update(metrics)
    return EvalReport(**base)

ALOE = ReportEntry("aloe", report(rms=3.176), report())

# === Test untuk format ===

def test_formatting_helpers():
    assert format_improvement(23.9) == "↓ 23.9%"
    assert format_improvement(-5.0) == "↑ 5.0%"
    assert format_improvement(None) == "n/a"
    assert format_metric(math.nan) == "n/a"
    assert format_metric(1.23456) == "1.235"

def test_average_decrease():
    other = ReportEntry("baby1", report(rms=2.087), report())
    summary = average_decrease([ALOE, other, ReportEntry("tanpa_baseline", report())])
    expected = (100 * (4.174 - 3.176) / 4.174 + 100 * (4.174 - 2.087) / 4.174) / 2
    assert summary["rms"] == pytest.approx(expected)
    assert average_decrease([ReportEntry("x", report())]) is None

# === Test untuk konten laporan ===

def test_text_content():
    text = generate_text_content([ALOE])
    assert text.splitlines()[0].startswith("Scene")
    assert "↓ 23.9%" in text
    assert "[aloe]" in text
    assert "rms=3.176000" in text
    assert "decrease_rms=23.9" in text

def test_rich_table_rows():
    table = build_report_table([ALOE, ReportEntry("baby1", report(rms=2.0), report())])
    # dua scene, dua baris baseline, satu baris rata-rata
    assert table.row_count == 5

def test_html_content_default_and_custom(tmp_path):
    html = generate_html_content([ALOE])
    assert "<table>" in html
    assert "aloe" in html
    assert "↓ 23.9%" in html

    template = tmp_path / "mini.html.j2"
    template.write_text("{{ rows|length }} baris, {{ labels|join(',') }}", encoding="utf-8")
    assert generate_html_content([ALOE], template) == "1 baris, RMS,AvgErr,Bad0.5,Bad1,Bad2"
    assert "Error" in generate_html_content([ALOE], tmp_path / "hilang.j2")

# === Test untuk output_writer ===

def test_check_output_path(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert check_output_path("sub/dir/out.txt", False) == tmp_path.joinpath("sub/dir/out.txt").relative_to(tmp_path)
    assert (tmp_path / "sub" / "dir").is_dir()
    assert check_output_path(tmp_path.parent / "luar.txt", True) is None
    (tmp_path / "ada.txt").write_text("x")
    assert check_output_path("ada.txt", False) is None
    assert check_output_path("ada.txt", True) is not None

def test_write_report_formats(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    nan_entry = ReportEntry("kosong", report(rms=math.nan, avg_err=math.nan))

    assert write_report([ALOE, nan_entry], "hasil.json")
    payload = json.loads((tmp_path / "hasil.json").read_text(encoding="utf-8"))
    assert payload["scenes"][0]["decrease_percent"]["rms"] == pytest.approx(23.909, abs=1e-3)
    assert payload["scenes"][1]["report"]["rms"] is None

    assert write_report([ALOE], "hasil.csv")
    with open(tmp_path / "hasil.csv", newline="", encoding="utf-8") as f:
        rows = list(csv.DictReader(f))
    assert rows[0]["scene"] == "aloe"
    assert float(rows[0]["rms"]) == pytest.approx(3.176)
    assert float(rows[0]["decrease_rms"]) == pytest.approx(23.909, abs=1e-3)

    assert write_report([ALOE], "hasil.html")
    assert "aloe" in (tmp_path / "hasil.html").read_text(encoding="utf-8")

    assert write_report([ALOE], "hasil.xyz")
    assert (tmp_path / "hasil.txt").exists()

    assert not write_report([ALOE], "hasil.json")
    assert write_report([ALOE], "hasil.json", overwrite=True)
