import json
import time

import pandas as pd
import pytest

from clinicdx.cli import build_parser, main
from clinicdx.config import config

from conftest import csv_text


CLEAN_ROWS = [
    ["P1", "2017-03-27", "09:00", "30", "09:00", "09:02", "09:00", "", "09:30", ""],
    ["P1", "2017-03-27", "09:30", "30", "09:30", "", "09:30", "09:31", "10:00", ""],
    ["P1", "2017-03-27", "10:00", "30", "10:10", "", "10:10", "", "10:40", "10:41"],
]


def write_input(tmp_path, rows, name="input.csv"):
    path = tmp_path / name
    path.write_text(csv_text(rows), encoding="utf-8")
    return path


def snapshot(directory):
    return {
        p.relative_to(directory).as_posix(): p.read_bytes()
        for p in sorted(directory.rglob("*")) if p.is_file()
    }


@pytest.fixture
def month_csv(tmp_path):
    path = tmp_path / "month.csv"
    code = main(["generate", "--out", str(path), "--providers", "3", "--days", "4", "--seed", "7"])
    assert code == 0
    return path


def test_validate_clean_file(tmp_path, capsys):
    path = write_input(tmp_path, CLEAN_ROWS)
    assert main(["validate", "--input", str(path), "--min-patients", "1"]) == 0
    assert "0 violations" in capsys.readouterr().out


def test_validate_reports_split_as_info(tmp_path, capsys):
    rows = [
        ["P1", "2017-03-27", "10:00", "30", "10:00", "", "10:00", "", "10:40", ""],
        ["P1", "2017-03-27", "10:30", "30", "10:30", "", "10:30", "", "11:00", ""],
    ]
    path = write_input(tmp_path, rows)
    assert main(["validate", "--input", str(path), "--min-patients", "1"]) == 0

    out = capsys.readouterr().out
    assert "[info]" in out
    assert "split at 635" in out
    assert "0 violations" in out


def test_validate_arrival_after_room_in(tmp_path, capsys):
    rows = CLEAN_ROWS + [["P1", "2017-03-27", "11:00", "30", "11:20", "", "11:10", "", "11:40", ""]]
    path = write_input(tmp_path, rows)
    assert main(["validate", "--input", str(path), "--min-patients", "1"]) == 2
    assert "[violation]" in capsys.readouterr().out


def test_missing_file_exits_1(tmp_path):
    assert main(["validate", "--input", str(tmp_path / "nope.csv")]) == 1


def test_schema_error_exits_1(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("provider_id,date\nP1,2017-03-27\n", encoding="utf-8")
    assert main(["diagnose", "--input", str(path), "--out", str(tmp_path / "out")]) == 1


def test_negative_epsilon_exits_1(tmp_path):
    path = write_input(tmp_path, CLEAN_ROWS)
    assert main(["diagnose", "--input", str(path), "--out", str(tmp_path / "out"), "--epsilon", "-1"]) == 1


def test_diagnose_writes_gantt_and_manifest(tmp_path):
    path = write_input(tmp_path, CLEAN_ROWS)
    out = tmp_path / "out"
    assert main(["diagnose", "--input", str(path), "--out", str(out), "--min-patients", "1",
                 "--oracle-check"]) == 0

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["days"] == 1
    assert manifest["included_days"] == 1
    assert manifest["infeasible_days"] == 0
    assert manifest["oracle"] == "agree"
    # Третий пациент опоздал на 10 минут
    assert manifest["sum_delta_ap"] == 1
    assert manifest["sum_delta_ae"] == 0
    assert manifest["observations"]["late_arrivals"] == 1

    document = json.loads((out / "gantt" / "P1_2017-03-27.json").read_text())
    assert document["objective"] == 1
    assert [a["flip_arrival"] for a in document["appointments"]] == [False, False, True]


def test_diagnose_writes_one_gantt_file_per_day(tmp_path):
    rows = [
        ["A/B", "2017-03-27", "09:00", "30", "09:00", "", "09:00", "", "09:30", ""],
        ["A_B", "2017-03-27", "09:00", "30", "09:05", "", "09:05", "", "09:35", ""],
    ]
    path = write_input(tmp_path, rows)
    out = tmp_path / "out"
    assert main(["diagnose", "--input", str(path), "--out", str(out), "--min-patients", "1"]) == 0

    manifest = json.loads((out / "manifest.json").read_text())
    files = sorted(p.name for p in (out / "gantt").iterdir())
    assert len(files) == manifest["included_days"] == 2
    providers = {json.loads((out / "gantt" / name).read_text())["provider_id"] for name in files}
    assert providers == {"A/B", "A_B"}


def test_diagnose_empty_after_filtering(tmp_path):
    path = write_input(tmp_path, CLEAN_ROWS)
    out = tmp_path / "out"
    assert main(["diagnose", "--input", str(path), "--out", str(out)]) == 0

    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["days"] == 0
    assert manifest["days_below_min_patients"] == 1
    assert manifest["oracle"] == "skipped"


def test_report_subset(tmp_path, month_csv):
    out = tmp_path / "reports"
    assert main(["report", "--input", str(month_csv), "--out", str(out), "--reports", "half"]) == 0
    assert sorted(p.name for p in out.iterdir()) == ["by_half.csv", "exclusions.csv"]


def test_report_conservation(tmp_path, month_csv):
    out = tmp_path / "reports"
    assert main(["report", "--input", str(month_csv), "--out", str(out), "--reports", "provider,date,half"]) == 0

    providers = pd.read_csv(out / "by_provider.csv")
    dates = pd.read_csv(out / "by_date.csv")
    halves = pd.read_csv(out / "by_half.csv")

    for column in ("sum_delta_ap", "sum_delta_ae"):
        assert providers[column].sum() == dates[column].sum() == halves[column].sum()
    assert providers["patients_seen"].sum() == dates["patients_seen"].sum()
    assert list(providers["patients_seen"]) == sorted(providers["patients_seen"], reverse=True)


def test_runs_are_byte_identical(tmp_path, month_csv):
    outputs = []
    for run in ("a", "b"):
        out = tmp_path / run
        assert main(["diagnose", "--input", str(month_csv), "--out", str(out), "--oracle-check"]) == 0
        assert main(["report", "--input", str(month_csv), "--out", str(out)]) == 0
        outputs.append(snapshot(out))

    assert outputs[0] == outputs[1]
    assert "manifest.json" in outputs[0]


def test_worker_pool_output_matches_single_process(tmp_path, month_csv):
    single = tmp_path / "single"
    pooled = tmp_path / "pooled"
    assert main(["diagnose", "--input", str(month_csv), "--out", str(single)]) == 0
    assert main(["diagnose", "--input", str(month_csv), "--out", str(pooled), "--workers", "2"]) == 0
    assert snapshot(single) == snapshot(pooled)


def test_full_month_runs_quickly(tmp_path):
    path = tmp_path / "month.csv"
    assert main(["generate", "--out", str(path), "--seed", "1"]) == 0

    started = time.perf_counter()
    assert main(["report", "--input", str(path), "--out", str(tmp_path / "out")]) == 0
    assert time.perf_counter() - started < 30


def test_epsilon_flag_default_follows_config(monkeypatch):
    monkeypatch.setattr(config.diagnosis, "epsilon", 5)
    args = build_parser().parse_args(["diagnose", "--input", "x.csv", "--out", "out"])
    assert args.epsilon == 5
