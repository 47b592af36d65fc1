import json

import pytest

from driftscan.cli import main


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0


def test_missing_subcommand_is_usage_error():
    assert main([]) == 2


def test_unknown_method_is_usage_error():
    assert main(["scan", "--input", "x.csv", "--ref-len", "10", "--method", "nope"]) == 2


def test_missing_input_file_is_runtime_error(tmp_path):
    code = main(["scan", "--input", str(tmp_path / "absent.csv"), "--ref-len", "10"])
    assert code == 1


def test_gen_csv_stamped_with_manifest(capsys):
    code, out = _run(capsys, "gen", "--kind", "average", "--blocks", "3",
                     "--block-len", "5", "--seed", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# manifest_digest=")
    assert len(lines) == 16  # 1 digest line + 15 data rows


def test_gen_deterministic(capsys):
    _, a = _run(capsys, "gen", "--kind", "variance", "--blocks", "3", "--block-len", "5",
                "--seed", "3")
    _, b = _run(capsys, "gen", "--kind", "variance", "--blocks", "3", "--block-len", "5",
                "--seed", "3")
    assert a == b


def test_gen_json_format(capsys):
    code, out = _run(capsys, "gen", "--kind", "mixture", "--blocks", "3", "--block-len", "4",
                     "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert "manifest_digest" in payload
    assert len(payload["records"]) == 12
    assert payload["records"][0]["epoch"] == 0


def test_gen_writes_file_and_manifest(tmp_path, capsys):
    out_file = tmp_path / "series.csv"
    code = main(["gen", "--kind", "average", "--blocks", "3", "--block-len", "10",
                 "--out", str(out_file)])
    assert code == 0
    manifest = json.loads((tmp_path / "series.csv.manifest.json").read_text())
    assert manifest["version"]
    assert manifest["config"]["kind"] == "average"
    digest_line = out_file.read_text().splitlines()[0]
    assert digest_line.startswith("# manifest_digest=")


@pytest.fixture(scope="module")
def series_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "series.csv"
    assert main(["gen", "--kind", "average", "--blocks", "6", "--block-len", "60",
                 "--seed", "2", "--out", str(path)]) == 0
    return path


def test_scan_emits_one_record_per_position(series_file, capsys):
    code, out = _run(capsys, "scan", "--input", str(series_file), "--ref-len", "60",
                     "--step", "60", "--method", "poset", "--format", "json")
    assert code == 0
    records = json.loads(out)["records"]
    assert [r["window_start"] for r in records] == [60, 120, 180, 240, 300]
    assert set(records[0]) == {"window_start", "method", "raw", "normalized", "p_value",
                               "verdict"}
    # late blocks carry a large mean shift
    assert records[-1]["verdict"] == "different"


def test_scan_martingale(series_file, capsys):
    code, out = _run(capsys, "scan", "--input", str(series_file), "--ref-len", "60",
                     "--method", "martingale", "--format", "json")
    assert code == 0
    records = json.loads(out)["records"]
    assert len(records) == 300  # one per streamed point


def test_calibrate_then_scan_round_trip(series_file, tmp_path, capsys):
    table_file = tmp_path / "tables.json"
    code, out = _run(capsys, "calibrate", str(table_file), "--measures", "ks,hellinger",
                     "--window-sizes", "30,60", "--reps", "100", "--format", "json")
    assert code == 0
    summary = json.loads(out)
    digests = {r["measure"]: r["digest"] for r in summary["records"]}
    manifest = json.loads((tmp_path / "tables.json.manifest.json").read_text())
    assert manifest["table_digests"] == digests

    code, out = _run(capsys, "scan", "--input", str(series_file), "--ref-len", "60",
                     "--step", "60", "--measures", "ks,hellinger", "--calib",
                     str(table_file), "--format", "json")
    assert code == 0
    assert json.loads(out)["records"]


def test_scan_missing_calibrated_measure_is_runtime_error(series_file, tmp_path, capsys):
    table_file = tmp_path / "only_ks.json"
    assert main(["calibrate", str(table_file), "--measures", "ks", "--window-sizes",
                 "30,60", "--reps", "100"]) == 0
    code = main(["scan", "--input", str(series_file), "--ref-len", "60", "--step", "60",
                 "--measures", "ks,hellinger", "--calib", str(table_file)])
    assert code == 1


def test_ncd_and_mmd_single_record(series_file, tmp_path, capsys):
    other = tmp_path / "other.csv"
    assert main(["gen", "--kind", "average", "--blocks", "6", "--block-len", "60",
                 "--seed", "9", "--out", str(other)]) == 0
    code, out = _run(capsys, "ncd", "--input-a", str(series_file), "--input-b", str(other),
                     "--format", "json")
    assert code == 0
    (record,) = json.loads(out)["records"]
    assert 0 <= record["p_value"] <= 1

    code, out = _run(capsys, "mmd", "--input-a", str(series_file), "--input-b", str(other),
                     "--estimator", "linear", "--format", "json")
    assert code == 0
    (record,) = json.loads(out)["records"]
    assert record["estimator"] == "linear"


def test_order_outputs_partition(series_file, tmp_path, capsys):
    other = tmp_path / "other2.csv"
    assert main(["gen", "--kind", "average", "--blocks", "3", "--block-len", "40",
                 "--seed", "5", "--out", str(other)]) == 0
    code, out = _run(capsys, "order", "--input-a", str(other), "--input-b", str(other),
                     "--method", "mst", "--format", "json")
    assert code == 0
    records = json.loads(out)["records"]
    assert sum(r["count_r"] for r in records) == 120
    assert records[-1]["cum_r"] == 1.0


def test_bench_synth_row_shape(capsys):
    code, out = _run(capsys, "bench-synth", "--kind", "average", "--dims", "4", "--runs",
                     "2", "--block-len", "60", "--methods", "mmd_l2", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)["records"]
    assert row["method"] == "mmd_l2"
    assert row["runs"] == 2
    assert 0.0 <= row["median_ratio"] <= 1.0


def test_bench_unidim_row_shape(capsys):
    code, out = _run(capsys, "bench-unidim", "--n-series", "2", "--sets", "standard",
                     "--format", "json")
    assert code == 0
    rows = json.loads(out)["records"]
    assert len(rows) == 10  # one row per disagreement level
    assert all(r["golden"] == 2 for r in rows)
    assert all(r["error"] >= 0 for r in rows)


def test_tsv_format(capsys):
    code, out = _run(capsys, "gen", "--kind", "average", "--blocks", "3", "--block-len",
                     "4", "--format", "tsv")
    assert code == 0
    assert "\t" in out.splitlines()[1]
