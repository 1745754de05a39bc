"""End-to-end checks of the ccrush command line."""

import json
import subprocess
import sys

import pytest

from ccrush import corpus
from ccrush.cli import main
from ccrush.report import source_digest


@pytest.fixture()
def short_file(tmp_path):
    path = tmp_path / "short.ccl"
    path.write_text(corpus.source("running-example-short.ccl"))
    return str(path)


@pytest.fixture()
def full_file(tmp_path):
    path = tmp_path / "full.ccl"
    path.write_text(corpus.source("running-example.ccl"))
    return str(path)


def test_analyze_text(short_file, capsys):
    assert main(["analyze", short_file]) == 0
    out = capsys.readouterr().out
    assert "statement influences for short.ccl" in out
    assert "work(3000)" in out
    assert "{A}" in out
    assert "{A,B}" in out


def test_analyze_json(short_file, capsys):
    assert main(["analyze", "--json", short_file]) == 0
    payload = json.loads(capsys.readouterr().out)
    influence = payload["influence"]
    assert influence["1"] == []  # leading work statement
    assert ["A", "C"] in influence.values()


def test_regions_text_and_optimization_flag(short_file, capsys):
    assert main(["regions", short_file]) == 0
    optimized = capsys.readouterr().out.strip().splitlines()
    assert optimized[0].startswith("base ")
    assert len(optimized) == 3  # base + two merged regions

    assert main(["regions", "--no-optimize", short_file]) == 0
    plain = capsys.readouterr().out.strip().splitlines()
    assert len(plain) == 4  # base + three regions before merging


def test_regions_json(short_file, capsys):
    assert main(["regions", "--json", short_file]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert sorted(r["options"] for r in payload["regions"]) == [["A", "B"], ["A", "C"]]
    for r in payload["regions"]:
        assert set(r) == {"id", "function", "options", "start", "end"}


def test_compress_text(short_file, capsys):
    assert main(["compress", short_file]) == 0
    out = capsys.readouterr().out
    assert "4 of 8 configurations cover 3 interactions" in out
    body = [l.strip() for l in out.strip().splitlines()[1:]]
    assert body == ["(none)", "B,C", "A", "A,B,C"]


def test_compress_csv(short_file, capsys):
    assert main(["compress", "--csv", short_file]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines == [
        "A,B,C",
        "false,false,false",
        "false,true,true",
        "true,false,false",
        "true,true,true",
    ]


def test_run_text(short_file, capsys):
    assert main(["run", short_file, "--config", "A"]) == 0
    out = capsys.readouterr().out
    assert "configuration: A" in out
    assert "end-to-end: 4000 ms in 6 region events" in out


def test_run_json(short_file, capsys):
    assert main(["run", short_file, "--config", "A,B,C", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["configuration"] == ["A", "B", "C"]
    assert payload["end_to_end_ms"] == "10000"
    assert payload["events"] == 6
    times = {tuple(r["options"]): r["time_ms"] for r in payload["regions"]}
    assert times == {(): "1000", ("A", "C"): "6000", ("A", "B"): "3000"}


def test_run_rejects_unknown_option(short_file, capsys):
    assert main(["run", short_file, "--config", "A,Z"]) == 2
    assert "unknown options" in capsys.readouterr().err


def test_model_text(short_file, capsys):
    assert main(["model", short_file]) == 0
    out = capsys.readouterr().out
    assert "measured 4 configurations" in out
    assert "global model (s): 1 + 3*A + 3*A*B + 3*A*C" in out


def test_model_json(full_file, capsys):
    assert main(["model", full_file, "--json", "--jobs", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    terms = {
        "*".join(t["options"]) or "1": t["coefficient_ms"] for t in payload["terms"]
    }
    assert terms["1"] == "1000"
    assert terms["A"] == "3100"
    assert terms["D*E*F"] == "5000"
    assert len(terms) == 13


def test_groundtruth_cache_roundtrip(short_file, tmp_path, capsys):
    cache = str(tmp_path / "gt")
    assert main(["groundtruth", short_file, "--cache", cache]) == 0
    first = capsys.readouterr().out
    assert "8 configurations measured" in first
    assert "cache written" in first

    digest = source_digest(corpus.source("running-example-short.ccl"))
    assert (tmp_path / "gt" / f"{digest}.gt.json").exists()

    assert main(["groundtruth", short_file, "--cache", cache]) == 0
    assert "cache hit" in capsys.readouterr().out


def test_groundtruth_json(short_file, capsys):
    assert main(["groundtruth", short_file, "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert len(payload["times_ms"]) == 8
    assert payload["times_ms"]["A,B,C"] == "10000"
    assert payload["times_ms"][""] == "1000"


def test_compare_text(short_file, capsys):
    assert main(["compare", short_file, "--jobs", "2"]) == 0
    out = capsys.readouterr().out
    assert "short.ccl: 3 options, 8 configurations" in out
    for name in ("cc", "bf", "fw", "pw", "splat", "splat-lazy"):
        assert any(line.startswith(name + " ") for line in out.splitlines())


def test_compare_csv_subset(short_file, capsys):
    assert main(["compare", short_file, "--approaches", "cc,bf", "--csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "approach,runs,mape_percent"
    assert lines[1] == "cc,4,0"
    assert lines[2] == "bf,8,0"


def test_compare_json_uses_cache(short_file, tmp_path, capsys):
    cache = str(tmp_path / "gt")
    args = ["compare", short_file, "--approaches", "cc", "--json", "--cache", cache]
    assert main(args) == 0
    payload = json.loads(capsys.readouterr().out)
    row = payload["approaches"][0]
    assert row["name"] == "cc"
    assert row["runs"] == 4
    assert row["mape_percent"] == "0"
    assert row["model"] == "1 + 3*A + 3*A*B + 3*A*C"
    # second invocation reads the cache written by the first
    assert main(args) == 0
    assert json.loads(capsys.readouterr().out) == payload


def test_compare_rejects_unknown_approach(short_file, capsys):
    assert main(["compare", short_file, "--approaches", "cc,magic"]) == 2
    assert "unknown approaches: magic" in capsys.readouterr().err


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.ccl"
    bad.write_text("options A;\nfn main() { work(; }\n")
    assert main(["analyze", str(bad)]) == 1
    assert "ccrush: error:" in capsys.readouterr().err


def test_missing_file_exit_code(capsys):
    assert main(["analyze", "/nonexistent/nope.ccl"]) == 1


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_json_csv_mutually_exclusive(short_file):
    with pytest.raises(SystemExit) as err:
        main(["compress", short_file, "--json", "--csv"])
    assert err.value.code == 2


def test_repeated_json_output_is_identical(short_file, capsys):
    outs = []
    for _ in range(2):
        assert main(["regions", "--json", short_file]) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]


def test_command_line_entry_point(short_file):
    import shutil

    script = shutil.which("ccrush")
    argv = (
        [script] if script else [sys.executable, "-m", "ccrush.cli"]
    ) + ["run", short_file, "--config", "A,B"]
    proc = subprocess.run(argv, capture_output=True, text=True)
    assert proc.returncode == 0
    assert "end-to-end: 7000 ms" in proc.stdout
