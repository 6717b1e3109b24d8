import json

import pytest

from intern.cli import _normalize_args, run
from intern.utils import EXIT_PASS, EXIT_SUITE_FAILURE, EXIT_USAGE

FAST = ["--samples", "4", "--no-color"]


def test_passing_suite():
    outcome = run(["verify", "--example", "example2", "--suite", "sasaki-weyl", *FAST])
    assert outcome.code == EXIT_PASS
    assert [r.suite for r in outcome.reports] == ["sasaki-weyl"]


def test_failing_suite():
    outcome = run(["verify", "--example", "example2-broken", "--suite", "sasaki-weyl", *FAST])
    assert outcome.code == EXIT_SUITE_FAILURE
    assert outcome.logger.suites_failed == 1


def test_skipped_suite_counts_as_pass():
    outcome = run(["verify", "--example", "sphere", "--suite", "exactness", *FAST])
    assert outcome.code == EXIT_PASS
    assert outcome.reports[0].outcome == "skip"


@pytest.mark.parametrize("argv", [
    ["verify", "--example", "nope"],
    ["verify", "--example", "example2", "--suite", "nope"],
    ["verify", "--example", "example2", "--config", "example2"],
    ["verify"],
    ["verify", "--config", "does-not-exist.json"],
    ["verify", "--example", "example2", "--weights=1,1"],
    ["verify", "--example", "example2", "--samples", "0"],
    [],
])
def test_usage_errors(argv):
    assert run(argv).code == EXIT_USAGE


def test_help_is_not_an_error():
    assert run(["--help"]).code == EXIT_PASS


def test_config_file_by_name():
    outcome = run(["verify", "--config", "degenerate", *FAST])
    assert outcome.code == EXIT_USAGE
    assert outcome.logger.error_count == 1


def test_json_output_is_deterministic(tmp_path):
    argv = ["verify", "--example", "example2-flipped", "--suite", "cr-axioms", "--suite", "cone",
            "--no-timing", *FAST]
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    assert run([*argv, "--json", str(first)]).code == EXIT_SUITE_FAILURE
    assert run([*argv, "--json", str(second)]).code == EXIT_SUITE_FAILURE
    assert first.read_text() == second.read_text()
    data = json.loads(first.read_text())
    assert [r["suite"] for r in data] == ["cr-axioms", "cone"]
    assert all(not r["pass"] for r in data)
    assert "seconds" not in data[0]


def test_json_to_stdout(capsys):
    run(["verify", "--example", "example2", "--suite", "calculus", "--json", "-", *FAST])
    out = capsys.readouterr().out
    start = out.index("[\n")
    data = json.loads(out[start:out.rindex("]") + 1])
    assert data[0]["example"] == "example2"
    assert "seconds" in data[0]


def test_log_file(tmp_path):
    log = tmp_path / "logs" / "run.txt"
    run(["verify", "--example", "example2", "--suite", "calculus", "--log", str(log), *FAST])
    text = log.read_text(encoding="utf-8")
    assert "--- BEGIN reports" in text
    assert "[SUITE]" in text


def test_list(capsys):
    assert run(["list", "--no-color"]).code == EXIT_PASS
    out = capsys.readouterr().out
    assert "example2-twisted" in out
    assert "cr-axioms=fail" in out


def test_report_schema(capsys):
    assert run(["report-schema"]).code == EXIT_PASS
    schema = json.loads(capsys.readouterr().out)
    assert schema["title"] == "SuiteReport"


def test_single_dash_long_options():
    assert _normalize_args(["-verbose", "--seed", "-3", "-v", "--weights=-1,1"]) == \
        ["--verbose", "--seed", "-3", "-v", "--weights=-1,1"]
