import io
from pathlib import Path

from intern.utils import ConfigError, Logger, deep_merge, resolve_config_path


def test_logger_counts_and_dedups(quiet_logger):
    child = quiet_logger.with_context("cone")
    child.warn("same")
    child.warn("same")
    quiet_logger.error("bad")
    out = quiet_logger.stream.getvalue()
    assert out.count("[CONE] [WARN] same") == 1
    assert quiet_logger.warn_count == 2
    assert quiet_logger.error_count == 1
    assert quiet_logger.get_dedup_summary() == ['  [WARN] "same" - seen 2x (first shown above)']


def test_debug_needs_verbose():
    stream = io.StringIO()
    logger = Logger(verbose=False, use_color=False, stream=stream)
    logger.debug("hidden")
    logger.info("shown")
    assert "hidden" not in stream.getvalue()
    assert "shown" in stream.getvalue()


def test_log_file_gets_clean_text_and_blocks(tmp_path):
    path = tmp_path / "log.txt"
    logger = Logger(use_color=True, log_file=path, stream=io.StringIO())
    logger.with_context("suite").info(f"result {logger.verdict(True)}")
    logger.write_block('[\n  {}\n]', "reports")
    text = path.read_text(encoding="utf-8")
    assert "[INFO] [SUITE] result PASS" in text
    assert "\033" not in text
    assert "--- BEGIN reports\n[\n  {}\n]\n" in text


def test_suite_counters(quiet_logger):
    quiet_logger.count_suite("pass", 3, 3)
    quiet_logger.with_context("suite").count_suite("fail", 2, 1)
    quiet_logger.count_suite("skip")
    assert (quiet_logger.suites_run, quiet_logger.suites_passed, quiet_logger.suites_failed,
            quiet_logger.suites_skipped) == (3, 1, 1, 1)
    assert (quiet_logger.checks_run, quiet_logger.checks_passed) == (5, 4)


def test_deep_merge_keeps_nested_keys():
    base = {"structure": {"theta0": ["a"], "endo": [["b"]]}, "name": "x"}
    merged = deep_merge(base, {"structure": {"gamma": ["c"]}, "name": "y"})
    assert merged == {"structure": {"theta0": ["a"], "endo": [["b"]], "gamma": ["c"]}, "name": "y"}
    assert "gamma" not in base["structure"]


def test_resolve_config_path(tmp_path):
    path = tmp_path / "mine.json"
    path.write_text("{}", encoding="utf-8")
    assert resolve_config_path(str(path)) == str(path)
    assert resolve_config_path(str(tmp_path / "mine")) == str(path)
    assert Path(resolve_config_path("example2")).name == "example2.json"
    assert resolve_config_path("no-such-config") is None
    assert resolve_config_path("  ") is None


def test_config_error_location():
    e = ConfigError("bad value", "a.json: chart.box")
    assert str(e) == "a.json: chart.box: bad value"
    assert e.message == "bad value"
