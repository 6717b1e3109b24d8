import json
from pathlib import Path

import pytest

from intern.catalog import build_example
from intern.manifest import load_config
from intern.suites import RunOptions, dump_reports, run_suites
from intern.utils import ConfigError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"

HEISENBERG = {
    "header": "CRWeyl",
    "name": "heisenberg",
    "params": {"lambda": 2},
    "chart": {"coords": ["x", "y", "t"], "box": {"x": [-1, 1], "y": [-1, 1], "t": [-1, 1]}},
    "structure": {
        "theta0": ["-y", "x", "-1"],
        "endo": [["0", "-1", "0"], ["1", "0", "0"], ["x", "y", "0"]],
    },
}


def _write(tmp_path, data, name="config.json") -> Path:
    path = tmp_path / name
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return path


def _with(base: dict, section: str, **changes) -> dict:
    out = json.loads(json.dumps(base))
    out[section].update(changes)
    return out


def test_minimal_config(tmp_path, quiet_logger):
    bundle = load_config(_write(tmp_path, HEISENBERG), quiet_logger)
    assert bundle.name == "heisenberg"
    assert bundle.params == {"lambda": 2}
    assert bundle.action is None and bundle.slice is None
    assert bundle.structure.chart.coords == ("x", "y", "t")
    assert "Loaded 'heisenberg'" in quiet_logger.stream.getvalue()


@pytest.mark.parametrize("suites", [["sasaki-weyl", "cone"], ["reduction", "exactness"]])
def test_example2_config_reproduces_builtin_reports(suites, quiet_logger):
    options = RunOptions(samples=5, seed=7)
    from_file = load_config(CONFIGS / "example2.json")
    builtin = build_example("example2")
    assert from_file.expected == builtin.expected
    a = dump_reports(run_suites(from_file, suites, options, quiet_logger), timing=False)
    b = dump_reports(run_suites(builtin, suites, options, quiet_logger), timing=False)
    assert a == b


def test_include_overrides_and_clears_expectations():
    bundle = load_config(CONFIGS / "example2-broken.json")
    assert bundle.name == "example2-broken"
    assert bundle.expected["sasaki-weyl"] == "fail"
    assert "reduction" not in bundle.expected
    assert bundle.action is not None
    p = bundle.structure.chart.sample(1, seed=0)[0]
    assert bundle.structure.gamma(p, [1, 0, 0, 0, 0]) == pytest.approx(p[0])


def test_degenerate_structure_is_rejected_with_failing_invariant():
    with pytest.raises(ConfigError, match="levi_positive"):
        load_config(CONFIGS / "degenerate.json")


def test_undeclared_coordinate_is_named(tmp_path):
    data = _with(HEISENBERG, "structure", theta0=["-y", "x + z", "-1"])
    with pytest.raises(ConfigError) as err:
        load_config(_write(tmp_path, data))
    assert "'z'" in str(err.value)
    assert err.value.location == "config.json: structure.theta0[1]"


def test_json_syntax_error_has_position(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "header": "CRWeyl",\n  "name": oops\n}\n', encoding="utf-8")
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.location.endswith("bad.json:3:11")


def test_wrong_header(tmp_path):
    with pytest.raises(ConfigError, match="header must be 'CRWeyl'"):
        load_config(_write(tmp_path, {**HEISENBERG, "header": "Other"}))


def test_circular_include(tmp_path):
    _write(tmp_path, {"header": "CRWeyl", "include": "b.json"}, "a.json")
    _write(tmp_path, {"header": "CRWeyl", "include": "a.json"}, "b.json")
    with pytest.raises(ConfigError, match="circular include"):
        load_config(tmp_path / "a.json")


@pytest.mark.parametrize("section, changes, fragment", [
    ("chart", {"box": {"x": [1, -1], "y": [-1, 1], "t": [-1, 1]}}, "empty interval"),
    ("chart", {"box": {"x": [-1, 1], "y": [-1, 1]}}, "no interval for coordinate 't'"),
    ("chart", {"coords": ["x", "x", "t"]}, "duplicate coordinate"),
    ("structure", {"theta0": ["-y", "x"]}, "expected 3 entries"),
    ("structure", {"endo": [["0", "-1", "0"], ["1", "0", "0"]]}, "3x3 matrix"),
])
def test_malformed_sections(tmp_path, section, changes, fragment):
    with pytest.raises(ConfigError, match=fragment):
        load_config(_write(tmp_path, _with(HEISENBERG, section, **changes)))


def test_numeric_params_and_expressions(tmp_path):
    data = json.loads(json.dumps(HEISENBERG))
    data["params"] = {"lambda": "2^2 - 2", "k": "lambda * pi"}
    data["chart"]["box"]["t"] = ["-k", "k"]
    bundle = load_config(_write(tmp_path, data))
    assert bundle.params["lambda"] == pytest.approx(2.0)
    assert bundle.structure.chart.box[2][1] == pytest.approx(2.0 * 3.141592653589793)


def test_bad_expectation(tmp_path):
    data = {**HEISENBERG, "expect": {"cone": "maybe"}}
    with pytest.raises(ConfigError, match="expected one of"):
        load_config(_write(tmp_path, data))


def test_slice_needs_action(tmp_path):
    data = {**HEISENBERG, "slice": {"coords": ["u"], "box": {"u": [0, 1]}, "embedding": ["u", "0", "0"]}}
    with pytest.raises(ConfigError, match="needs an 'action'"):
        load_config(_write(tmp_path, data))
