import os

import pytest

import build


def test_pyinstaller_command_collects_scipy_and_drops_test_tools():
    cmd = build.pyinstaller_command()
    assert cmd[0] == "pyinstaller"
    assert cmd[-1] == build.MAIN_SCRIPT
    assert "--collect-submodules=scipy.integrate" in cmd
    assert "--collect-submodules=scipy.linalg" in cmd
    assert "--exclude-module=pytest" in cmd
    assert "--exclude-module=hypothesis" in cmd


def test_stamp_then_restore(tmp_path, monkeypatch):
    constants = tmp_path / "constants.py"
    source = 'IS_DEV_BUILD: bool = True\nSOFTVERSION: str = "0"\nSOFTBUILDDATE: str = "dev"\nDEFAULT_SEED = 42\n'
    constants.write_text(source, encoding="utf-8")
    monkeypatch.setattr(build, "CONSTANTS_FILE", str(constants))

    original = build.stamp_build("1.2.0", "202610181200")
    stamped = constants.read_text(encoding="utf-8")
    assert "IS_DEV_BUILD: bool = False" in stamped
    assert 'SOFTVERSION: str = "1.2.0"' in stamped
    assert 'SOFTBUILDDATE: str = "202610181200"' in stamped
    assert "DEFAULT_SEED = 42" in stamped

    build.restore_build(original)
    assert constants.read_text(encoding="utf-8") == source


def test_stamp_refuses_a_missing_constant(tmp_path, monkeypatch):
    constants = tmp_path / "constants.py"
    constants.write_text('IS_DEV_BUILD: bool = True\nSOFTVERSION: str = "0"\n', encoding="utf-8")
    monkeypatch.setattr(build, "CONSTANTS_FILE", str(constants))
    with pytest.raises(RuntimeError, match="SOFTBUILDDATE"):
        build.stamp_build("1.0", "now")


def test_configs_ship_next_to_the_executable(tmp_path, monkeypatch):
    (tmp_path / "configs").mkdir()
    (tmp_path / "configs" / "example2.json").write_text("{}", encoding="utf-8")
    monkeypatch.chdir(tmp_path)
    build.ship_data_dirs()
    target = os.path.join(os.path.dirname(build.executable_path()), "configs", "example2.json")
    assert os.path.isfile(target)
