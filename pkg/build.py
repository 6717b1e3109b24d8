MAIN_SCRIPT = "main.py"
EXE_NAME = "weylcone"
ONE_FILE = True

VERSION_FILE = "version.json"
CONSTANTS_FILE = "intern/utils/constants.py"
DIST_DIR = "dist"

# resolve_config_path looks next to the frozen executable
SHIPPED_DIRS = ["configs"]

# quad and null_space load compiled extensions the hooks do not always see
COLLECT_SUBMODULES = ["scipy.linalg", "scipy.integrate", "scipy.special"]
HIDDEN_IMPORTS = ["simpleeval"]
EXCLUDED_MODULES = ["pytest", "hypothesis", "tkinter", "matplotlib", "IPython"]

import json
import os
import re
import shutil
import subprocess
import sys
from datetime import datetime


def detect_environment():
    in_venv = hasattr(sys, 'real_prefix') or (
        hasattr(sys, 'base_prefix') and sys.base_prefix != sys.prefix
    )
    print(f"Using Python from: {'virtual environment' if in_venv else 'global Python'}")
    print(f"Python executable: {sys.executable}")
    print(f"Python version: {sys.version.split()[0]}\n")
    return in_venv


def check_numerics():
    """The frozen binary can only carry what is importable here."""
    missing = []
    for module in ("numpy", "scipy.linalg", "scipy.integrate", "simpleeval"):
        try:
            __import__(module)
        except ImportError:
            missing.append(module)
    if missing:
        print(f"Error: missing modules {', '.join(missing)}. Run 'pip install -r requirements.txt'.")
        return False
    return True


def stamp_build(version: str, build_stamp: str) -> str:
    """
    Writes IS_DEV_BUILD, SOFTVERSION and SOFTBUILDDATE into constants.py.
    Returns the original content for restore_build.
    """
    with open(CONSTANTS_FILE, "r", encoding="utf-8") as f:
        original = f.read()

    stamps = {
        r"^(IS_DEV_BUILD\s*:\s*bool\s*=\s*).*$": "False",
        r"^(SOFTVERSION\s*:\s*str\s*=\s*).*$": f'"{version}"',
        r"^(SOFTBUILDDATE\s*:\s*str\s*=\s*).*$": f'"{build_stamp}"',
    }
    patched = original
    for pattern, value in stamps.items():
        patched, count = re.subn(pattern, rf"\g<1>{value}", patched, flags=re.MULTILINE)
        if count != 1:
            raise RuntimeError(f"{CONSTANTS_FILE}: expected one match for {pattern}, found {count}")

    with open(CONSTANTS_FILE, "w", encoding="utf-8") as f:
        f.write(patched)
    return original


def restore_build(original_content: str):
    with open(CONSTANTS_FILE, "w", encoding="utf-8") as f:
        f.write(original_content)


def pyinstaller_command() -> list:
    cmd = ["pyinstaller", "--clean", "--noconfirm", "--console", f"--name={EXE_NAME}", "--noupx"]
    if ONE_FILE:
        cmd.append("--onefile")
    cmd += [f"--collect-submodules={m}" for m in COLLECT_SUBMODULES]
    cmd += [f"--hidden-import={m}" for m in HIDDEN_IMPORTS]
    cmd += [f"--exclude-module={m}" for m in EXCLUDED_MODULES]
    cmd.append(MAIN_SCRIPT)
    return cmd


def executable_path() -> str:
    name = f"{EXE_NAME}.exe" if sys.platform == "win32" else EXE_NAME
    return os.path.join(DIST_DIR, name) if ONE_FILE else os.path.join(DIST_DIR, EXE_NAME, name)


def ship_data_dirs():
    target_root = os.path.dirname(executable_path())
    for folder in SHIPPED_DIRS:
        if not os.path.isdir(folder):
            print(f"Warning: '{folder}' not found, not shipped.")
            continue
        target = os.path.join(target_root, folder)
        shutil.copytree(folder, target, dirs_exist_ok=True)
        print(f"Shipped {folder}/ -> {target}")


def smoke_test() -> bool:
    """Runs the frozen binary on the bundled example config."""
    exe = executable_path()
    cmd = [exe, "verify", "--config", "example2", "--suite", "cr-axioms", "--samples", "5", "--no-color"]
    print(f"Smoke test: {' '.join(cmd)}")
    result = subprocess.run(cmd, capture_output=True, text=True)
    if result.returncode != 0:
        print(result.stdout[-2000:])
        print(result.stderr[-2000:])
        print(f"✗ Smoke test exited with {result.returncode}")
        return False
    print("Smoke test passed.")
    return True


def build_executable():
    for required in (MAIN_SCRIPT, CONSTANTS_FILE, VERSION_FILE):
        if not os.path.exists(required):
            print(f"Error: '{required}' not found!")
            return False
    if not check_numerics():
        return False

    with open(VERSION_FILE, "r", encoding="utf-8") as f:
        version_str = str(json.load(f)["version"])

    # YYYYMMDDHHmm
    now = datetime.now()
    build_stamp = now.strftime("%Y%m%d%H%M")
    print(f"Version: {version_str}")
    print(f"Build stamp: {build_stamp}  ({now.strftime('%Y-%m-%d %H:%M')})")

    original_constants = stamp_build(version_str, build_stamp)
    print(f"Stamped constants into {CONSTANTS_FILE}\n")

    cmd = pyinstaller_command()
    print(f"Building executable: {EXE_NAME}")
    print(f"Command: {' '.join(cmd)}\n")

    try:
        subprocess.check_call(cmd)
    except subprocess.CalledProcessError as e:
        print(f"\n✗ Build failed with error code {e.returncode}")
        return False
    finally:
        restore_build(original_constants)
        print(f"\nRestored {CONSTANTS_FILE}.")

    ship_data_dirs()
    print(f"\nExecutable location: {executable_path()}")
    return smoke_test()


def main():
    print("=" * 50)
    print(f"Building: {EXE_NAME}")
    print(f"Main script: {MAIN_SCRIPT}")
    print(f"Mode: {'Single file' if ONE_FILE else 'Folder bundle'}")
    print(f"Shipped folders: {', '.join(SHIPPED_DIRS)}")
    print("=" * 50)
    print()

    detect_environment()
    success = build_executable()
    sys.exit(0 if success else 1)


if __name__ == "__main__":
    main()
