import json, sys
from pathlib import Path
from typing import Optional

from .constants import CONFIG_SUFFIX
from .logger import Logger


class ConfigError(Exception):
    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.message = message
        self.location = location


def _project_root() -> Path:
    # In dev mode __file__ is intern/utils/config.py - go up 3 levels to reach the project root.
    return Path(sys.executable).parent if getattr(sys, 'frozen', False) else Path(__file__).parent.parent.parent


def resolve_config_path(config_path_str: str, logger: Optional[Logger] = None) -> Optional[str]:
    """
    Finds a config by path, then by path + .json, then by name under
    <project>/configs. Returns None when nothing matches.
    """
    def log(level, msg):
        if logger: getattr(logger, level)(msg)

    if not config_path_str or not config_path_str.strip():
        log("error", "Config file path argument is empty. Please provide a valid path.")
        return None

    config_path = Path(config_path_str)
    candidates = [config_path]
    if not config_path.suffix:
        candidates.append(config_path.with_suffix(CONFIG_SUFFIX))
    for c in candidates:
        if c.is_file():
            return str(c)

    configs_dir = _project_root() / "configs"
    log("debug", f"Config file not found at '{config_path_str}'. Searching in '{configs_dir}'...")
    if not configs_dir.is_dir():
        log("warn", f"The 'configs' directory does not exist at '{configs_dir}'.")
        return None

    names = {c.name for c in candidates}
    found = [f for f in sorted(configs_dir.rglob("*")) if f.is_file() and f.name in names]
    if not found:
        log("warn", f"Could not find '{config_path_str}' in '{configs_dir}'.")
        return None
    if len(found) > 1:
        log("warn", f"Found multiple '{found[0].name}' files. Using the first one:")
        for f in found: log("warn", f"  - {f}")

    resolved = str(found[0])
    log("debug", f"Found config file: {resolved}")
    return resolved


def deep_merge(base: dict, override: dict) -> dict:
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = deep_merge(result[key], value)
        else:
            result[key] = value
    return result


def _load_json(path: Path) -> dict:
    def first_key_hook(pairs):
        d = {}
        for key, value in pairs:
            if key not in d:
                d[key] = value
        return d

    try:
        text = path.read_text(encoding="utf-8-sig")
    except UnicodeDecodeError:
        text = path.read_text(encoding="latin-1")
    try:
        data = json.loads(text, object_pairs_hook=first_key_hook)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, f"{path}:{e.lineno}:{e.colno}") from e
    if not isinstance(data, dict):
        raise ConfigError("top level must be an object", str(path))
    return data


def parse_config_json(config_path: str, seen_paths=None, filter_keys=None) -> dict:
    """
    Reads a JSON config, merging any `include` files underneath it (the
    including file wins). Every top-level config needs a `header` key.
    """
    if seen_paths is None:
        seen_paths = set()
    if filter_keys is None:
        filter_keys = []

    config_path = Path(config_path).resolve()
    if config_path in seen_paths:
        raise ConfigError("circular include", str(config_path))
    seen_paths.add(config_path)

    if not config_path.exists():
        raise ConfigError("config file not found", str(config_path))

    config = _load_json(config_path)

    includes = config.get("include")
    if includes:
        if isinstance(includes, str):
            includes = [includes]

        included_data = {}
        for inc_path_str in includes:
            inc_path = Path(inc_path_str)
            if not inc_path.is_absolute():
                relative_to_config = config_path.parent / inc_path
                fallback = _project_root() / "configs" / inc_path
                inc_path = relative_to_config if relative_to_config.exists() or not fallback.exists() else fallback
            inc_json = parse_config_json(inc_path, seen_paths, filter_keys=["include", "header"] + filter_keys)
            included_data = deep_merge(included_data, inc_json)

        for key in filter_keys:
            included_data.pop(key, None)

        config = deep_merge(included_data, config)

    if not filter_keys and "header" not in config:
        raise ConfigError("missing 'header' field", str(config_path))

    return config
