from .logger import Logger
from .constants import (
    SOFTVERSION, SOFTBUILDDATE, IS_DEV_BUILD, SOFTSHA256,
    CONFIG_HEADER, CONFIG_SUFFIX, LOG_DIR,
    DEFAULT_SEED, DEFAULT_SAMPLES, DEFAULT_TOLERANCE_SCALE,
    EXIT_PASS, EXIT_SUITE_FAILURE, EXIT_USAGE,
)
from .config import ConfigError, resolve_config_path, deep_merge, parse_config_json
from .helpers import timer, print_header, print_summary
