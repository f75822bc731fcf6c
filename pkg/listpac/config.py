import logging
from dataclasses import dataclass, replace

import yaml

from listpac.errors import ConfigError

logger = logging.getLogger("listpac.config")

# --- Configuration & Constants ---
CONFIG_FILE = 'config.yaml'
SETTINGS_KEY = 'listpac_settings'
LOG_FORMAT = '[%(levelname)s] %(message)s'


@dataclass(frozen=True)
class Settings:
    dimension_cap: int = 100000
    grid_row_cap: int = 10_000_000
    maximal_avd_cap: int = 65536
    orient_search_cap: int = 2_000_000
    enumeration_cap: int = 2_000_000
    stage1_retries: int = 200
    stage1_exhaustive_cap: int = 20000
    stage2_n: int | None = None
    stage2_l: int | None = None
    mw_eta: float = 0.5
    stage2_seed_retries: int = 3
    default_seed: int = 0
    seed_stride: int = 1000003
    threads: int = 1
    log_level: str = 'INFO'
    csv_schema: str = 'listpac-csv/1'

    def with_overrides(self, **changes):
        """Copy with the given non-None fields replaced."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})


DEFAULT_SETTINGS = Settings()


def _optional_int(value):
    return None if value is None else int(value)


def load_settings(path=CONFIG_FILE):
    """
    Load listpac settings from a YAML file.

    Returns:
        Settings: values from the file, defaults for optional keys left out.
    """
    # --- Load Configuration from YAML ---
    try:
        with open(path, 'r') as f:
            config_full = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"Configuration file '{path}' not found.")
    except yaml.YAMLError as e:
        raise ConfigError(f"Error parsing configuration file '{path}': {e}")

    if not isinstance(config_full, dict) or SETTINGS_KEY not in config_full:
        raise ConfigError(f"'{SETTINGS_KEY}' key not found at the top level of '{path}'.")
    config = config_full[SETTINGS_KEY] or {}

    # --- Settings from Config ---
    try:
        settings = Settings(
            dimension_cap         = int(config.get('DIMENSION_CAP', DEFAULT_SETTINGS.dimension_cap)),
            grid_row_cap          = int(config.get('GRID_ROW_CAP', DEFAULT_SETTINGS.grid_row_cap)),
            maximal_avd_cap       = int(config.get('MAXIMAL_AVD_CAP', DEFAULT_SETTINGS.maximal_avd_cap)),
            orient_search_cap     = int(config.get('ORIENT_SEARCH_CAP', DEFAULT_SETTINGS.orient_search_cap)),
            enumeration_cap       = int(config.get('ENUMERATION_CAP', DEFAULT_SETTINGS.enumeration_cap)),
            stage1_retries        = int(config.get('STAGE1_RETRIES', DEFAULT_SETTINGS.stage1_retries)),
            stage1_exhaustive_cap = int(config.get('STAGE1_EXHAUSTIVE_CAP', DEFAULT_SETTINGS.stage1_exhaustive_cap)),
            stage2_n              = _optional_int(config.get('STAGE2_N')),
            stage2_l              = _optional_int(config.get('STAGE2_L')),
            mw_eta                = float(config.get('MW_ETA', DEFAULT_SETTINGS.mw_eta)),
            stage2_seed_retries   = int(config.get('STAGE2_SEED_RETRIES', DEFAULT_SETTINGS.stage2_seed_retries)),
            default_seed          = int(config.get('DEFAULT_SEED', DEFAULT_SETTINGS.default_seed)),
            seed_stride           = int(config.get('SEED_STRIDE', DEFAULT_SETTINGS.seed_stride)),
            threads               = int(config.get('THREADS', DEFAULT_SETTINGS.threads)),
            log_level             = str(config.get('LOG_LEVEL', DEFAULT_SETTINGS.log_level)).upper(),
            csv_schema            = str(config.get('CSV_SCHEMA', DEFAULT_SETTINGS.csv_schema)),
        )
    except AttributeError:
        raise ConfigError(f"'{SETTINGS_KEY}' in '{path}' must be a mapping of settings.")
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid value type in configuration file '{path}': {e}")

    for name in ('dimension_cap', 'grid_row_cap', 'maximal_avd_cap', 'orient_search_cap',
                 'enumeration_cap', 'stage1_exhaustive_cap', 'threads'):
        if getattr(settings, name) < 1:
            raise ConfigError(f"{name.upper()} must be at least 1 in '{path}'.")
    if not isinstance(logging.getLevelName(settings.log_level), int):
        raise ConfigError(f"Unknown LOG_LEVEL '{settings.log_level}' in '{path}'.")

    logger.info(f"Loaded configuration from {path}")
    return settings
