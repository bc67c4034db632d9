"""
Configuration loading.
Built-in defaults, overridden by config.yaml, overridden by command-line flags.
"""

import copy
import logging
import os
from typing import Any, Dict, FrozenSet, Iterable, Optional, Union

import yaml

from .engine import EngineConfig
from .models import POS, ConfigError, CrossPosStrategy, HeuristicSource, Measure
from .similarity import SimilarityConfig

logger = logging.getLogger(__name__)

CONFIG_PATH = os.path.join(os.path.dirname(os.path.dirname(__file__)), 'config.yaml')
WORDNET_ENV = "WSD_WORDNET_DIR"

DEFAULTS: Dict[str, Dict[str, Any]] = {
    "engine": {
        "measure": "jcn",
        "heuristics": "s",
        "doc_ctx": True,
        "doc_cf": True,
        "pos_of_interest": ["n", "v", "a", "r"],
        "doc_ctx_pos": ["n", "v"],
        "jcn_zero_denominator_cap": 1e6,
        "cross_pos_strategy": "full-graph-path",
        "normalize_per_matrix": True,
    },
    "resources": {
        "wordnet_dir": None,
        "semcor_cntlist": None,
        "omsti_keys": None,
        "ic": "compute",
        "heuristics_db": None,
    },
    "runtime": {
        "jobs": 1,
        "similarity_cache_size": 1_000_000,
        "distance_cache_size": 256,
        "log_level": "WARNING",
    },
}


def load_config(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """
    Load the YAML config and merge it over the defaults.

    Args:
        path: Config file; the repository's config.yaml when None (skipped if absent)

    Raises:
        ConfigError: unknown section or key, or a file that is not a mapping
    """
    config = copy.deepcopy(DEFAULTS)
    if path is None:
        if not os.path.exists(CONFIG_PATH):
            return config
        path = CONFIG_PATH
    try:
        with open(path, 'r', encoding='utf-8') as f:
            loaded = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML: {e}", path)
    if not isinstance(loaded, dict):
        raise ConfigError("Top level must be a mapping", path)

    for section, values in loaded.items():
        if section not in config:
            raise ConfigError(f"Unknown section '{section}'", path)
        if values is None:
            continue
        if not isinstance(values, dict):
            raise ConfigError(f"Section '{section}' must be a mapping", path)
        for key, value in values.items():
            if key not in config[section]:
                raise ConfigError(f"Unknown key '{section}.{key}'", path)
            config[section][key] = value
    logger.debug("Loaded configuration from %s", path)
    return config


def apply_overrides(config: Dict[str, Dict[str, Any]], section: str, **overrides) -> None:
    """Apply command-line values that were actually given (None means not set)."""
    for key, value in overrides.items():
        if value is None:
            continue
        if key not in config[section]:
            raise ConfigError(f"Unknown key '{section}.{key}'")
        config[section][key] = value


def wordnet_dir(config: Dict[str, Dict[str, Any]]) -> str:
    directory = config["resources"].get("wordnet_dir") or os.environ.get(WORDNET_ENV)
    if not directory:
        raise ConfigError(f"No WordNet directory: pass --wordnet, set resources.wordnet_dir or {WORDNET_ENV}")
    return directory


def parse_on_off(value: Union[str, bool]) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("on", "true", "yes", "1"):
        return True
    if text in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"Expected on/off, got '{value}'")


def parse_pos_list(value: Union[str, Iterable[str]]) -> FrozenSet[POS]:
    items = value.split(",") if isinstance(value, str) else list(value)
    try:
        result = frozenset(POS.parse(str(item)) for item in items if str(item).strip())
    except ValueError as e:
        raise ConfigError(str(e))
    if not result:
        raise ConfigError("POS list is empty")
    return result


def _enum(enum_cls, value, name: str):
    try:
        return enum_cls(str(value).strip().lower())
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"Invalid {name} '{value}' (choose from {choices})")


def engine_config(config: Dict[str, Dict[str, Any]]) -> EngineConfig:
    """Build the engine configuration from the merged `engine` section."""
    section = config["engine"]
    try:
        cap = float(section["jcn_zero_denominator_cap"])
    except (TypeError, ValueError):
        raise ConfigError(f"jcn_zero_denominator_cap must be a number, got '{section['jcn_zero_denominator_cap']}'")
    similarity = SimilarityConfig(
        measure=_enum(Measure, section["measure"], "measure"),
        jcn_zero_denominator_cap=cap,
        cross_pos_strategy=_enum(CrossPosStrategy, section["cross_pos_strategy"], "cross_pos_strategy"),
        normalize_per_matrix=parse_on_off(section["normalize_per_matrix"]),
    )
    return EngineConfig(
        similarity=similarity,
        heuristic_source=_enum(HeuristicSource, section["heuristics"], "heuristics"),
        doc_ctx_enabled=parse_on_off(section["doc_ctx"]),
        doc_cf_enabled=parse_on_off(section["doc_cf"]),
        pos_of_interest=parse_pos_list(section["pos_of_interest"]),
        doc_ctx_pos=parse_pos_list(section["doc_ctx_pos"]),
    )
