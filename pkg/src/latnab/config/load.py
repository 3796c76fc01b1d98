import yaml

from pathlib import Path
from typing import Any

from latnab.config.classes import (
    Config, LoggingConfig, PerformanceConfig, QuotientConfig, IsometryConfig, CensusConfig,
    DesignConfig, ReproduceConfig, GeneralConfig,
)
from latnab.config.misc import parse_count
from latnab.errors import InvalidValueError
from latnab.config.policy import IsometryPolicy

def _load_config(config_path: str|Path) -> dict[str, Any]:
    with open(config_path, 'r', encoding='utf-8') as file:
        data = yaml.safe_load(file)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise InvalidValueError(f"Configuration file {config_path} must contain a mapping.")
    return data

def _read_path(path: str) -> Path:
    if path.startswith('~'):
        return Path(path).expanduser()
    return Path(path)

def _positive(value: Any, key: str) -> int:
    value = int(value)
    if value < 1:
        raise InvalidValueError(f"{key} must be at least 1, got {value}.")
    return value

def config_from_dict(config_dict: dict[str, Any]) -> Config:
    defaults = Config()

    logging_cfg = config_dict.get('logging') or {}
    logging_pth = logging_cfg.get('file', None)
    logging = LoggingConfig(
        str(logging_cfg.get('level', defaults.logging.level)).upper(),
        _read_path(logging_pth) if logging_pth is not None else None,
    )

    performance_cfg = config_dict.get('performance') or {}
    workers = performance_cfg.get('workers', defaults.performance.workers)
    if workers not in ('thread', 'process'):
        raise InvalidValueError(f"performance.workers must be 'thread' or 'process', got {workers!r}.")
    performance = PerformanceConfig(
        _positive(performance_cfg.get('threads', defaults.performance.threads), 'performance.threads'),
        workers,
        parse_count(performance_cfg.get('vector_budget', defaults.performance.vector_budget)),
        parse_count(performance_cfg.get('pairwise_budget', defaults.performance.pairwise_budget)),
    )

    quotient_cfg = config_dict.get('quotient') or {}
    quotient = QuotientConfig(
        parse_count(quotient_cfg.get('max_order', defaults.quotient.max_order)),
    )

    isometry_cfg = config_dict.get('isometry') or {}
    isometry = IsometryConfig(
        int(isometry_cfg.get('theta_bound', defaults.isometry.theta_bound)),
        int(isometry_cfg.get('strict_max_dim', defaults.isometry.strict_max_dim)),
        IsometryPolicy(isometry_cfg.get('policy', defaults.isometry.policy.value)),
    )

    census_cfg = config_dict.get('census') or {}
    census = CensusConfig(
        int(census_cfg.get('theta_bound', defaults.census.theta_bound)),
    )

    design_cfg = config_dict.get('design') or {}
    design = DesignConfig(
        _positive(design_cfg.get('t_cap', defaults.design.t_cap), 'design.t_cap'),
        bool(design_cfg.get('tensor_fallback', defaults.design.tensor_fallback)),
        parse_count(design_cfg.get('tensor_budget', defaults.design.tensor_budget)),
    )

    reproduce_cfg = config_dict.get('reproduce') or {}
    reproduce = ReproduceConfig(
        int(reproduce_cfg.get('theta_max_norm', defaults.reproduce.theta_max_norm)),
        int(reproduce_cfg.get('fast_theta_max_norm_dim16', defaults.reproduce.fast_theta_max_norm_dim16)),
        parse_count(reproduce_cfg.get('fast_design_budget', defaults.reproduce.fast_design_budget)),
    )

    general_cfg = config_dict.get('general') or {}
    cache_path = general_cfg.get('cache_file', None)
    general = GeneralConfig(
        _read_path(cache_path) if cache_path is not None else None,
    )

    return Config(logging, performance, quotient, isometry, census, design, reproduce, general)

def load_config(config_path: str|Path) -> Config:
    try:
        return config_from_dict(_load_config(config_path))
    except InvalidValueError:
        raise
    except (OSError, yaml.YAMLError, TypeError, ValueError) as e:
        raise InvalidValueError(f"Cannot load configuration {config_path}: {e}") from e
