from .classes import Config, LoggingConfig, PerformanceConfig, QuotientConfig, IsometryConfig, CensusConfig, DesignConfig, ReproduceConfig, GeneralConfig
from .load import load_config, config_from_dict
from .policy import IsometryPolicy
from .misc import parse_count, human_count, parse_rational

__all__ = [
    'Config', 'LoggingConfig', 'PerformanceConfig', 'QuotientConfig', 'IsometryConfig', 'CensusConfig',
    'DesignConfig', 'ReproduceConfig', 'GeneralConfig', 'load_config', 'config_from_dict',
    'IsometryPolicy', 'parse_count', 'human_count', 'parse_rational',
]
