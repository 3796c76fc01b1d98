from pathlib import Path
from typing import NamedTuple, Literal

from latnab.config.misc import human_count
from latnab.config.policy import IsometryPolicy

class LoggingConfig(NamedTuple):
    level: str = "WARNING"
    file: Path | None = None

class PerformanceConfig(NamedTuple):
    threads: int = 1
    workers: Literal["thread", "process"] = "thread"
    vector_budget: int = 2_000_000 # Vectors kept in memory per enumeration
    pairwise_budget: int = 100_000 # Largest shell for the pairwise design method

    def __repr__(self) -> str:
        return (f"PerformanceConfig(threads={self.threads}, workers={self.workers}, "
                f"vector_budget={human_count(self.vector_budget)}, pairwise_budget={human_count(self.pairwise_budget)})")

class QuotientConfig(NamedTuple):
    max_order: int = 4096

class IsometryConfig(NamedTuple):
    theta_bound: int = 6
    strict_max_dim: int = 8
    policy: IsometryPolicy = IsometryPolicy.AUTO

class CensusConfig(NamedTuple):
    theta_bound: int = 3

class DesignConfig(NamedTuple):
    t_cap: int = 11
    tensor_fallback: bool = True
    tensor_budget: int = 500_000

class ReproduceConfig(NamedTuple):
    theta_max_norm: int = 12
    fast_theta_max_norm_dim16: int = 6
    fast_design_budget: int = 100_000

class GeneralConfig(NamedTuple):
    cache_file: Path | None = None

class Config(NamedTuple):
    logging: LoggingConfig = LoggingConfig()
    performance: PerformanceConfig = PerformanceConfig()
    quotient: QuotientConfig = QuotientConfig()
    isometry: IsometryConfig = IsometryConfig()
    census: CensusConfig = CensusConfig()
    design: DesignConfig = DesignConfig()
    reproduce: ReproduceConfig = ReproduceConfig()
    general: GeneralConfig = GeneralConfig()
