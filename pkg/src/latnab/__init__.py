__version__ = "0.1.0"

from latnab.latnab import run

__all__ = ["__version__", "run"]
