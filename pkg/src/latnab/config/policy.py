from enum import Enum

class IsometryPolicy(Enum):
    FAST = "fast"
    AUTO = "auto"
    STRICT = "strict"

    def resolve(self, dim: int, strict_max_dim: int) -> 'IsometryPolicy':
        # auto is strict in small dimension, fast above
        if self is not IsometryPolicy.AUTO:
            return self
        return IsometryPolicy.STRICT if dim <= strict_max_dim else IsometryPolicy.FAST
