import functools
import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@functools.lru_cache(maxsize=None)
def saps_of_length(n):
    from sapforge.enumerate import iter_saps

    return tuple(iter_saps(n))


@functools.lru_cache(maxsize=None)
def saps_up_to(n):
    return tuple(p for k in range(4, n + 1, 2) for p in saps_of_length(k))
