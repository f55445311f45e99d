import logging
from collections import OrderedDict
from typing import Any, Callable, Hashable, Optional


class SeriesCache:
    """Keyed memo for expanded exponential series.

    Entries never expire; an optional ``max_entries`` evicts the least recently
    used key.
    """

    def __init__(self, max_entries: Optional[int] = None):
        self.logger = logging.getLogger(__name__)
        self.cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self.max_entries = max_entries
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Any:
        if key in self.cache:
            self.hits += 1
            self.cache.move_to_end(key)
            return self.cache[key]
        self.misses += 1
        return None

    def set(self, key: Hashable, value: Any):
        self.cache[key] = value
        self.cache.move_to_end(key)
        if self.max_entries is not None and len(self.cache) > self.max_entries:
            evicted, _ = self.cache.popitem(last=False)
            self.logger.debug(f"Evicted series cache entry {evicted!r}")

    def get_or_compute(self, key: Hashable, factory: Callable[[], Any]) -> Any:
        value = self.get(key)
        if value is None:
            self.logger.debug(f"Series cache miss for {key!r}")
            value = factory()
            self.set(key, value)
        return value

    def __len__(self) -> int:
        return len(self.cache)
