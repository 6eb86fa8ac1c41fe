"""Memoisation of expensive mass evaluations.

Quadrature and Monte Carlo masses are pure functions of their serialised
inputs, so a result can be reused whenever the same request comes back
(the identity panel asks for the same profile points many times).
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from typing import Any, Callable, Dict, TypeVar

from lelong.config import Config

logger = logging.getLogger(__name__)

T = TypeVar("T")


class ComputationCache:
    """Thread-safe in-memory cache keyed by a hash of the request parameters."""

    def __init__(self, max_size: int = 4096) -> None:
        """Initialize the cache.

        Args:
            max_size: Maximum number of cache entries
        """
        self.max_size = max_size
        self.cache: Dict[str, Any] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _make_key(self, namespace: str, params: Dict[str, Any]) -> str:
        # Sort params for consistent hashing
        sorted_params = json.dumps(params, sort_keys=True, default=str)
        key_string = f"{namespace}:{sorted_params}"
        return hashlib.md5(key_string.encode()).hexdigest()

    def get(self, namespace: str, params: Dict[str, Any]) -> tuple[bool, Any]:
        """Look up a cached value.

        Returns:
            (found, value); value is None when not found
        """
        key = self._make_key(namespace, params)
        with self._lock:
            if key in self.cache:
                self.hits += 1
                return True, self.cache[key]
            self.misses += 1
            return False, None

    def set(self, namespace: str, params: Dict[str, Any], value: Any) -> None:
        """Store a value, evicting the oldest entry when full."""
        key = self._make_key(namespace, params)
        with self._lock:
            if len(self.cache) >= self.max_size and key not in self.cache:
                # dicts keep insertion order
                oldest_key = next(iter(self.cache))
                del self.cache[oldest_key]
                logger.debug(f"Cache full, evicted {oldest_key}")
            self.cache[key] = value

    def clear(self) -> None:
        """Clear all cache entries."""
        with self._lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self.cache)


_cache = ComputationCache(max_size=Config.CACHE_MAX_SIZE)


def get_cache() -> ComputationCache:
    """Get the global computation cache instance."""
    return _cache


def cached_computation(
    namespace: str,
    params: Dict[str, Any],
    compute: Callable[[], T],
) -> T:
    """Return a memoised result, computing and storing it on a miss.

    Args:
        namespace: Kind of computation (e.g. "quad_mass", "mc_integral")
        params: JSON-serialisable description of every input the result depends on
        compute: Function producing the result

    Returns:
        The cached or freshly computed result
    """
    if not Config.ENABLE_CACHING:
        return compute()

    cache = get_cache()
    found, value = cache.get(namespace, params)
    if found:
        return value

    # Two threads may compute the same entry; both results are identical
    value = compute()
    cache.set(namespace, params, value)
    return value
