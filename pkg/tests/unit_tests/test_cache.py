"""Unit tests for the computation cache."""

from unittest.mock import MagicMock, patch

from lelong.cache import ComputationCache, cached_computation, get_cache


class TestComputationCache:
    """Test ComputationCache."""

    def test_get_missing(self):
        cache = ComputationCache()
        assert cache.get("quad_nu", {"rt": 0.1}) == (False, None)
        assert cache.misses == 1

    def test_set_then_get(self):
        cache = ComputationCache()
        cache.set("quad_nu", {"rt": 0.1, "k": 2}, (1.5, 1e-12))
        assert cache.get("quad_nu", {"k": 2, "rt": 0.1}) == (True, (1.5, 1e-12))
        assert cache.hits == 1

    def test_namespaces_are_separate(self):
        cache = ComputationCache()
        cache.set("quad_nu", {"rt": 0.1}, 1.0)
        assert cache.get("quad_nu_ddc", {"rt": 0.1})[0] is False

    def test_oldest_entry_evicted(self):
        cache = ComputationCache(max_size=2)
        for i in range(3):
            cache.set("mc_integral", {"seed": i}, i)
        assert len(cache) == 2
        assert cache.get("mc_integral", {"seed": 0})[0] is False
        assert cache.get("mc_integral", {"seed": 2}) == (True, 2)

    def test_clear(self):
        cache = ComputationCache()
        cache.set("quad_nu", {"rt": 0.1}, 1.0)
        cache.clear()
        assert len(cache) == 0 and cache.hits == 0


class TestCachedComputation:
    """Test cached_computation."""

    def test_computes_once(self):
        compute = MagicMock(return_value=3.0)
        assert cached_computation("quad_alpha", {"rt1": 0.1}, compute) == 3.0
        assert cached_computation("quad_alpha", {"rt1": 0.1}, compute) == 3.0
        compute.assert_called_once()
        assert len(get_cache()) == 1

    def test_disabled_caching(self):
        compute = MagicMock(return_value=3.0)
        with patch("lelong.cache.Config.ENABLE_CACHING", False):
            cached_computation("quad_alpha", {"rt1": 0.1}, compute)
            cached_computation("quad_alpha", {"rt1": 0.1}, compute)
        assert compute.call_count == 2
        assert len(get_cache()) == 0
