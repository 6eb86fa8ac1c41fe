"""Quick script to print and validate the numerical configuration."""

from lelong.config import Config

print("=" * 60)
print("Configuration Check")
print("=" * 60)

print(f"MAX_EVALS: {Config.MAX_EVALS} (QUADPACK limit {Config.quad_limit()})")
print(f"QUAD_ABS_TOL / QUAD_REL_TOL: {Config.QUAD_ABS_TOL:g} / {Config.QUAD_REL_TOL:g}")
print(f"TOL_DETERMINISTIC: {Config.TOL_DETERMINISTIC:g}")
print(f"TOL_LIMIT: {Config.TOL_LIMIT:g}")
print(f"MC_SAMPLES: {Config.MC_SAMPLES} in {Config.MC_PARTITIONS} partitions, {Config.MC_SIGMAS:g} sigmas")
print(f"R_FACTOR: {Config.R_FACTOR:g}")
print(f"ENABLE_CACHING: {Config.ENABLE_CACHING} (max {Config.CACHE_MAX_SIZE} entries)")
if Config.MAX_CONCURRENCY is None:
    print("ℹ️  MAX_CONCURRENCY: Not set (LangGraph default)")
else:
    print(f"MAX_CONCURRENCY: {Config.MAX_CONCURRENCY}")

print("\n" + "=" * 60)
problems = Config.validate()
if problems:
    print("❌ Invalid configuration:")
    for problem in problems:
        print(f"  {problem}")
else:
    print("✅ Configuration is valid!")
print("=" * 60)
