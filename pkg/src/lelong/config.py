"""Configuration for lelong."""

import os

from dotenv import load_dotenv

# Load environment variables
load_dotenv()


def _optional_int(name: str) -> int | None:
    value = os.getenv(name)
    return int(value) if value else None


class Config:
    """Numerical settings shared by every engine and the CLI."""

    # Quadrature
    # LELONG_MAX_EVALS caps the integrand evaluations of one adaptive quadrature
    MAX_EVALS: int = int(os.getenv("LELONG_MAX_EVALS", "200000"))
    QUAD_ABS_TOL: float = float(os.getenv("LELONG_QUAD_ABS_TOL", "1e-10"))
    QUAD_REL_TOL: float = float(os.getenv("LELONG_QUAD_REL_TOL", "1e-12"))

    # Plurisubharmonicity check on a geometric grid in (R*1e-6, R]
    TOL_PSH: float = float(os.getenv("LELONG_TOL_PSH", "1e-12"))
    PSH_GRID_POINTS: int = int(os.getenv("LELONG_PSH_GRID_POINTS", "512"))

    # Identity tolerances
    TOL_DETERMINISTIC: float = float(os.getenv("LELONG_TOL_DETERMINISTIC", "1e-9"))
    TOL_LIMIT: float = float(os.getenv("LELONG_TOL_LIMIT", "1e-5"))
    MC_SIGMAS: float = float(os.getenv("LELONG_MC_SIGMAS", "3.0"))

    # Limit extrapolation and condition (C)
    FIT_REL_TOL: float = float(os.getenv("LELONG_FIT_REL_TOL", "1e-4"))
    # Log-type rates are only asymptotic, so divergence is reported on a looser fit
    DIVERGENT_FIT_REL_TOL: float = float(os.getenv("LELONG_DIVERGENT_FIT_REL_TOL", "1e-3"))
    SLOPE_WINDOW: float = float(os.getenv("LELONG_SLOPE_WINDOW", "0.01"))
    # Slopes of log-type rates decay like 1/|log t|, so the probe sits far below 1
    SLOPE_T_FLOOR: float = float(os.getenv("LELONG_SLOPE_T_FLOOR", "1e-40"))

    # Weights: B_phi(R) must stay inside the ball shrunk by this factor
    R_FACTOR: float = float(os.getenv("LELONG_R_FACTOR", "0.99"))

    # Monte Carlo
    MC_SAMPLES: int = int(os.getenv("LELONG_MC_SAMPLES", "1000000"))
    MC_PARTITIONS: int = int(os.getenv("LELONG_MC_PARTITIONS", "8"))
    MC_MIN_SAMPLES: int = 100
    MC_VARIANCE_GROWTH: float = float(os.getenv("LELONG_MC_VARIANCE_GROWTH", "4.0"))

    # Caching
    # Enable/disable memoisation of quadrature and Monte Carlo masses (default: True)
    ENABLE_CACHING: bool = os.getenv("LELONG_ENABLE_CACHING", "true").lower() == "true"
    CACHE_MAX_SIZE: int = int(os.getenv("LELONG_CACHE_MAX_SIZE", "4096"))

    # Graph Execution
    # Maximum number of concurrent panel nodes (None lets LangGraph decide)
    MAX_CONCURRENCY: int | None = _optional_int("LELONG_MAX_CONCURRENCY")

    LOG_LEVEL: str = os.getenv("LELONG_LOG_LEVEL", "WARNING").upper()

    @classmethod
    def quad_limit(cls, max_evals: int | None = None) -> int:
        """Convert an evaluation budget into a subinterval limit for QUADPACK.

        Each subinterval of the adaptive Gauss-Kronrod rule costs 21 integrand
        evaluations (30 on an infinite range, which the caller accounts for).
        """
        budget = cls.MAX_EVALS if max_evals is None else max_evals
        return max(1, budget // 21)

    @classmethod
    def validate(cls) -> list[str]:
        """Validate configuration and return a list of problems."""
        problems = []
        for name in ("QUAD_ABS_TOL", "TOL_PSH", "TOL_DETERMINISTIC", "TOL_LIMIT", "FIT_REL_TOL", "DIVERGENT_FIT_REL_TOL"):
            if getattr(cls, name) <= 0:
                problems.append(f"{name} must be positive")
        if cls.MAX_EVALS < 21:
            problems.append("MAX_EVALS must allow at least one 21-point Kronrod step")
        if not 0 < cls.R_FACTOR < 1:
            problems.append("R_FACTOR must lie in (0, 1)")
        if cls.MC_PARTITIONS < 1:
            problems.append("MC_PARTITIONS must be at least 1")
        if cls.PSH_GRID_POINTS < 2:
            problems.append("PSH_GRID_POINTS must be at least 2")
        return problems
