"""
Configuration settings for bjortho.
Uses pydantic-settings to load from environment variables and .env file.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical settings loaded from environment variables."""

    model_config = SettingsConfigDict(
        env_file=".env.local",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Project metadata
    PROJECT_NAME: str = "bjortho"
    REPORT_SCHEMA_VERSION: str = "1"

    # ==========================================================================
    # Spaces
    # ==========================================================================

    # Coordinates below this fraction of ||x||_inf count as zero (L1/Linf formulas)
    ZERO_COORD_RTOL: float = 1e-12

    # L1 support functionals: 2^z sign completions, capped
    L1_SUPPORT_CAP: int = 1024

    # Linf vertex enumeration limit (sign vectors)
    MAX_SIGN_DIM: int = 20

    # Vertices are added to sampled candidate pools up to this dimension
    VERTEX_POOL_MAX_DIM: int = 12

    # ==========================================================================
    # Semi-inner products
    # ==========================================================================

    # Derivative sign tests on unit-normalized x
    DERIV_TOL: float = 1e-9

    # Relaxed membership: grid size and tolerance on the quadratic margin
    EPS_GRID_POINTS: int = 4096
    EPS_MARGIN_TOL: float = 1e-12

    # ==========================================================================
    # Operators
    # ==========================================================================

    SAMPLING_SEED: int = 0
    NORM_SAMPLE_BUDGET: int = 8192
    REFINE_KEEP: int = 32
    REFINE_STEPS: int = 200
    REFINE_INITIAL_STEP: float = 0.25

    # Attainment sets
    ATTAINMENT_TOL: float = 1e-6  # relative to ||T||
    ATTAINMENT_BUDGET: int = 8192
    SINGULAR_GROUP_RTOL: float = 1e-6

    # Component graph: radius = clamp(factor * median NN distance, floor, cap)
    LINK_FACTOR: float = 2.5
    LINK_FLOOR: float = 0.15
    LINK_CAP: float = 0.5

    # Half-point cap before the neighbour graph is built
    GRAPH_MAX_POINTS: int = 1024

    # Subspace-sphere test
    SUBSPACE_RANK_RTOL: float = 1e-2
    SUBSPACE_VALUE_RTOL: float = 1e-4
    SUBSPACE_PROBES: int = 256

    # ==========================================================================
    # Orthogonality
    # ==========================================================================

    BJ_OP_TOL: float = 1e-7  # relative to ||A||
    WITNESS_TOL: float = 1e-6
    SUP_PAIRS: int = 8192
    SUP_KEEP: int = 32
    RETRIEVAL_TOL: float = 2e-3
    FUNCTIONAL_TOL: float = 1e-3
    DEFAULT_EPS: float = 0.1

    # ==========================================================================
    # Approximation
    # ==========================================================================

    LINE_XATOL: float = 1e-10
    DESCENT_RTOL: float = 1e-8
    DESCENT_CYCLE_TOL: float = 1e-10
    DESCENT_MAX_CYCLES: int = 200
    HYPOTHESIS_GRID_POINTS: int = 21
    HYPOTHESIS_GRID_HALF_WIDTH: float = 2.0

    # ==========================================================================
    # Harness
    # ==========================================================================

    SEED: int = 0
    SUITE_TRIALS: int = 50
    SUITE_WORKERS: int = 4
    SUITE_DIMS: str = "2,3,4"
    SUITE_EPS_VALUES: str = "0.1,0.5"
    SIP_SUITE_NORMS: str = "lp:1,lp:2,lp:3,linf"

    def get_dims(self) -> list[int]:
        """Parse comma-separated dimensions into a list."""
        return [int(d.strip()) for d in self.SUITE_DIMS.split(",") if d.strip()]

    def get_eps_values(self) -> list[float]:
        """Parse comma-separated epsilon values into a list."""
        return [float(e.strip()) for e in self.SUITE_EPS_VALUES.split(",") if e.strip()]

    def get_sip_norms(self) -> list[str]:
        """Parse comma-separated norm descriptors into a list."""
        return [n.strip() for n in self.SIP_SUITE_NORMS.split(",") if n.strip()]


settings = Settings()
