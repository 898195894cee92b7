"""
Settings
========
Runtime configuration.

- Values come from CHERNLOC_* environment variables, optionally through a .env file
- CLI flags override individual values per run (see chernloc.cli)
"""

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()

PACKAGE_ROOT = Path(__file__).resolve().parent.parent


class Settings(BaseSettings):
    """
    Numeric tolerances, sampling seeds and service options.
    """

    model_config = SettingsConfigDict(env_prefix="CHERNLOC_", extra="ignore")

    quadrature_tol: float = Field(default=1e-9, description="Absolute tolerance of adaptive quadrature per simplex")
    acceptance_tol: float = Field(default=1e-6, description="Tolerance of reported pass/fail checks")
    seed: int = Field(default=0x5EED, description="Seed of every deterministic sampler")
    gauss_order: int = Field(default=8, description="Gauss-Legendre order per cube cell")
    fibre_gauss_order: int = Field(default=16, description="Gauss-Legendre order of the fibre integration")
    fibre_rule: str = Field(default="gauss", description="'gauss' or 'exact' fibre integration rule")
    max_cells: int = Field(default=2 ** 16, description="Adaptive subdivision budget per simplex")
    sample_count: int = Field(default=20, description="Points used by sampled compatibility checks")
    locus_grid: int = Field(default=41, description="Grid side for the singular-locus search")
    locus_search_radius: float = Field(default=1.5, description="Half-width of the singular-locus search box")
    link_segments: int = Field(default=16, description="Default number of segments of link and disk chains")
    workers: int = Field(default=1, description="Thread workers for per-simplex integration")
    log_level: str = Field(default="WARNING", description="Level of the chernloc logger")
    scenes_dir: Path = Field(default=PACKAGE_ROOT / "scenes", description="Where bare scene names are resolved")


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """
    Return the process-wide settings instance.
    """
    return Settings()
