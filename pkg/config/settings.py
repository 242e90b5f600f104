"""
Configuration settings for the Floor Arithmetic and Semilinear Components engine
"""

import os
from fractions import Fraction
from typing import Dict


class Settings:
    """Application settings and configuration"""

    # Application Configuration
    APP_NAME: str = "floorlattice"
    APP_VERSION: str = "1.0.0"
    APP_DESCRIPTION: str = (
        "Exact quantifier elimination for ordered reals with floor, "
        "and components of semilinear sets over the integer lattice"
    )

    # Logging Configuration
    LOG_DIRECTORY: str = "logs"
    LOG_FILENAME: str = "floorlattice.log"
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    CONSOLE_LOG_LEVEL: str = "WARNING"
    TRACE_LOGGER_NAME: str = "qe.trace"
    TRACE_FORMAT: str = "%(message)s"

    # Quantifier Elimination Configuration
    FRESH_PREFIX: str = "_"
    # Upper bound on the congruence period of one integer elimination
    MAX_COOPER_DELTA: int = 100000

    # Geometry Configuration
    MAX_FIBERS: int = 250000
    SAMPLE_STEP: Fraction = Fraction(1, 8)
    DEFAULT_WINDOW: int = 4

    # Export Configuration
    EXPORT_DIRECTORY: str = "exports"
    EXPORT_DATE_FORMAT: str = "%Y%m%d_%H%M%S"

    # Exit codes
    EXIT_OK: int = 0
    EXIT_FALSE: int = 1
    EXIT_USAGE: int = 2
    EXIT_INTERNAL: int = 3

    # Stable-window rules: how many trace points a verification target needs
    # and the construction size that keeps them stable
    STABLE_WINDOWS: Dict[str, str] = {
        'multiples': "N = max * d loops; trace {k*d : 1 <= k <= max}",
        'addition': "N = 2 * max; trace {(a, b, a+b) : a + b <= N}",
        'divisibility': "copies d <= max, loops max*max + 1; trace {(dn+1, d)}",
        'ladder': "loops at every point of A; trace = forward orbit of f(0)",
    }

    @classmethod
    def get_log_path(cls) -> str:
        """Get the full log path"""
        os.makedirs(cls.LOG_DIRECTORY, exist_ok=True)
        return os.path.join(cls.LOG_DIRECTORY, cls.LOG_FILENAME)

    @classmethod
    def get_export_directory(cls) -> str:
        """Get export directory path"""
        os.makedirs(cls.EXPORT_DIRECTORY, exist_ok=True)
        return cls.EXPORT_DIRECTORY


# Global settings instance
settings = Settings()
