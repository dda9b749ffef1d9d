"""
Configuration constants for JetKit
Centralizes engine defaults, exit codes, and environment overrides
"""
import os
from dataclasses import dataclass

# Randomization
DEFAULT_SEED = int(os.getenv("JETKIT_SEED", "0"))

# Rank Computation
MODULAR_PRIME = 2147483647  # 2^31 - 1, keeps int64 products exact
MODULAR_RETRIES = int(os.getenv("JETKIT_MODULAR_RETRIES", "2"))
EXACT_THRESHOLD = int(os.getenv("JETKIT_EXACT_THRESHOLD", "200"))
FORCE_EXACT = os.getenv("JETKIT_EXACT", "false").lower() == "true"

# Formal Theory Bounds
FI_BOUND = 4
ACYCLICITY_BOUND = 3
COMPLETION_MAX_STEPS = 12
RESOLUTION_BUDGET = 8  # highest CC order explored per operator
RESOLUTION_MAX_STEPS = 8  # operators in one resolution
RESOLUTION_LOOKAHEAD = 2  # empty CC orders before a scan gives up
KERNEL_CHECK_LIMIT = 60  # largest kernel frame checked for FI inside a resolution
RESOLUTION_FI_BOUND = 1  # FI depth for kernels checked inside a resolution
LEFT_INVERSE_BUDGET = 6
REGULARITY_RETRIES = 8
REGULARITY_ENTRY_BOUND = 3

# Reports
JSON_SCHEMA_VERSION = "1.0"
LOG_LEVEL = os.getenv("JETKIT_LOG_LEVEL", "INFO")

# Exit Codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_ENGINE = 3
EXIT_CHECK = 4


@dataclass(frozen=True)
class EngineSettings:
    """Knobs every rank computation sees."""
    seed: int = DEFAULT_SEED
    exact: bool = FORCE_EXACT
    retries: int = MODULAR_RETRIES
    exact_threshold: int = EXACT_THRESHOLD
    fi_bound: int = FI_BOUND


def default_settings() -> EngineSettings:
    return EngineSettings(
        seed=DEFAULT_SEED,
        exact=FORCE_EXACT,
        retries=MODULAR_RETRIES,
        exact_threshold=EXACT_THRESHOLD,
        fi_bound=FI_BOUND,
    )
