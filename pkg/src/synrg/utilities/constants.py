from typing import Final

# Bound schedule
DEFAULT_B_START: Final = 2
DEFAULT_B_MAX: Final = 8
DEFAULT_B_STEP: Final = 1

# Budgets, in seconds
FAST_SYNTH_TIMEOUT: Final = 2.0
TEMPLATE_SYNTH_TIMEOUT: Final = 60.0
VERIFY_TIMEOUT: Final = 30.0
TOTAL_TIMEOUT: Final = 300.0

# Synthesis-based generalization limits
GENERALIZATION_CANDIDATE_CAP: Final = 10_000
GENERALIZATION_SIZE_CAP: Final = 12

# Internal enumerator
ENUMERATION_WINDOW: Final = (-3, 3)
ENUMERATION_SIZE_CAP: Final = 15
ENUMERATION_CANDIDATE_CAP: Final = 2_000_000
FINITE_CHECK_CEILING: Final = 250_000
GENERALIZATION_SAMPLES: Final = 64
COUNTEREXAMPLE_SAMPLES: Final = 5_000
SAMPLE_SEED: Final = 20_240_101

# Names with this prefix are minted by synrg and never accepted from input
FRESH_PREFIX: Final = "z!"
OUTPUT_PREFIX: Final = "o!"

SMT_LOGIC: Final = "AUFLIA"
DEFAULT_SYGUS_LOGIC: Final = "ALL"

# Environment variables
ENV_SYNTH_SOLVER: Final = "SYNRG_SYNTH_SOLVER"
ENV_SMT_SOLVER: Final = "SYNRG_SMT_SOLVER"
ENV_LOG_LEVEL: Final = "SYNRG_LOG_LEVEL"

SYNTH_SOLVER_MISSING = "SyGuS solver executable could not be started"
SMT_SOLVER_MISSING = "SMT solver executable could not be started"
