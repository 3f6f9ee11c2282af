"""Constants for fairpool defaults and limits."""

from fractions import Fraction

# Reward defaults
DEFAULT_BLOCK_REWARD = Fraction(1)
DEFAULT_FEE = Fraction(0)

# Epsilon tables
DEFAULT_EPSILON_N_MAX = 64

# Axiom search budget
DEFAULT_N_MAX = 6
DEFAULT_MAX_ROUNDS = 3
DEFAULT_TRIALS = 500
DEFAULT_SEED = 0
DEFAULT_TOLERANCE = 1e-6
SLUSH_INTERNAL_TOLERANCE = 1e-9

# Time-shift probes, as fractions of the open neighbour interval
SHIFT_FRACTIONS = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))

# Random history times: gaps are multiples of this step
RANDOM_TIME_STEP = Fraction(1, 4)
RANDOM_MAX_GAP_STEPS = 8

# Random history shapes are drawn without regard to the budget, then filtered
RANDOM_MAX_SHARES = 8
RANDOM_MAX_ROUNDS = 4

# Scheme defaults
SLUSH_DEFAULT_LAMBDA = 1200.0
PPS_DEFAULT_DIFFICULTY = 3
TABLE_PPLNS_N = 3
TABLE_GEOMETRIC_R = Fraction(2)
TABLE_IC_D = 3
SCHEME2_LAMBDA_SHARE = Fraction(1, 2)
SCHEME6_THRESHOLD = Fraction(1, 2)

# Simulator
DEFAULT_SIM_P = 0.1
DEFAULT_SIM_ROUNDS = 200
DEFAULT_SIM_MAX_ROUND_LENGTH = 64

# Environment
SEED_ENV_VAR = "FAIRPOOL_SEED"

# CLI exit codes
EXIT_OK = 0
EXIT_AXIOM_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_VALIDATION = 4

# Rendering
DECIMAL_DIGITS = 12
