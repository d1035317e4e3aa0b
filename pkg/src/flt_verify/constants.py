"""
Constants shared by the verification modules
"""

from fractions import Fraction

# Output schema for scan records and CLI JSON
SCHEMA_VERSION = 1

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CROSS_CHECK = 2
EXIT_RESOURCE = 3

# Precision policy for rigorous reals
DEFAULT_PRECISION_BITS = 256
MAX_PRECISION_BITS = 4096
MIN_PRECISION_BITS = 32

# Integer kernels
TRIAL_DIVISION_BOUND = 10_000
DEFAULT_RHO_STEP_CAP = 1 << 22
# Miller-Rabin with these witnesses is exact below this bound
MR_DETERMINISTIC_BOUND = 341_550_071_728_321
MR_DETERMINISTIC_WITNESSES = (2, 3, 5, 7, 11, 13, 17)
MR_PROBABILISTIC_ROUNDS = 64

# Performance envelopes
MAX_FORM_DISCRIMINANT = 10**7
MAX_RESIDUE_RING_SIZE = 1 << 16

# Square-unit criterion works modulo 16P
COMPCRIT_MODULUS_FACTOR = 16

# S-unit search: default filter on the prime l
ELL_MODULUS = 24
ELL_RESIDUE = 1
EXCEPTIONAL_ELL = 73

# Pell unit tau = 3 + 2*sqrt(2) and the linear form data
TAU = (3, 2)
BW_N = 2
BW_D = 2
BRUTE_FORCE_K_MAX = 1000
REDUCED_BOUND_CEILING = 100
CONVERGENT_SEARCH_TERMS = 60
# 0-based index of the convergent quoted as the 30th one
QUOTED_CONVERGENT_INDEX = 29
QUOTED_CONVERGENT = (1815871259660093, 357018312787640)

# Thresholds asserted by the linear-forms pipeline
C_LOWER_CHECK = Fraction(132 * 10**8)
C_UPPER_CHECK = Fraction(133 * 10**8)
A_UPPER_CHECK = Fraction(136 * 10**8)
B_UPPER_CHECK = Fraction(755 * 10**7)
K_MAX_UPPER_CHECK = Fraction(38 * 10**10)

# Discriminant lower bound for totally real fields: base**n * exp(-offset)
ODLYZKO_BASE = Fraction(29009, 1000)
ODLYZKO_OFFSET = Fraction(83185, 10000)

# Newton polygon shift search for the f_n family
SHIFT_WINDOW = 4
MAX_SHIFT_WINDOW = 16
FAMILY_MAX_N = 32
