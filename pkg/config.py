import os


VERSION = "0.1.0"

# Paths
ROOT = os.path.abspath(os.path.dirname(__file__))

# Environment (the only two knobs read from the environment)
SEED = int(os.environ.get("GW_SEED", "0"))
THREADS = max(1, int(os.environ.get("GW_THREADS", "1")))

# Special functions
POLYLOG_REL_TOL = 1e-13  # Li_n, n >= 2, closed unit disk
ZETA_REL_TOL = 1e-14
WORK_DPS = 30  # mpmath working precision for tails, polylogs and PSLQ
UNIT_DISK_SLACK = 1e-12  # |x| may exceed 1 by this much before a domain error

# Summation
SUM_CHUNK = 1024  # fixed chunking of prefix sums; keeps results independent of N layout

# Geometry / Monte Carlo
COINCIDENCE_EPS = 1e-9  # Euclidean distance
MC_BATCHES = 64  # at least 16 for the stderr contract
MC_CHUNK = 16384  # samples per vectorised block
MC_UNIFORM_SHARE = 0.25  # mixture weight of the uniform disk in the importance proposal; 1.0 is plain uniform
ORIENTATION = -1  # calibrated on the one-vertex Bernoulli graph, B_1(x) = x - 1/2

# Series engine
G_NORMALIZATION = 4  # rational representative of G(U, V); see DESIGN.md

# Fitting
FIT_TOL = 1e-8
FIT_MAX_DEN = 10**5
FIT_MAX_COEFF = 10**6
FIT_MAX_STEPS = 10**4
FIT_FLOAT_TOL = 1e-13  # PSLQ acceptance when an input only carries double precision
