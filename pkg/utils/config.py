"""
config.py
---------
Single source of truth for all paths, physical constants, and evaluation
defaults. All other modules import from here; never hardcode them elsewhere.

A `.env` file in the repo root is picked up automatically. To send flow
outputs somewhere else on a specific machine, set for example:
    THZFEC_RESULTS_ROOT=/data/thz_runs
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# ---------------------------------------------------------------------------
# Root directories
# ---------------------------------------------------------------------------

# The repo itself (one level up from this file: utils/../)
REPO_ROOT = Path(__file__).resolve().parent.parent

load_dotenv(REPO_ROOT / ".env")

# Where flow outputs live, override via env var if needed
RESULTS_ROOT = Path(os.environ.get("THZFEC_RESULTS_ROOT", REPO_ROOT / "results"))

CSV_DIR     = RESULTS_ROOT / "csv"
LOG_DIR     = RESULTS_ROOT / "logs"
REPORT_DIR  = RESULTS_ROOT / "reports"

# ---------------------------------------------------------------------------
# Physical constants
# ---------------------------------------------------------------------------

SPEED_OF_LIGHT = 299_792_458.0      # m/s
BOLTZMANN      = 1.380649e-23       # J/K

# ---------------------------------------------------------------------------
# Link budget (IEEE 802.15.3d evaluation setup)
# ---------------------------------------------------------------------------

TOTAL_TX_POWER_DBM          = -8.0
ANTENNA_GAIN_DBI            = 26.4    # both at transmitter and receiver
NOISE_TEMPERATURE_K         = 290.0
NOISE_FIGURE_DB             = 10.0
ATMOSPHERIC_LOSS_DB_PER_M   = 0.0     # not simulated at these distances
ROLL_OFF                    = 0.4

# Nyquist bandwidth per 802.15.3d channel width (Hz)
NYQUIST_BW_HZ = {
    2.16e9:  880e6,
    8.64e9:  3520e6,
    10.80e9: 4400e6,
}

# ---------------------------------------------------------------------------
# Distance sweep grid (metres)
# ---------------------------------------------------------------------------

SWEEP_D_MIN  = 0.5
SWEEP_D_MAX  = 20.0
SWEEP_D_STEP = 0.5

# The auxiliary channel is expected to be error-free where it is used
AUX_BER_WARNING = 1e-12

# ---------------------------------------------------------------------------
# Codec defaults
# ---------------------------------------------------------------------------

# Primitive polynomials (bitmask incl. the x^s term) for GF(2^s)
DEFAULT_PRIMITIVE_POLYS = {
    2:  0x7,
    3:  0xB,
    4:  0x13,
    5:  0x25,
    6:  0x43,
    7:  0x89,
    8:  0x11D,
    9:  0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

RS_FIRST_ROOT       = 1       # generator roots alpha^1 .. alpha^r
MDPC_MAX_ITER       = 20
MDPC_M_CAP          = 1024    # the fault-tolerance bound is unbounded when the main BER is 0
MDPC_ORACLE_MAX_BITS = 16     # exhaustive enumeration limit (2^16 patterns)

# ---------------------------------------------------------------------------
# Monte-Carlo campaigns
# ---------------------------------------------------------------------------

MC_WORKERS       = int(os.environ.get("THZFEC_MC_WORKERS", 4))
# Changing the chunk size changes the per-chunk random streams
MC_CHUNK_BLOCKS  = int(os.environ.get("THZFEC_MC_CHUNK_BLOCKS", 4096))
# Upper bound on block bits per chunk; long codes get fewer blocks per chunk
MC_CHUNK_BITS    = int(os.environ.get("THZFEC_MC_CHUNK_BITS", 1 << 22))
MC_DEFAULT_SEED  = 1

# ---------------------------------------------------------------------------
# Helper: ensure all runtime directories exist
# ---------------------------------------------------------------------------

def ensure_dirs():
    """Call once at startup to create all required directories."""
    for d in [RESULTS_ROOT, CSV_DIR, LOG_DIR, REPORT_DIR]:
        d.mkdir(parents=True, exist_ok=True)
