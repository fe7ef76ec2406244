"""Constants for cavity-decay."""

import os

# Special functions
MAX_ORDER = int(os.getenv("CAVITY_DECAY_MAX_ORDER", 64))
MAX_ABS_ARGUMENT = 1.0e4
MAX_ABS_IMAG_ARGUMENT = 700.0

# Green-tensor series
SERIES_EXTRA_ORDERS = 20
SERIES_TOLERANCE = 1.0e-12

# Dielectric diagnostics
EPS_VACUUM_CUTOFF = 1.0e-8
STATIC_PROBE_FRACTION = 1.0e-9
STATIC_EPS_LIMIT = 10.0
KK_MIN_NODES = 64
KK_RECOMMENDED_NODES = 1000

# Validity thresholds on the size parameter z = omega R / c
MARKOV_WARN_Z = 0.5
MARKOV_FAIL_Z = 1.0
EXPANSION_MAX_Z = 0.5
SMALL_ARGUMENT_LIMIT = 0.1

# Constants for plotting
PLOT_WIDTH = int(os.getenv("CAVITY_DECAY_PLOT_WIDTH", 8))
PLOT_HEIGHT = int(os.getenv("CAVITY_DECAY_PLOT_HEIGHT", 6))
PLOT_FIGURE_SIZE = (PLOT_WIDTH, PLOT_HEIGHT)
PLOT_DPI = int(os.getenv("CAVITY_DECAY_PLOT_DPI", 100))
