"""Numerical tolerances used throughout the package.

All thresholds live here so that tests, the CLI echo record and the library
agree on a single table.
"""

# construction invariants (RotationMatrix, SpdMatrix)
ORTHOGONALITY_TOL = 1e-10
SYMMETRY_TOL = 1e-10

# round trips, relative
ROUND_TRIP_TOL = 1e-11
POLAR_RESIDUAL_TOL = 1e-11

# matrix kernel
INVERSE_DET_TOL = 1e-14
POLAR_NEWTON_TOL = 1e-14
POLAR_NEWTON_MAX_ITER = 100
POLAR_COND_WARN = 1e8
LOG_BRANCH_TOL = 1e-9
DEFAULT_K_MAX = 3

# geodesics
FD_STEP = 1e-6
LM_DAMPING0 = 1e-3
LM_MAX_ITER = 500
ENDPOINT_TOL = 1e-9
QUAD_ORDER = 16
QUAD_REL_TOL = 1e-10
QUAD_MAX_PANELS = 2**14
MULTISTART_SCALE = 0.5

# strain
IDENTITY_TOL = 1e-10
SCAN_GAP_TOL = 1e-6
SO3_DESCENT_MAX_ITER = 200


def as_dict():
    """Return the table as a plain dict (for machine-readable echo records)."""
    return {k: v for k, v in globals().items() if k.isupper()}
