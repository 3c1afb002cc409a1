"""Riemannian strain measures: geodesics on GL+(n) and distances to SO(n)."""

__version__ = "0.1.0"

from .errors import ConvergenceError, DimensionError, DomainError
from .field import (
    EnergyReport,
    FieldData,
    FieldRecord,
    parse_field,
    rigid_field,
    total_energy,
    write_field,
)
from .geodesics import (
    DistanceEstimate,
    EndpointSolveReport,
    GeodesicSpec,
    curve_length,
    endpoint_map,
    geodesic_distance_estimate,
    geodesic_point,
    geodesic_velocity,
    solve_endpoint,
)
from .linalg import (
    PolarFactors,
    as_rotation,
    as_spd,
    frobenius_inner,
    log_branches_2x2,
    mat_exp,
    mat_log_principal,
    mat_sqrt_spd,
    orthogonal_parts,
    polar,
    polar_decompose,
    random_glp,
    random_rotation,
)
from .metric import (
    MetricParams,
    riemannian_metric_at,
    weighted_inner,
    weighted_norm,
    weighted_norm_sq,
)
from .strain import (
    DistanceResult,
    StrainMeasure,
    Theorem1Report,
    biot_energy_density,
    dist_euclid_sq_to_SO,
    dist_euclid_sq_to_so,
    geodesic_dist_sq_to_SO,
    hencky_energy,
    hencky_terms,
    lower_bound_scan,
    strain_tensor,
    stretch_tensor,
    upper_bound_via_polar_geodesic,
    verify_theorem1,
)
