"""
Geodesics of the left-invariant metric
======================================

Geodesics through F are F exp(t(sym xi - r skew xi)) exp(t(1 + r) skew xi)
with r = mu_c / mu. They have constant speed, so their length is the
weighted norm of the initial tangent.
"""

import numpy as np

from geostrain import MetricParams
from geostrain.geodesics import (
    GeodesicSpec,
    curve_length,
    endpoint_map,
    geodesic_distance_estimate,
    solve_endpoint,
)

p = MetricParams(mu=1.0, mu_c=4.0, kappa=2.0)
F = np.diag([1.5, 0.8])
xi = np.array([[0.2, -0.6], [0.4, 0.1]])
spec = GeodesicSpec(F, xi, p)

P = endpoint_map(spec)
print("endpoint\n", P)
print("length by quadrature", curve_length(p, spec), " tangent norm", spec.length)

# recover a tangent from the two endpoints
rep = solve_endpoint(p, F, P)
print("solver converged:", rep.converged, "residual", rep.residual)
print("recovered xi\n", rep.xi)

# several starts give an upper estimate of the distance
est = geodesic_distance_estimate(p, F, P, n_starts=6)
print("distance estimate", est.value)
print("candidate lengths", [round(r.length, 12) for r in est.candidates])
