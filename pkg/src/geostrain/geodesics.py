"""Geodesics of the left-invariant metric on GL+(n).

Every geodesic starting at ``F`` is

    gamma(t) = F exp(t (sym xi - r skew xi)) exp(t (1 + r) skew xi),  r = mu_c / mu,

for some ``xi`` in gl(n). It has constant speed ``||xi||_p``, so its length on
[0, 1] is the weighted norm of ``xi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from ._parallel import pmap
from .errors import ConvergenceError, DomainError
from .linalg import (
    as_matrix,
    inv_small,
    log_branches_2x2,
    mat_exp,
    mat_log_principal,
    require_glp,
    skew,
    sym,
)
from .metric import MetricParams, _norm_sq, weighted_norm


@dataclass(frozen=True)
class GeodesicSpec:
    """Base point ``F``, tangent parameter ``xi`` and metric ``params``."""

    F: np.ndarray
    xi: np.ndarray
    params: MetricParams = field(default_factory=MetricParams)

    def __post_init__(self):
        F = require_glp(self.F)
        xi = as_matrix(self.xi, F.shape[0])
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "xi", xi)

    @property
    def generators(self):
        """The two exponents (per unit time) of the geodesic factors."""
        r = self.params.spin_ratio
        W = skew(self.xi)
        return sym(self.xi) - r * W, (1.0 + r) * W

    @property
    def length(self):
        return weighted_norm(self.params, self.xi)


def geodesic_point(spec: GeodesicSpec, t: float) -> np.ndarray:
    A, B = spec.generators
    return spec.F @ mat_exp(t * A) @ mat_exp(t * B)


def geodesic_velocity(spec: GeodesicSpec, t: float) -> np.ndarray:
    """Analytic time derivative of :func:`geodesic_point`."""
    A, B = spec.generators
    eB = mat_exp(t * B)
    return spec.F @ mat_exp(t * A) @ (A @ eB + eB @ B)


def endpoint_map(spec: GeodesicSpec) -> np.ndarray:
    """gamma(1)."""
    return geodesic_point(spec, 1.0)


def _endpoint(p, F, xi):
    r = p.spin_ratio
    W = skew(xi)
    return F @ mat_exp(sym(xi) - r * W) @ mat_exp((1.0 + r) * W)


# ---------------------------------------------------------------------------
# curve length
# ---------------------------------------------------------------------------

def _fd_velocity(curve, h=1e-3):
    def vel(t):
        return (8.0 * (curve(t + h) - curve(t - h)) - (curve(t + 2 * h) - curve(t - 2 * h))) / (12.0 * h)

    return vel


def _sampled(curve):
    ts, pts = curve
    ts = np.asarray(ts, dtype=float)
    pts = np.asarray(pts, dtype=float)
    if ts.ndim != 1 or len(ts) < 2 or pts.shape[0] != len(ts) or np.any(np.diff(ts) <= 0):
        raise ValueError("sampled curve needs increasing times and one matrix per time")
    for i, G in enumerate(pts):
        require_glp(G, f"sample {i}")
    return ts, pts


def curve_length(p, curve, t0=0.0, t1=1.0, velocity=None):
    """Length of a curve in GL(n) under the metric ``p``.

    Parameters
    ----------
    p : MetricParams
    curve : GeodesicSpec, callable or (times, matrices)
        A geodesic (analytic velocity), a callable ``t -> matrix`` (velocity
        from ``velocity`` or a fourth-order central difference), or samples of
        a piecewise-linear curve. For samples ``t0``/``t1`` are ignored and the
        whole sampled range is used.
    t0, t1 : float
        Integration interval.

    Returns
    -------
    float
        Composite 16-point Gauss-Legendre quadrature of the speed, refined by
        panel doubling until two levels agree to 1e-10 relative.
    """
    if isinstance(curve, GeodesicSpec):
        spec = curve
        pieces = [(t0, t1, lambda t: geodesic_point(spec, t), lambda t: geodesic_velocity(spec, t))]
    elif callable(curve):
        vel = velocity if velocity is not None else _fd_velocity(curve)
        pieces = [(t0, t1, curve, vel)]
    else:
        ts, pts = _sampled(curve)
        pieces = []
        for i in range(len(ts) - 1):
            a, b, Pa = ts[i], ts[i + 1], pts[i]
            V = (pts[i + 1] - Pa) / (b - a)
            pieces.append((a, b, lambda t, Pa=Pa, V=V, a=a: Pa + (t - a) * V, lambda t, V=V: V))

    nodes, weights = np.polynomial.legendre.leggauss(tol.QUAD_ORDER)

    def speed(pos, vel, t):
        G = pos(t)
        return math.sqrt(max(0.0, float(_norm_sq(p, inv_small(G) @ vel(t)))))

    def level(panels):
        total = []
        for a, b, pos, vel in pieces:
            edges = np.linspace(a, b, panels + 1)
            for lo, hi in zip(edges[:-1], edges[1:]):
                half = 0.5 * (hi - lo)
                mid = 0.5 * (hi + lo)
                total.append(half * sum(w * speed(pos, vel, mid + half * x) for x, w in zip(nodes, weights)))
        return math.fsum(total)

    panels = 1
    prev = level(panels)
    while panels * len(pieces) < tol.QUAD_MAX_PANELS:
        panels *= 2
        cur = level(panels)
        if abs(cur - prev) <= tol.QUAD_REL_TOL * abs(cur):
            return cur
        prev = cur
    return prev


# ---------------------------------------------------------------------------
# endpoint equation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EndpointSolveReport:
    xi: np.ndarray
    residual: float
    iterations: int
    converged: bool
    length: float
    start: int = 0


def initial_guess(F, P):
    """Principal log of F^-1 P when it exists, else zero."""
    try:
        return mat_log_principal(np.linalg.solve(F, P))
    except DomainError:
        return np.zeros_like(F)


def solve_endpoint(p, F, P, init=None, tol_rel=tol.ENDPOINT_TOL, max_iter=tol.LM_MAX_ITER):
    """Find ``xi`` with gamma(1) = P for the geodesic starting at ``F``.

    Damped least squares on ``vec(gamma_xi(1) - P)`` with a central
    finite-difference Jacobian. Without ``init`` the starts of
    :func:`start_schedule` are tried in order until one converges.
    Non-convergence is reported through ``converged = False``; the returned
    ``xi`` is a solution, not necessarily the shortest one.
    """
    F = require_glp(F)
    P = require_glp(as_matrix(P, F.shape[0]), "P")
    if init is not None:
        return _levenberg_marquardt(p, F, P, as_matrix(init, F.shape[0]), tol_rel, max_iter)
    best = None
    for i, x0 in enumerate(start_schedule(F, P, _FALLBACK_STARTS)):
        rep = _levenberg_marquardt(p, F, P, x0, tol_rel, max_iter, start=i)
        if rep.converged:
            return rep
        if best is None or rep.residual < best.residual:
            best = rep
    return best


_FALLBACK_STARTS = 8


def _levenberg_marquardt(p, F, P, x0, tol_rel, max_iter, start=0):
    n = F.shape[0]
    m = n * n
    target = tol_rel * max(1.0, float(np.linalg.norm(P)))
    x = np.array(x0, dtype=float).reshape(m)

    def residual(v):
        return (_endpoint(p, F, v.reshape(n, n)) - P).reshape(m)

    r = residual(x)
    cost = float(np.linalg.norm(r))
    lam = tol.LM_DAMPING0
    h = tol.FD_STEP
    it = 0
    eye = np.eye(m)
    history = []
    while it < max_iter and cost > 1e-4 * target:
        it += 1
        history.append(cost)
        # stalled in a residual basin that is not a solution
        if it > 40 and cost > target and history[-20] - cost < 1e-3 * history[-20]:
            break
        Jac = np.empty((m, m))
        for j in range(m):
            e = eye[j] * h
            Jac[:, j] = (residual(x + e) - residual(x - e)) / (2 * h)
        JtJ = Jac.T @ Jac
        D = np.diag(JtJ) + 1e-300
        improved = False
        while lam < 1e16:
            A = np.vstack([Jac, np.diag(np.sqrt(lam * D))])
            step = np.linalg.lstsq(A, np.concatenate([-r, np.zeros(m)]), rcond=None)[0]
            xn = x + step
            try:
                rn = residual(xn)
            except OverflowError:
                lam *= 4.0
                continue
            cn = float(np.linalg.norm(rn))
            if cn < cost:
                x, r, cost = xn, rn, cn
                lam = max(lam / 3.0, 1e-12)
                improved = True
                break
            lam *= 4.0
        if not improved or np.linalg.norm(step) <= 1e-16 * max(1.0, np.linalg.norm(x)):
            break
    xi = x.reshape(n, n)
    return EndpointSolveReport(xi, cost, it, cost <= target, weighted_norm(p, xi), start)


@dataclass(frozen=True)
class DistanceEstimate:
    """Upper estimate of the geodesic distance from a multistart endpoint solve."""

    value: float
    xi: np.ndarray
    reports: list
    pseudometric: bool

    def __float__(self):
        return self.value

    @property
    def candidates(self):
        """Converged solutions ordered by length."""
        return sorted((r for r in self.reports if r.converged), key=lambda r: (r.length, r.start))


def start_schedule(F, P, n_starts, seed=0):
    """Initial guesses for the multistart solver.

    The list for ``n_starts`` is a prefix of the list for ``n_starts + 1``:
    the principal log of ``F^-1 P``, then (n = 2) its branches shifted by
    one full turn either way, then Gaussian perturbations of scale 0.5 drawn from
    ``default_rng([seed, i])``.
    """
    base = initial_guess(F, P)
    starts = [base]
    if F.shape[0] == 2:
        try:
            starts += log_branches_2x2(np.linalg.solve(F, P), k_max=1)[1:]
        except DomainError:
            pass
    i = 0
    while len(starts) < n_starts:
        rng = np.random.default_rng([seed, i])
        starts.append(base + tol.MULTISTART_SCALE * rng.standard_normal(base.shape))
        i += 1
    return starts[:n_starts]


def geodesic_distance_estimate(p, F, P, n_starts=8, seed=0):
    """Shortest converged endpoint solution over a deterministic set of starts.

    This is an upper estimate of dist_geod(F, P). Raises ConvergenceError
    (carrying all reports) if no start converges.
    """
    if n_starts < 1:
        raise ValueError("n_starts must be >= 1")
    F = require_glp(F)
    P = require_glp(as_matrix(P, F.shape[0]), "P")
    starts = start_schedule(F, P, n_starts, seed)

    def run(item):
        i, x0 = item
        return _levenberg_marquardt(p, F, P, x0, tol.ENDPOINT_TOL, tol.LM_MAX_ITER, start=i)

    reports = pmap(run, list(enumerate(starts)), min_items=4)
    ok = [r for r in reports if r.converged]
    if not ok:
        raise ConvergenceError("no start of the endpoint solver converged", reports)
    best = min(ok, key=lambda r: (r.length, r.start))
    return DistanceEstimate(best.length, best.xi, reports, p.pseudometric)

