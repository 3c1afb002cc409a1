"""Strain measures, energies and distances of a deformation gradient to SO(n).

The geodesic distance of ``F`` to SO(n) under any metric of the
:class:`~geostrain.metric.MetricParams` family equals the isotropic Hencky
energy ``mu ||dev log U||^2 + kappa/2 (tr log U)^2``. Besides the closed form,
this module provides a sampled lower bound (minimising the weighted norm of
``Log(Q F)`` over rotations), the upper bound realised by an explicit
geodesic from ``F`` to ``polar(F)``, and a brute-force check of the
Frobenius-norm minimisation behind it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from . import tolerances as tol
from .errors import DomainError
from .geodesics import GeodesicSpec, endpoint_map
from .linalg import (
    _has_nonpositive_real_eigenvalue,
    _log2x2_normal_form,
    _spd_fun,
    as_matrix,
    dev,
    fro_sq,
    log_iss,
    mat_exp,
    mat_log_principal,
    polar_decompose,
    quat_to_rot,
    require_glp,
    rot2,
    rotation_angle,
    sym,
)
from .metric import MetricParams, _norm_sq

STRAIN_KINDS = ("green", "generalized_green", "biot", "hencky", "linearized")


@dataclass(frozen=True)
class StrainMeasure:
    """A strain measure tag; ``m`` is the (nonzero integer) exponent of the generalized Green strain."""

    tag: str
    m: int | None = None

    def __post_init__(self):
        if self.tag not in STRAIN_KINDS:
            raise ValueError(f"unknown strain measure {self.tag!r}")
        if self.tag == "generalized_green":
            if self.m is None or int(self.m) != self.m or self.m == 0:
                raise ValueError("generalized_green needs a nonzero integer m")


def stretch_tensor(F):
    """Right Biot stretch U = sqrt(F^T F)."""
    F = require_glp(F)
    return _spd_fun(F.T @ F, np.sqrt)


def log_stretch(F):
    """log U, evaluated as log(F^T F) / 2."""
    F = require_glp(F)
    return 0.5 * _spd_fun(F.T @ F, np.log)


def strain_tensor(kind, arg, m=None):
    """Evaluate a strain measure.

    ``arg`` is the deformation gradient ``F`` for the nonlinear measures and
    the displacement gradient for ``"linearized"``.
    """
    if not isinstance(kind, StrainMeasure):
        kind = StrainMeasure(kind, m)
    X = as_matrix(arg)
    n = X.shape[0]
    if kind.tag == "linearized":
        return sym(X)
    if kind.tag == "hencky":
        return log_stretch(X)
    require_glp(X)
    C = X.T @ X
    if kind.tag == "green":
        return 0.5 * (C - np.eye(n))
    if kind.tag == "generalized_green":
        return (_spd_fun(C, lambda w: w ** (0.5 * kind.m)) - np.eye(n)) / kind.m
    return _spd_fun(C, np.sqrt) - np.eye(n)


def dist_euclid_sq_to_SO(F):
    """min over Q in SO(n) of ||F - Q||^2, which equals ||U - 1||^2."""
    U = stretch_tensor(F)
    return float(fro_sq(U - np.eye(U.shape[0])))


def dist_euclid_sq_to_so(grad_u):
    """min over skew W of ||grad_u - W||^2, which equals ||sym grad_u||^2."""
    return float(fro_sq(sym(as_matrix(grad_u))))


@dataclass(frozen=True)
class HenckyTerms:
    deviatoric: float  # ||dev log U||^2
    trace_log_u: float
    log_det_f: float


def hencky_terms(F):
    """The ingredients of the Hencky energy, with the trace identity checked."""
    F = require_glp(F)
    L = log_stretch(F)
    tr = float(np.trace(L))
    sign, logdet = np.linalg.slogdet(F)
    if abs(tr * tr - logdet * logdet) > tol.IDENTITY_TOL * max(1.0, logdet * logdet):
        raise ArithmeticError("tr(log U) and log det F disagree")
    return HenckyTerms(float(fro_sq(dev(L))), tr, float(logdet))


def hencky_energy(mu, kappa, F):
    """mu ||dev log U||^2 + kappa/2 (tr log U)^2."""
    t = hencky_terms(F)
    return mu * t.deviatoric + 0.5 * kappa * t.trace_log_u**2


def biot_energy_density(mu, kappa, F):
    """mu ||dev(U - 1)||^2 + kappa/2 (tr(U - 1))^2."""
    U = stretch_tensor(F)
    B = U - np.eye(U.shape[0])
    return float(mu * fro_sq(dev(B)) + 0.5 * kappa * np.trace(B) ** 2)


# ---------------------------------------------------------------------------
# distances to SO(n)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DistanceResult:
    """A (squared) distance value with the metadata needed to interpret it.

    ``rotation`` is the attained or nearest rotation, ``skipped`` counts scan
    samples without a real logarithm, and ``mu_c_used`` is False when the
    value does not depend on the spin modulus.
    """

    value: float
    pseudometric: bool
    rotation: np.ndarray | None = None
    samples: int = 0
    skipped: int = 0
    mu_c_used: bool = True

    def __float__(self):
        return self.value


def geodesic_dist_sq_to_SO(p: MetricParams, F) -> DistanceResult:
    """Squared geodesic distance of F to SO(n): the Hencky energy of F.

    ``p.mu_c`` is accepted but does not enter the value.
    """
    F = require_glp(F)
    value = hencky_energy(p.mu, p.kappa, F)
    return DistanceResult(value, p.pseudometric, polar_decompose(F).R, mu_c_used=False)


def upper_bound_via_polar_geodesic(p: MetricParams, F) -> DistanceResult:
    """Squared length of the geodesic ``t -> F exp(-t log U)`` from F to polar(F)."""
    F = require_glp(F)
    R = polar_decompose(F).R
    L = log_stretch(F)
    end = endpoint_map(GeodesicSpec(F, -L, p))
    if np.linalg.norm(end - R) > tol.IDENTITY_TOL * max(1.0, np.linalg.norm(R)):
        raise ArithmeticError("polar geodesic misses polar(F)")
    value = float(_norm_sq(p, L))
    closed = geodesic_dist_sq_to_SO(p, F).value
    if abs(value - closed) > 1e-12 * max(1.0, closed):
        raise ArithmeticError("polar geodesic length differs from the closed form")
    return DistanceResult(value, p.pseudometric, R, mu_c_used=False)


# ---------------------------------------------------------------------------
# rotation scans
# ---------------------------------------------------------------------------

def _min_over_branches_2x2(M, norm_sq, k_max):
    """Smallest norm over the enumerated real logs of each matrix in a stack."""
    principal, ok, (log_r, theta, K, has_rot) = _log2x2_normal_form(M)
    best = np.where(ok, norm_sq(principal), np.inf)
    eye = np.eye(2)
    for k in range(-k_max, k_max + 1):
        X = log_r[..., None, None] * eye + (theta + 2 * np.pi * k)[..., None, None] * K
        best = np.where(has_rot, np.minimum(best, norm_sq(X)), best)
    return best


def _scan_so2(F, norm_sq, n_samples, k_max):
    thetas = -np.pi + 2 * np.pi * np.arange(n_samples) / n_samples
    vals = _min_over_branches_2x2(rot2(thetas) @ F, norm_sq, k_max)
    skipped = int(np.sum(~np.isfinite(vals)))
    if skipped == n_samples:
        raise DomainError("no sampled rotation gives a real logarithm")
    i = int(np.argmin(vals))

    def f(th):
        return float(_min_over_branches_2x2(rot2(th) @ F, norm_sq, k_max))

    step = 2 * np.pi / n_samples
    res = minimize_scalar(f, bounds=(thetas[i] - 2 * step, thetas[i] + 2 * step),
                          method="bounded", options={"xatol": 1e-12})
    theta, value = thetas[i], float(vals[i])
    if res.fun < value:
        theta, value = float(res.x), float(res.fun)
    return value, rot2(theta), skipped


def _hat(w):
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def _descend_so3(f, Q, max_iter=tol.SO3_DESCENT_MAX_ITER, h=1e-6):
    """Gradient descent on SO(3) along left-translated geodesics ``exp(-a g^) Q``.

    Barzilai-Borwein trial steps, Armijo backtracking.
    """
    fQ = f(Q)
    basis = np.eye(3)
    alpha = 0.1
    g_prev = s_prev = None
    flat = 0
    for _ in range(max_iter):
        g = np.array([
            (f(mat_exp(_hat(h * e)) @ Q) - f(mat_exp(_hat(-h * e)) @ Q)) / (2 * h) for e in basis
        ])
        gg = float(g @ g)
        if not math.isfinite(gg) or gg < 1e-22:
            break
        if s_prev is not None:
            y = g - g_prev
            sy = float(s_prev @ y)
            if sy > 0:
                alpha = float(s_prev @ s_prev) / sy
        while alpha > 1e-14:
            Qn = mat_exp(_hat(-alpha * g)) @ Q
            fn = f(Qn)
            if fn <= fQ - 1e-4 * alpha * gg:
                break
            alpha *= 0.5
        else:
            break
        s_prev, g_prev = -alpha * g, g
        flat = flat + 1 if fQ - fn <= 1e-15 * max(1.0, abs(fQ)) else 0
        Q, fQ = Qn, fn
        if flat >= 3:
            break
    return Q, fQ


def _scan_so3(F, norm_sq, n_samples, seed):
    rng = np.random.default_rng(seed)
    Qs = quat_to_rot(rng.standard_normal((n_samples, 4)))
    M = Qs @ F
    bad = _has_nonpositive_real_eigenvalue(M)
    skipped = int(np.sum(bad))
    if skipped == n_samples:
        raise DomainError("no sampled rotation gives a real logarithm")
    vals = np.full(n_samples, np.inf)
    with np.errstate(all="ignore"):
        vals[~bad] = norm_sq(log_iss(M[~bad]))
    vals[~np.isfinite(vals)] = np.inf
    i = int(np.argmin(vals))

    def f(Q):
        try:
            return float(norm_sq(mat_log_principal(Q @ F)))
        except DomainError:
            return math.inf

    Q, value = _descend_so3(f, Qs[i])
    return value, Q, skipped


def _scan(F, norm_sq, n_samples, seed, k_max):
    if F.shape[0] == 2:
        return _scan_so2(F, norm_sq, n_samples, k_max)
    return _scan_so3(F, norm_sq, n_samples, seed)


def lower_bound_scan(p: MetricParams, F, n_samples=10_000, seed=0, k_max=tol.DEFAULT_K_MAX) -> DistanceResult:
    """Sampled minimum over rotations Q of ||Log(Q F)||_p^2.

    At n = 2 the rotations are a uniform angle grid and every real log branch
    with ``|k| <= k_max`` is considered, followed by a bounded 1-D refinement.
    At n = 3, ``n_samples`` seeded uniform rotations are evaluated with the
    principal log and the best one is refined by descent on SO(3). Samples
    without a real logarithm are skipped and counted.
    """
    F = require_glp(F)
    value, Q, skipped = _scan(F, lambda X: _norm_sq(p, X), n_samples, seed, k_max)
    return DistanceResult(value, p.pseudometric, Q, n_samples, skipped)


@dataclass(frozen=True)
class Theorem1Report:
    """Outcome of the Frobenius-norm rotation search for one F.

    ``gap = min_value - closed_form`` should be non-negative up to rounding,
    and ``angle_error`` is the angle between ``q_best`` and ``polar(F)^T``.
    """

    q_best: np.ndarray
    min_value: float
    closed_form: float
    gap: float
    samples: int
    skipped: int
    angle_error: float


def verify_theorem1(F, n_samples=10_000, seed=0, k_max=tol.DEFAULT_K_MAX) -> Theorem1Report:
    """Minimise ||Log(Q F)||^2 (Frobenius) over rotations and compare to ||log U||^2."""
    F = require_glp(F)
    value, Q, skipped = _scan(F, fro_sq, n_samples, seed, k_max)
    closed = float(fro_sq(log_stretch(F)))
    R = polar_decompose(F).R
    return Theorem1Report(Q, value, closed, value - closed, n_samples, skipped, rotation_angle(Q, R.T))
