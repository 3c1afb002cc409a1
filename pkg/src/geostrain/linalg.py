"""Small dense matrix kernel for real 2x2 and 3x3 matrices.

Matrices are plain ``numpy`` arrays of shape ``(n, n)`` with ``n`` in
``{2, 3}``. Where noted, functions also accept stacks of shape
``(..., n, n)``; those are used internally by the rotation scans.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import tolerances as tol
from .errors import DimensionError, DomainError

DIMENSIONS = (2, 3)

#: planar generator [[0, -1], [1, 0]]
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def as_matrix(X, n=None):
    """Return ``X`` as a finite float array of shape (n, n), n in {2, 3}."""
    A = np.array(X, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] not in DIMENSIONS:
        raise DimensionError(f"expected a 2x2 or 3x3 matrix, got shape {A.shape}")
    if n is not None and A.shape[0] != n:
        raise DimensionError(f"expected a {n}x{n} matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    return A


def same_dim(X, Y):
    X = as_matrix(X)
    Y = as_matrix(Y, X.shape[0])
    return X, Y


def is_rotation(Q, atol=tol.ORTHOGONALITY_TOL):
    Q = np.asarray(Q, dtype=float)
    n = Q.shape[-1]
    return bool(np.linalg.norm(Q.T @ Q - np.eye(n)) <= atol and np.linalg.det(Q) > 0)


def as_rotation(Q):
    """Validate ``Q`` as an element of SO(n) and return it as an array."""
    Q = as_matrix(Q)
    if not is_rotation(Q):
        raise DomainError("matrix is not a rotation (Q^T Q != 1 or det Q <= 0)")
    return Q


def as_spd(S):
    """Validate ``S`` as symmetric positive definite and return it."""
    S = as_matrix(S)
    if np.linalg.norm(S - S.T) > tol.SYMMETRY_TOL * max(1.0, np.linalg.norm(S)):
        raise DomainError("matrix is not symmetric")
    if np.linalg.eigvalsh(sym(S))[0] <= 0:
        raise DomainError("matrix is not positive definite")
    return S


def require_glp(F, name="F"):
    F = as_matrix(F)
    if np.linalg.det(F) <= 0:
        raise DomainError(f"{name} is not in GL+(n): det {name} <= 0")
    return F


# ---------------------------------------------------------------------------
# parts and inner products (stack-aware)
# ---------------------------------------------------------------------------

def _T(X):
    return np.swapaxes(X, -1, -2)


def trace(X):
    return np.trace(X, axis1=-2, axis2=-1)


def sym(X):
    return 0.5 * (X + _T(X))


def skew(X):
    return 0.5 * (X - _T(X))


def dev(X):
    n = X.shape[-1]
    return X - (trace(X) / n)[..., None, None] * np.eye(n)


def orthogonal_parts(X):
    """Split ``X`` into Frobenius-orthogonal parts.

    Returns
    -------
    devsym, skw, sph
        ``dev(sym X)``, ``skew X`` and ``(tr X / n) * 1``; they sum to ``X``.
    """
    X = as_matrix(X)
    n = X.shape[0]
    sph = np.trace(X) / n * np.eye(n)
    skw = skew(X)
    devsym = sym(X) - sph
    return devsym, skw, sph


def frobenius_inner(X, Y):
    """tr(X^T Y)."""
    X, Y = same_dim(X, Y)
    return float(np.sum(X * Y))


def fro_sq(X):
    return np.sum(X * X, axis=(-2, -1))


# ---------------------------------------------------------------------------
# inverse
# ---------------------------------------------------------------------------

def inv_small(H):
    """Inverse by the adjugate formula; accepts stacks.

    Raises DomainError when ``|det H| <= 1e-14 * ||H||^n``.
    """
    H = np.asarray(H, dtype=float)
    n = H.shape[-1]
    if n == 2:
        a, b = H[..., 0, 0], H[..., 0, 1]
        c, d = H[..., 1, 0], H[..., 1, 1]
        det = a * d - b * c
        adj = np.stack([np.stack([d, -b], -1), np.stack([-c, a], -1)], -2)
    elif n == 3:
        r0, r1, r2 = H[..., 0, :], H[..., 1, :], H[..., 2, :]
        c0, c1, c2 = np.cross(r1, r2), np.cross(r2, r0), np.cross(r0, r1)
        det = np.sum(r0 * c0, axis=-1)
        adj = np.stack([c0, c1, c2], -1)
    else:
        raise DimensionError(f"unsupported dimension {n}")
    scale = np.sqrt(fro_sq(H)) ** n
    if np.any(np.abs(det) <= tol.INVERSE_DET_TOL * scale):
        raise DomainError("matrix is singular to working precision")
    return adj / det[..., None, None]


# ---------------------------------------------------------------------------
# exponential
# ---------------------------------------------------------------------------

_PADE_DEGREE = 13
_THETA_13 = 5.371920351148152


@lru_cache(maxsize=None)
def _pade_coefficients(m):
    f = math.factorial
    return tuple(
        f(2 * m - j) * f(m) / (f(2 * m) * f(j) * f(m - j)) for j in range(m + 1)
    )


def mat_exp(X):
    """Matrix exponential by scaling and squaring with a [13/13] Pade approximant.

    Accepts a single matrix or a stack. Raises ``OverflowError`` when the
    result is not representable.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[-1]
    norm1 = np.max(np.sum(np.abs(X), axis=-2), axis=-1)
    norm1 = float(np.max(norm1)) if np.ndim(norm1) else float(norm1)
    if not math.isfinite(norm1):
        raise ValueError("matrix has non-finite entries")
    s = max(0, math.ceil(math.log2(norm1 / _THETA_13))) if norm1 > _THETA_13 else 0
    Xs = X / 2.0**s
    c = _pade_coefficients(_PADE_DEGREE)
    eye = np.broadcast_to(np.eye(n), X.shape)
    even = c[0] * eye
    odd = np.zeros_like(X)
    P = eye
    for j in range(1, _PADE_DEGREE + 1):
        P = P @ Xs
        if j % 2:
            odd = odd + c[j] * P
        else:
            even = even + c[j] * P
    with np.errstate(over="ignore", invalid="ignore"):
        E = np.linalg.solve(even - odd, even + odd)
        for _ in range(s):
            E = E @ E
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflows")
    return E


# ---------------------------------------------------------------------------
# SPD functions
# ---------------------------------------------------------------------------

def _spd_fun(S, fun):
    w, V = np.linalg.eigh(sym(S))
    return sym((V * fun(w)[..., None, :]) @ _T(V))


def mat_sqrt_spd(S):
    """Symmetric positive definite square root of ``S``."""
    S = as_spd(S)
    return _spd_fun(S, np.sqrt)


def mat_power_spd(S, m):
    S = as_spd(S)
    return _spd_fun(S, lambda w: w**m)


def mat_log_spd(S):
    S = as_spd(S)
    return _spd_fun(S, np.log)


# ---------------------------------------------------------------------------
# principal logarithm
# ---------------------------------------------------------------------------

def _log2x2_normal_form(A):
    """Closed-form 2x2 logarithm data for a stack of matrices.

    With ``a = tr A / 2`` and ``B = A - a 1`` (so that ``B^2 = disc 1``) every
    real logarithm of ``A`` is ``c0 * 1 + c1 * B`` (principal) or, when the
    eigenvalues are complex, ``log r * 1 + (theta + 2 pi k) * K`` with
    ``K = B / omega`` satisfying ``K^2 = -1``.

    Returns ``(principal, ok, rot)`` where ``ok`` marks matrices with a real
    principal log and ``rot`` is ``(log_r, theta, K, has_rot)`` for the
    angle-shifted family.
    """
    A = np.asarray(A, dtype=float)
    eye = np.eye(2)
    a = 0.5 * (A[..., 0, 0] + A[..., 1, 1])
    det = A[..., 0, 0] * A[..., 1, 1] - A[..., 0, 1] * A[..., 1, 0]
    h = 0.5 * (A[..., 0, 0] - A[..., 1, 1])
    disc = h * h + A[..., 0, 1] * A[..., 1, 0]
    B = A - a[..., None, None] * eye
    pos_det = det > 0

    with np.errstate(divide="ignore", invalid="ignore"):
        log_r = 0.5 * np.log(np.where(pos_det, det, 1.0))
        delta = np.sqrt(np.abs(disc))
        # disc > 0: real distinct eigenvalues a +/- delta
        c_real = np.where(delta > 0, np.arctanh(delta / np.abs(a)) / delta, 1.0 / np.abs(a))
        # disc < 0: complex pair r e^{+/- i theta}
        theta = np.arctan2(delta, a)
        c_cplx = np.where(delta > 0, theta / delta, 0.0)

    complex_pair = pos_det & (disc < 0)
    real_pos = pos_det & (disc >= 0) & (a > 0)
    coef = np.where(complex_pair, c_cplx, np.where(real_pos, c_real, np.nan))
    ok = complex_pair | real_pos
    principal = log_r[..., None, None] * eye + coef[..., None, None] * B

    # angle-shifted family; the exactly scalar case uses the planar generator
    scalar = pos_det & (np.max(np.abs(B), axis=(-2, -1)) == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        K = np.where(complex_pair[..., None, None], B / np.where(delta > 0, delta, 1.0)[..., None, None], J2)
    theta = np.where(scalar, np.where(a > 0, 0.0, np.pi), theta)
    has_rot = complex_pair | scalar
    return principal, ok, (log_r, theta, K, has_rot)


def _has_nonpositive_real_eigenvalue(A):
    ev = np.linalg.eigvals(A)
    return np.any((ev.imag == 0) & (ev.real <= 0), axis=-1)


_GL_NODES = 10


@lru_cache(maxsize=None)
def _gauss_legendre01(m):
    x, w = np.polynomial.legendre.leggauss(m)
    return (x + 1) / 2, w / 2


def _sqrtm_db(X, max_iter=100):
    """Principal square root by the product form of the Denman-Beavers iteration."""
    n = X.shape[-1]
    eye = np.eye(n)
    M = X.copy()
    Y = X.copy()
    for _ in range(max_iter):
        Minv = np.linalg.inv(M)
        Y = 0.5 * Y @ (eye + Minv)
        M = 0.5 * (eye + 0.5 * (M + Minv))
        if np.max(np.abs(M - eye)) <= 4 * np.finfo(float).eps:
            break
    return Y


def log_iss(A):
    """Principal log by inverse scaling and squaring (real arithmetic, stack-aware).

    The caller is responsible for the domain check.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[-1]
    eye = np.eye(n)
    X = A
    s = 0
    while np.max(np.sum(np.abs(X - eye), axis=-2)) > 0.25 and s < 64:
        X = _sqrtm_db(X)
        s += 1
    D = X - eye
    t, w = _gauss_legendre01(_GL_NODES)
    L = np.zeros_like(D)
    for tj, wj in zip(t, w):
        L = L + wj * np.linalg.solve(eye + tj * D, D)
    return 2.0**s * L


def mat_log_principal(A):
    """Principal real matrix logarithm.

    Raises
    ------
    DomainError
        If ``A`` is singular or has an eigenvalue on the closed negative
        real axis.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if n == 2:
        principal, ok, _ = _log2x2_normal_form(A)
        if not ok:
            raise DomainError("no real principal logarithm: eigenvalue on (-inf, 0]")
        return principal
    if _has_nonpositive_real_eigenvalue(A):
        raise DomainError("no real principal logarithm: eigenvalue on (-inf, 0]")
    if np.array_equal(A, A.T):
        return _spd_fun(A, np.log)
    return log_iss(A)


def log_branches_2x2(A, k_max=tol.DEFAULT_K_MAX):
    """Real logarithms of a 2x2 matrix obtained by shifting the rotation angle.

    The principal logarithm (when it exists) comes first, followed by the
    branches ``k = 1, -1, 2, -2, ...`` up to ``|k| <= k_max``. Matrices with
    distinct real positive eigenvalues (or a positive Jordan block) have the
    principal log only; those with distinct negative eigenvalues have none.
    """
    A = as_matrix(A)
    if A.shape[0] != 2:
        raise DimensionError("log branch enumeration is only available for n = 2")
    if np.linalg.det(A) <= 0:
        raise DomainError("det A <= 0")
    principal, ok, (log_r, theta, K, has_rot) = _log2x2_normal_form(A)
    if not has_rot:
        return [principal] if ok else []
    ks = [0]
    for k in range(1, k_max + 1):
        ks += [k, -k]
    out = [log_r * np.eye(2) + (theta + 2 * np.pi * k) * K for k in ks]
    if ok:
        out[0] = principal
    return out


# ---------------------------------------------------------------------------
# polar decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PolarFactors:
    """F = R U with R a rotation and U symmetric positive definite."""

    R: np.ndarray
    U: np.ndarray
    iterations: int = 0
    method: str = "newton"
    cond: float = 1.0
    ill_conditioned: bool = False


def _polar_newton(F):
    X = F
    fro = np.linalg.norm
    scaled = True
    for k in range(1, tol.POLAR_NEWTON_MAX_ITER + 1):
        Xinv_T = np.linalg.inv(X).T
        zeta = math.sqrt(fro(Xinv_T) / fro(X)) if scaled else 1.0
        Xn = 0.5 * (zeta * X + Xinv_T / zeta)
        diff = fro(Xn - X)
        X = Xn
        if diff <= tol.POLAR_NEWTON_TOL * fro(X):
            return X, k
        if diff <= 1e-2 * fro(X):
            scaled = False
    return None, tol.POLAR_NEWTON_MAX_ITER


def polar_decompose(F):
    """Polar decomposition F = R U of a matrix with positive determinant.

    Uses the scaled Newton iteration ``X <- (zeta X + X^-T / zeta) / 2`` and
    falls back to an eigendecomposition of ``F^T F`` if it stalls.
    """
    F = require_glp(F)
    R, iters = _polar_newton(F)
    method = "newton"
    if R is not None:
        U = sym(R.T @ F)
    else:
        method = "eigh"
        U = _spd_fun(F.T @ F, np.sqrt)
        R = F @ np.linalg.inv(U)
    w = np.linalg.eigvalsh(U)
    if w[0] <= 0:
        raise DomainError("polar factor U is not positive definite")
    cond = float(w[-1] / w[0])
    R = as_rotation(R)
    if np.linalg.norm(R @ U - F) > tol.POLAR_RESIDUAL_TOL * max(1.0, np.linalg.norm(F)):
        raise ArithmeticError("polar decomposition residual above tolerance")
    return PolarFactors(R, U, iters, method, cond, cond > tol.POLAR_COND_WARN)


def polar(F):
    """Orthogonal polar factor R = polar(F)."""
    return polar_decompose(F).R


# ---------------------------------------------------------------------------
# rotations, angles and random generators
# ---------------------------------------------------------------------------

def rot2(theta):
    """Planar rotation by ``theta`` (stack-aware in ``theta``)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def quat_to_rot(q):
    """Rotation matrices from (not necessarily unit) quaternions ``(w, x, y, z)``."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    w, x, y, z = np.moveaxis(q, -1, 0)
    return np.stack([
        np.stack([1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)], -1),
        np.stack([2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)], -1),
        np.stack([2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)], -1),
    ], -2)


def rotation_angle(Q1, Q2):
    """Angle of the relative rotation Q1^T Q2 (n = 2 or 3)."""
    d = np.linalg.norm(np.asarray(Q1) - np.asarray(Q2))
    return 2.0 * math.asin(min(1.0, d / (2.0 * math.sqrt(2.0))))


def _rng(seed):
    return np.random.default_rng(seed)


def random_rotation(n, seed=None):
    """Haar-distributed rotation in SO(n); ``seed`` may be an int or a Generator."""
    if n not in DIMENSIONS:
        raise DimensionError(f"unsupported dimension {n}")
    rng = _rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_glp(n, seed=None, cond_max=100.0):
    """Random matrix with det > 0 and 2-norm condition number <= ``cond_max``."""
    if cond_max < 1:
        raise ValueError("cond_max must be >= 1")
    rng = _rng(seed)
    Q1 = random_rotation(n, rng)
    Q2 = random_rotation(n, rng)
    half = 0.5 * math.log(cond_max)
    sigma = np.exp(rng.uniform(-half, half, size=n))
    return (Q1 * sigma) @ Q2
