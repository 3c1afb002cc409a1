"""Isotropic inner product on gl(n) and the induced left-invariant metric on GL(n)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, dev, fro_sq, inv_small, same_dim, skew, sym, trace


@dataclass(frozen=True)
class MetricParams:
    """Shear modulus ``mu``, spin modulus ``mu_c`` and bulk modulus ``kappa``.

    ``mu_c = 0`` is admitted; the resulting form is only positive
    semi-definite and :attr:`pseudometric` is set.
    """

    mu: float = 1.0
    mu_c: float = 1.0
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("mu", "mu_c", "kappa"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, float(v))
        if self.mu <= 0 or self.kappa <= 0:
            raise ValueError("mu and kappa must be positive")
        if self.mu_c < 0:
            raise ValueError("mu_c must be non-negative")

    @property
    def pseudometric(self):
        return self.mu_c == 0

    @property
    def spin_ratio(self):
        """mu_c / mu, the skew weight in the geodesic family."""
        return self.mu_c / self.mu

    @classmethod
    def frobenius(cls, n):
        """Parameters for which the weighted norm is the Frobenius norm."""
        return cls(1.0, 1.0, 2.0 / n)

    def as_dict(self):
        return {"mu": self.mu, "mu_c": self.mu_c, "kappa": self.kappa}


def _norm_sq(p, X):
    # stack-aware kernel
    return p.mu * fro_sq(dev(sym(X))) + p.mu_c * fro_sq(skew(X)) + 0.5 * p.kappa * trace(X) ** 2


def weighted_inner(p, X, Y):
    """mu <dev sym X, dev sym Y> + mu_c <skew X, skew Y> + (kappa/2) tr X tr Y."""
    X, Y = same_dim(X, Y)
    return float(
        p.mu * np.sum(dev(sym(X)) * dev(sym(Y)))
        + p.mu_c * np.sum(skew(X) * skew(Y))
        + 0.5 * p.kappa * np.trace(X) * np.trace(Y)
    )


def weighted_norm_sq(p, X):
    return float(_norm_sq(p, as_matrix(X)))


def weighted_norm(p, X):
    return math.sqrt(weighted_norm_sq(p, X))


def riemannian_metric_at(p, H, X, Y):
    """g_H(X, Y) = <H^-1 X, H^-1 Y>."""
    H = as_matrix(H)
    X, Y = same_dim(X, Y)
    Hinv = inv_small(as_matrix(H, X.shape[0]))
    return weighted_inner(p, Hinv @ X, Hinv @ Y)
