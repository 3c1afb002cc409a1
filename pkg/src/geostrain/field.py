"""Discretised deformation-gradient fields and their energy functionals.

A field is a list of quadrature cells. The CSV exchange format has the header
``x,y[,z],weight,F11,F12,...,Fnn`` (row-major gradient). For the
``linearized`` model the gradient columns hold the displacement gradient.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from ._parallel import pmap
from .errors import DimensionError, DomainError
from .linalg import as_rotation, as_matrix
from .strain import biot_energy_density, dist_euclid_sq_to_SO, dist_euclid_sq_to_so, hencky_energy

FIELD_MODELS = ("hencky", "biot", "euclid_so", "linearized")
_POSITION_NAMES = ("x", "y", "z")


@dataclass(frozen=True)
class FieldRecord:
    position: np.ndarray
    weight: float
    F: np.ndarray
    line: int | None = None


@dataclass
class FieldData:
    """Parsed records plus ``(line, message)`` pairs for rejected rows."""

    records: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    n: int | None = None

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)


def field_header(n):
    pos = list(_POSITION_NAMES[:n])
    return pos + ["weight"] + [f"F{i}{j}" for i in range(1, n + 1) for j in range(1, n + 1)]


def parse_field(stream, linearized=False):
    """Read a CSV field.

    Malformed rows (wrong length, unparsable or non-finite numbers, negative
    weight, det F <= 0 unless ``linearized``) are recorded in
    ``FieldData.errors`` with their line number and skipped; parsing
    continues. A bad header raises ``ValueError``.
    """
    reader = csv.reader(stream)
    header = None
    out = FieldData()
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        if header is None:
            header = [c.strip() for c in row]
            for n in (2, 3):
                if header == field_header(n):
                    out.n = n
                    break
            else:
                raise ValueError(f"bad field header {header!r}; expected {field_header(2)} or {field_header(3)}")
            continue
        line = reader.line_num
        n = out.n
        if len(row) != len(header):
            out.errors.append((line, f"expected {len(header)} columns, got {len(row)}"))
            continue
        try:
            vals = [float(c) for c in row]
        except ValueError as exc:
            out.errors.append((line, f"unparsable entry: {exc}"))
            continue
        if not all(math.isfinite(v) for v in vals):
            out.errors.append((line, "non-finite entry"))
            continue
        pos, weight, F = np.array(vals[:n]), vals[n], np.array(vals[n + 1:]).reshape(n, n)
        if weight < 0:
            out.errors.append((line, "negative weight"))
            continue
        if not linearized and np.linalg.det(F) <= 0:
            out.errors.append((line, "det F <= 0"))
            continue
        out.records.append(FieldRecord(pos, weight, F, line))
    if header is None:
        raise ValueError("missing header row")
    return out


def write_field(records, stream):
    records = list(records)
    n = records[0].F.shape[0] if records else 2
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(field_header(n))
    for r in records:
        w.writerow([repr(float(v)) for v in (*r.position, r.weight, *r.F.ravel())])


@dataclass(frozen=True)
class EnergyReport:
    """Energy total over a field; ``per_cell`` holds densities (NaN where skipped)."""

    model: str
    total: float
    per_cell: list
    cells: int
    skipped: int


def _density(model, mu, kappa):
    if model == "hencky":
        return lambda F: hencky_energy(mu, kappa, F)
    if model == "biot":
        return lambda F: biot_energy_density(mu, kappa, F)
    if model == "euclid_so":
        return dist_euclid_sq_to_SO
    if model == "linearized":
        return dist_euclid_sq_to_so
    raise ValueError(f"unknown energy model {model!r}; choose from {FIELD_MODELS}")


def total_energy(model, mu, kappa, field):
    """Sum of weight * density over the cells.

    Cells whose density raises a domain error are skipped and counted. The
    sum is correctly rounded (``math.fsum``), so it does not depend on how
    the per-cell work is split.
    """
    density = _density(model, mu, kappa)
    records = list(field)
    dims = {r.F.shape for r in records}
    if len(dims) > 1:
        raise DimensionError(f"inconsistent gradient shapes in field: {sorted(dims)}")

    def cell(r):
        try:
            return float(density(r.F))
        except (DomainError, ArithmeticError, ValueError):
            return math.nan

    per_cell = pmap(cell, records)
    terms = [r.weight * d for r, d in zip(records, per_cell) if not math.isnan(d)]
    skipped = len(records) - len(terms)
    return EnergyReport(model, math.fsum(terms), per_cell, len(records), skipped)


def rigid_field(n, kind="rotation", matrix=None, offset=None, cells=4):
    """Constant-gradient field of a rigid motion on the unit square/cube.

    ``kind="rotation"`` gives ``phi(x) = Q x + b`` with gradient ``Q``;
    ``kind="linearized"`` gives ``u(x) = W x + b`` with skew gradient ``W``.
    Cells are the ``cells**n`` cubes of a uniform grid; weights sum to one.
    """
    if matrix is None:
        matrix = np.eye(n) if kind == "rotation" else np.zeros((n, n))
    M = as_matrix(matrix, n)
    if kind == "rotation":
        M = as_rotation(M)
    elif kind == "linearized":
        if np.linalg.norm(M + M.T) > 1e-12 * max(1.0, np.linalg.norm(M)):
            raise DomainError("linearized rigid motion needs a skew-symmetric gradient")
    else:
        raise ValueError(f"unknown rigid motion kind {kind!r}")
    if offset is not None and np.shape(offset) != (n,):
        raise DimensionError(f"offset must have length {n}")
    if cells < 1:
        raise ValueError("cells must be >= 1")
    centers = (np.arange(cells) + 0.5) / cells
    grid = np.stack(np.meshgrid(*([centers] * n), indexing="ij"), -1).reshape(-1, n)
    weight = 1.0 / cells**n
    return [FieldRecord(x.copy(), weight, M.copy()) for x in grid]
