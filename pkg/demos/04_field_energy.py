"""
Energy of a discretised deformation
===================================

A field is a list of cells with a weight and a deformation gradient. Rigid
motions carry no energy; a uniform dilation by e has Hencky density 2.
"""

import io
import math

import numpy as np

from geostrain.field import FieldRecord, parse_field, rigid_field, total_energy, write_field
from geostrain.linalg import rot2

rigid = rigid_field(2, "rotation", rot2(math.pi / 4), offset=[1.0, -2.0])
for model in ("hencky", "biot", "euclid_so"):
    print(model, total_energy(model, 1.0, 1.0, rigid).total)
skew = np.array([[0.0, -0.3], [0.3, 0.0]])
print("linearized", total_energy("linearized", 1.0, 1.0, rigid_field(2, "linearized", skew)).total)

# write a dilation field to CSV and read it back
dilation = [FieldRecord(r.position, r.weight, math.e * np.eye(2)) for r in rigid_field(2)]
buf = io.StringIO()
write_field(dilation, buf)
field = parse_field(io.StringIO(buf.getvalue()))
print("hencky total", total_energy("hencky", 1.0, 1.0, field).total)
print("biot total  ", total_energy("biot", 1.0, 1.0, field).total, " expected", 2 * (math.e - 1) ** 2)
