"""
Clark measures, the shift and the ``1 - c b`` classifier for b = (1 + z)/2.

For alpha = 1 we have 1 - b = a, so F_1 = 1 and the measure carries an
atom at zeta = 1; for alpha = -1 it is absolutely continuous.

Run with ``python demos/clark_and_shift.py``.
"""

import numpy as np

from hbcalc import (
    GridSpec,
    HardyFunction,
    classify_one_minus_cb,
    clark,
    finite_section_shift_norm,
    mate,
    shift_norm,
)

pair = mate(HardyFunction([0.5, 0.5]), GridSpec(4096))

for alpha in (1, -1, 1j):
    cd = clark(alpha, pair)
    print(
        f"alpha = {alpha}: total {cd.total_mass:.6f}, ac {cd.ac_mass:.6f}, "
        f"singular {cd.singular_mass:.2e}"
    )

print(f"\nshift norm (closed form): {shift_norm(pair):.12f}  sqrt(3) = {np.sqrt(3):.12f}")
for d in (32, 64, 128, 256):
    print(f"  polynomials of degree <= {d:3d}: {finite_section_shift_norm(pair, d):.12f}")

print()
for c in (0, 0.5j, 1, -1, 2, -2):
    v = classify_one_minus_cb(c, pair)
    print(f"c = {c}: {v.case:24s} cyclic = {v.cyclic}")
