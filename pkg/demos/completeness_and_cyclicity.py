"""
Distances to kernel spans and polynomial multiples.

* ``{(2 + z) k_lambda}`` on the harmonic points ``1 - 1/(n + 1)``: the
  residual of the targets 1, z, b keeps falling as N grows.
* ``{k_lambda}`` on a geometric sequence that hits the cap: only five
  distinct points survive, and the residual of ``z`` stalls.
* ``min ||1 - p (z - i)||_b`` over polynomials of degree <= d.

Run with ``python demos/completeness_and_cyclicity.py``.
"""

from hbcalc import GridSpec, HardyFunction, LambdaSequence, completeness_experiment, lift, mate
from hbcalc.lab import cyclicity_curve, default_targets

pair = mate(HardyFunction([0.5, 0.5]), GridSpec(4096))
targets = default_targets(pair)

F = lift(HardyFunction([2.0, 1.0]), pair)
rep = completeness_experiment(F, LambdaSequence.harmonic(19), 19, targets)
print(rep.summary())

one = lift(HardyFunction([1.0]), pair)
seq = LambdaSequence.geometric(0.5, 40)
rep = completeness_experiment(one, seq, 40, {"z": targets["z"]}, family="k_lambda")
print(f"capped points: {seq.n_capped} of {len(seq)}")
print(rep.summary())

curve = cyclicity_curve(lift(HardyFunction([-1j, 1.0]), pair), 64)
for d in (8, 16, 32, 64):
    print(f"d = {d:2d}: residual {curve[d]:.10f}   1/sqrt(d/2 + 1) = {(d / 2 + 1) ** -0.5:.10f}")
