"""
Pythagorean mates and the lifting ``f -> (f, f_plus, g)``.

Builds the mate of b = (1 + z)/2 twice (exact factorisation and the grid
route), lifts a few polynomials and checks the reproducing property of
the H(b) kernel.

Run with ``python demos/pythagorean_pairs.py``.
"""

import numpy as np

from hbcalc import GridSpec, HardyFunction, hb_inner, kernel, lift, mate

grid = GridSpec(4096)
b = HardyFunction([0.5, 0.5])

exact = mate(b, grid)
approx = mate(b, grid, method="grid")
print("a from factorisation:", np.round(exact.a.coeffs[:3].real, 12))
print("a from the grid:     ", np.round(approx.a.coeffs[:3].real, 8))
print("floored grid points: ", [int(j) for j in approx.eps_zone])
print(f"|a|^2 + |b|^2 - 1 (sup): {exact.pythagorean_residual():.2e}")

for coeffs in ([1.0], [0.0, 1.0], [2.0, 1.0]):
    F = lift(HardyFunction(coeffs), exact)
    diag = F.check()
    print(
        f"f = {coeffs}: ||f||_2 = {F.f.norm():.6f}, ||f||_b = {F.norm():.6f}, "
        f"lift residual {diag['lift_residual']:.1e}"
    )

F = lift(HardyFunction([0.2, -1j, 0.7]), exact)
for lam in (0.0, 0.4, -0.3 + 0.5j):
    err = abs(hb_inner(F, kernel(lam, "hb", exact)) - F.f(lam))
    print(f"reproducing kernel at {lam}: error {err:.1e}")
