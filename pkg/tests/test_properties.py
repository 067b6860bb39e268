"""Randomised invariants (hypothesis) on a small grid."""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from hbcalc.circle import GridSpec, HardyFunction, from_coefficients, riesz_project
from hbcalc.core import eval_functionals, hb_inner, kernel, lift, mate, product_kernel_lift
from hbcalc.lab import LambdaSequence, span_residual

GRID = GridSpec(1024)
PAIR = mate(HardyFunction([0.5, 0.5]), GRID)

finite = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)
coeff_lists = st.lists(cplx, min_size=1, max_size=6)
disk = st.builds(
    lambda r, t: r * np.exp(1j * t),
    st.floats(0, 0.9),
    st.floats(0, 2 * np.pi),
)
# |lambda| <= 0.8 keeps the tail of f k_lambda below round-off at M = 256
inner_disk = st.builds(
    lambda r, t: r * np.exp(1j * t),
    st.floats(0, 0.8),
    st.floats(0, 2 * np.pi),
)
common = settings(max_examples=25, deadline=None,
                  suppress_health_check=[HealthCheck.too_slow])


@common
@given(coeff_lists, coeff_lists, cplx)
def test_lift_linear(p, q, s):
    n = max(len(p), len(q))
    pv, qv = np.zeros(n, complex), np.zeros(n, complex)
    pv[: len(p)], qv[: len(q)] = p, q
    lhs = lift(HardyFunction(pv + s * qv), PAIR)
    rhs = lift(HardyFunction(pv), PAIR) + lift(HardyFunction(qv), PAIR) * s
    scale = 1 + np.abs(pv).sum() + abs(s) * np.abs(qv).sum()
    assert np.abs(lhs.stacked() - rhs.stacked()).max() <= 1e-10 * scale


@common
@given(coeff_lists)
def test_b_norm_dominates_h2_norm(p):
    F = lift(HardyFunction(p), PAIR)
    assert F.norm() >= F.f.norm() * (1 - 1e-12)
    assert hb_inner(F, F).real == pytest.approx(F.norm() ** 2, rel=1e-12, abs=1e-300)


@common
@given(coeff_lists, disk)
def test_reproducing_identity(p, lam):
    F = lift(HardyFunction(p), PAIR)
    scale = 1 + np.abs(p).sum()
    assert abs(hb_inner(F, kernel(lam, "hb", PAIR)) - F.f(lam)) <= 1e-9 * scale
    c, _ = eval_functionals(F, lam)
    assert abs(hb_inner(F, kernel(lam, "cauchy", PAIR)) - c) <= 1e-9 * scale


@common
@given(coeff_lists, inner_disk)
def test_product_kernel_lift_solves_the_lift_equation(p, lam):
    G = product_kernel_lift(lift(HardyFunction(p), PAIR), lam)
    assert G.lift_residual <= 1e-9 * (1 + G.f.norm())


@common
@given(st.lists(cplx, min_size=3, max_size=21))
def test_riesz_projection_idempotent(c):
    m = len(c) // 2
    f = from_coefficients(c, GRID, -m)
    p = riesz_project(f)
    assert np.abs(riesz_project(p.boundary(GRID)).coeffs - p.coeffs).max() < 1e-12 * (1 + np.abs(c).sum())
    assert p.norm() <= f.norm() + 1e-12


@common
@given(st.lists(inner_disk, min_size=2, max_size=8, unique_by=lambda z: (round(z.real, 3), round(z.imag, 3))))
def test_span_residual_nonincreasing(points):
    F = lift(HardyFunction([2.0, 1.0]), PAIR)
    one = lift(HardyFunction([1.0]), PAIR)
    seq = LambdaSequence.from_points(points)
    res = [span_residual(one, F, seq, n) for n in range(1, len(points) + 1)]
    assert all(b <= a + 1e-10 for a, b in zip(res, res[1:]))
    assert res[0] <= one.norm() + 1e-12
