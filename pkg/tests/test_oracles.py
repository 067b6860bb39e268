"""Live comparisons with the mpmath reference implementation in oracles.py."""

import numpy as np
import pytest

import oracles as O
from hbcalc.circle import HardyFunction
from hbcalc.core import hb_inner, lift, product_kernel_lift
from hbcalc.lab import LambdaSequence, cyclicity_curve, gram, span_residual_curve

from test_acceptance import BLASCHKE_FLOOR_ORACLE, COMPLETENESS_ORACLE, CYCLICITY_ORACLE


def test_oracle_reproduces_closed_forms():
    P = O.HALF_ONE_PLUS_Z
    one = O.Element(P, [([1], 0)])
    assert complex(one.plus_value(0.3)) == pytest.approx(1)
    assert abs(one.inner(one) - 2) < 1e-40
    b = O.Element(P, [([0.5, 0.5], 0)])
    assert complex(b.plus_value(0.2)) == pytest.approx((3 + 0.2) / 2)


@pytest.mark.parametrize("coeffs", [[1], [2, 1], [0.3, -1j, 0.25]])
@pytest.mark.parametrize("lam", [0.5, 0.5j, -0.7, 0.3 - 0.4j])
def test_product_kernel_lift_matches_exact_projection(half, coeffs, lam):
    # the oracle never uses the closed plus formula; it solves P_lam(conj(a) r) = P_lam(conj(b) f)
    el = O.Element(O.HALF_ONE_PLUS_Z, [(coeffs, lam)])
    fk = product_kernel_lift(lift(HardyFunction(coeffs), half), lam)
    for z in (0, 0.4, -0.3 + 0.6j):
        assert fk.f_plus(z) == pytest.approx(complex(el.plus_value(z)), rel=1e-10, abs=1e-12)
    assert fk.norm() == pytest.approx(float(el.norm()), rel=1e-10)


def test_gram_entries_match_exact_inner_products(half):
    pts = [0.2, -0.5j, 0.7]
    G = gram(lift(HardyFunction([2.0, 1.0]), half), pts, 3)
    els = O.kernel_family(O.HALF_ONE_PLUS_Z, [2, 1], pts)
    for i in range(3):
        for j in range(3):
            assert G[i, j] == pytest.approx(complex(els[i].inner(els[j])), rel=1e-10)


def test_cyclicity_baseline_rederived(half):
    P = O.HALF_ONE_PLUS_Z
    one = O.Element(P, [([1], 0)])
    curve = cyclicity_curve(lift(HardyFunction([-1j, 1.0]), half), 16)
    for d in (8, 16):
        exact = O.distance(one, O.multiples(P, [-1j, 1], d))
        assert exact == pytest.approx(CYCLICITY_ORACLE[d], rel=1e-14)
        assert curve[d] == pytest.approx(exact, rel=1e-12)


def test_completeness_baseline_rederived(half):
    P = O.HALF_ONE_PLUS_Z
    pts = LambdaSequence.harmonic(5).points
    exact = O.distance(O.Element(P, [([1], 0)]), O.kernel_family(P, [2, 1], pts))
    assert exact == pytest.approx(COMPLETENESS_ORACLE[5], rel=1e-14)
    res, _, _ = span_residual_curve(
        {"1": lift(HardyFunction([1.0]), half)}, lift(HardyFunction([2.0, 1.0]), half), pts, 5
    )
    assert res["1"][-1] == pytest.approx(exact, rel=1e-10)


def test_blaschke_floor_rederived():
    P = O.HALF_ONE_PLUS_Z
    seq = LambdaSequence.geometric(0.5, 40)
    distinct = list(dict.fromkeys(np.round(seq.points, 14)))
    assert len(distinct) == 5
    exact = O.distance(O.Element(P, [([0, 1], 0)]), O.kernel_family(P, [1], distinct))
    assert exact == pytest.approx(BLASCHKE_FLOOR_ORACLE, rel=1e-14)


def test_rz_pair_inner_products(zhalf):
    P = O.rz_pair(0.5)
    e1 = O.Element(P, [([1, 2], 0.3)])
    e2 = O.Element(P, [([0, 1j], -0.6)])
    F1 = product_kernel_lift(lift(HardyFunction([1, 2]), zhalf), 0.3)
    F2 = product_kernel_lift(lift(HardyFunction([0, 1j]), zhalf), -0.6)
    assert hb_inner(F1, F2) == pytest.approx(complex(e1.inner(e2)), rel=1e-10)
