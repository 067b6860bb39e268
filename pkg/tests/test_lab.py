import csv
import io
import warnings

import numpy as np
import pytest

from hbcalc.circle import HardyFunction
from hbcalc.core import lift, product_kernel_lift
from hbcalc.errors import DivergenceError, IllConditionedSpanWarning, InputError
from hbcalc.lab import (
    LambdaSequence,
    a_density_experiment,
    blaschke_partial_sums,
    classify_one_minus_cb,
    completeness_experiment,
    cyclicity_curve,
    cyclicity_residual,
    default_targets,
    gr_approximant,
    gr_from_kernels,
    gr_series,
    gram,
    hypothesis_bf_bounded,
    is_numerically_outer,
    projection_curve,
    shift_recurrence_check,
    span_residual,
)

# sequences


def test_sequence_generators():
    h = LambdaSequence.harmonic(3)
    assert np.allclose(h.points, [1 / 2, 2 / 3, 3 / 4])
    g = LambdaSequence.geometric(0.5, 3)
    assert np.allclose(g.points, [0.5, 0.75, 0.875])
    c = LambdaSequence.constant(0.2j, 4)
    assert len(c) == 4 and np.all(c.points == 0.2j)
    assert h.description == "harmonic(3)"


def test_sequence_capping_keeps_argument():
    s = LambdaSequence.from_points([0.5, 0.98j, -0.96], cap=0.95)
    assert s.n_capped == 2
    assert s.points[1] == pytest.approx(0.95j)
    assert s.points[2] == pytest.approx(-0.95)
    with pytest.raises(InputError):
        LambdaSequence.from_points([1.0])


def test_blaschke_partial_sums():
    s = LambdaSequence.harmonic(4)
    assert np.allclose(blaschke_partial_sums(s), np.cumsum([1 / 2, 1 / 3, 1 / 4, 1 / 5]))
    assert np.allclose(s.partial_blaschke_sums, blaschke_partial_sums(s))
    assert blaschke_partial_sums([0.5, 0.5, 0.5], N=2)[-1] == pytest.approx(1)


# Gram matrices and span residuals


def test_gram_two_points(half):
    # <k_0, k_mu>_b = 1 + conj(b(mu)/a(mu)) * b(0)/a(0); b/a = 3 at mu = 1/2
    G = gram(lift(HardyFunction([1.0]), half), [0, 0.5], 2)
    assert G[0, 0] == pytest.approx(2)
    assert G[0, 1] == pytest.approx(4)
    assert np.allclose(G, G.conj().T)


def test_gram_rejects_too_many_points(half):
    with pytest.raises(InputError):
        gram(lift(HardyFunction([1.0]), half), [0.1], 2)


def test_span_residual_of_member_is_zero(half):
    F = lift(HardyFunction([2.0, 1.0]), half)
    target = product_kernel_lift(F, 0.3)
    assert span_residual(target, F, [0.1, 0.3], 2) < 1e-12


def test_span_residual_monotone_and_methods_agree(half):
    F = lift(HardyFunction([2.0, 1.0]), half)
    one = lift(HardyFunction([1.0]), half)
    seq = LambdaSequence.harmonic(8)
    res = [span_residual(one, F, seq, n) for n in range(1, 9)]
    assert all(b <= a + 1e-10 for a, b in zip(res, res[1:]))
    normal = span_residual(one, F, seq, 4, method="normal")
    assert normal == pytest.approx(res[3], rel=1e-6)
    with pytest.raises(InputError):
        span_residual(one, F, seq, 4, method="qr")


def test_normal_equations_warn_when_ill_conditioned(half):
    F = lift(HardyFunction([1.0]), half)
    one = lift(HardyFunction([1.0]), half)
    with pytest.warns(IllConditionedSpanWarning):
        r = span_residual(one, F, [0.3, 0.3], 2, method="normal")
    assert r >= 0


def test_span_residual_pair_mismatch(half, zhalf):
    with pytest.raises(InputError):
        span_residual(lift(HardyFunction([1.0]), zhalf), lift(HardyFunction([1.0]), half), [0.1], 1)


def test_projection_curve_drops_dependent_columns():
    cols = np.array([[1, 2, 0], [0, 0, 1], [0, 0, 0]], complex)
    curve = projection_curve(cols, np.array([1, 1, 1], complex))
    assert curve.dropped == [2]
    assert np.allclose(curve.residuals[:, 0], [np.sqrt(2), np.sqrt(2), 1])


# cyclicity


def test_cyclicity_of_one(half):
    assert cyclicity_residual(lift(HardyFunction([1.0]), half), 0) < 1e-14


def test_cyclicity_curve_decreases(half):
    curve = cyclicity_curve(lift(HardyFunction([-1j, 1.0]), half), 8)
    assert curve.shape == (9,)
    assert np.all(np.diff(curve) <= 1e-12)
    assert curve[8] == pytest.approx(1 / np.sqrt(5), rel=1e-10)


def test_cyclicity_z_is_not_cyclic(half):
    # 1 is orthogonal to z H^2 in both components of the picture
    assert cyclicity_residual(lift(HardyFunction([0, 1.0]), half), 10) >= 1 - 1e-9


# approximants of z^n


def test_gr_series_and_kernel_form_agree():
    for n in (1, 2, 3):
        s, k = gr_series(n, 0.3, 60), gr_from_kernels(n, 0.3, 60)
        assert np.abs(s.coeffs - k.coeffs).max() < 1e-12


def test_gr_approximant(half):
    rep = gr_approximant(2, 0.2, half)
    assert rep.passed
    assert rep.bound == pytest.approx(0.36 / 0.88)
    with pytest.raises(DivergenceError):
        gr_approximant(1, 0.9, half)
    with pytest.raises(InputError):
        gr_approximant(0, 0.1, half)


def test_shift_recurrence(half):
    F = lift(HardyFunction([1.0, -0.25]), half)
    assert shift_recurrence_check(F, 0.4 - 0.2j) < 1e-10
    with pytest.raises(InputError):
        shift_recurrence_check(F, 0)


# classifiers


def test_b_over_f_verdicts(half):
    assert hypothesis_bf_bounded(lift(HardyFunction([1.0]), half)).bounded
    # f = 1 + z vanishes only where b does: b/f = 1/2
    v = hypothesis_bf_bounded(lift(HardyFunction([1.0, 1.0]), half))
    assert v.bounded and v.sup_estimate == pytest.approx(0.5)
    v = hypothesis_bf_bounded(lift(HardyFunction([1.0, -1.0]), half))
    assert not v.bounded and "vanishes" in v.reason
    with pytest.raises(InputError):
        hypothesis_bf_bounded(lift(HardyFunction([0.0]), half))


@pytest.mark.parametrize(
    "c,case,cyclic",
    [
        (0, "modulus_lt_1", True),
        (0.5j, "modulus_lt_1", True),
        (1, "unimodular_singular", False),
        (-1, "unimodular_ac", True),
        (2, "modulus_gt_1_not_outer", False),
        (-2, "modulus_gt_1_outer", True),
    ],
)
def test_classifier(half, c, case, cyclic):
    v = classify_one_minus_cb(c, half)
    assert (v.case, v.cyclic) == (case, cyclic)


def test_is_numerically_outer(grid):
    assert is_numerically_outer(HardyFunction([1.0, -1.0]), grid)
    assert not is_numerically_outer(HardyFunction([0.5, 1.0]), grid)


# reports


def test_completeness_report(half):
    F = lift(HardyFunction([2.0, 1.0]), half)
    rep = completeness_experiment(F, LambdaSequence.harmonic(4), 4, default_targets(half))
    rows = list(csv.DictReader(io.StringIO(rep.to_csv(provenance="test"))))
    assert [(r["N"], r["target"]) for r in rows[:4]] == [
        ("1", "1"), ("1", "z"), ("1", "b"), ("2", "1"),
    ]
    assert len(rows) == 12 and rows[0]["provenance"] == "test"
    text = rep.summary()
    assert "no divergence verdict" in text and "family:" in text
    buf = io.StringIO()
    rep.to_csv(buf)
    assert buf.getvalue().startswith("N,target,residual")


def test_completeness_report_flags_repeated_points(half):
    F = lift(HardyFunction([1.0]), half)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rep = completeness_experiment(F, [0.3, 0.3], 2, {"1": lift(HardyFunction([1.0]), half)})
    assert "dependent-member" in rep.flags[2]


def test_a_density_experiment(zhalf):
    rep = a_density_experiment(LambdaSequence.harmonic(6), zhalf, 6)
    assert rep.family.startswith("a k_lambda")
    assert rep.verdicts["clark_mu_1"] == "absolutely continuous"
    for res in rep.residuals.values():
        assert all(b <= a + 1e-10 for a, b in zip(res, res[1:]))


def test_a_density_single_point_at_origin(half):
    # k_0 = 1, so the family is {a}: a one-dimensional projection
    rep = a_density_experiment([0.0], half, 1)
    one, A = lift(HardyFunction([1.0]), half), lift(half.a, half)
    expected = np.sqrt(one.norm() ** 2 - abs(one.inner(A)) ** 2 / A.norm() ** 2)
    assert rep.residuals["1"][0] == pytest.approx(expected, rel=1e-12)
