"""
The verification suite: closed-form checks replayed on named presets.

Each row records a measured value, the bound it is compared against and
the identity it exercises.  Presets:

``half-one-plus-z``
    ``b = (1 + z)/2`` with mate ``(1 - z)/2``; carries most checks.
``rz(r)``
    ``b = r z`` with constant mate ``sqrt(1 - r^2)``.
``circle``
    Cauchy-transform identities and the weak-L1 profile on the grid alone.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .circle import (
    GridSpec,
    HardyFunction,
    analyze,
    cauchy_boundary_identity_residual,
    cauchy_boundary_values,
    cauchy_transform,
    distribution_profile,
    from_coefficients,
)
from .core import (
    KernelCombination,
    PythagoreanPair,
    clark,
    clark_isometry,
    eval_functionals,
    finite_section_shift_norm,
    hb_inner,
    kernel,
    lift,
    mate,
    product_kernel_lift,
    shift_norm,
)
from .errors import InputError
from .lab import (
    LambdaSequence,
    classify_one_minus_cb,
    cyclicity_curve,
    default_targets,
    gr_approximant,
    shift_recurrence_check,
    span_residual_curve,
)

DEFAULT_PRESETS = ("half-one-plus-z", "rz(0.3)", "rz(0.5)", "rz(0.9)", "circle")

#: sup of t * lambda(t) over t in [1, 100] for the Cauchy partial sum of
#: |1 - zeta|^(-1/2), measured on a 2^16-point grid
KOLMOGOROV_CONSTANT = 0.6058502197265625
KOLMOGOROV_THRESHOLDS = np.logspace(0, 2, 21)
#: dist(z, span{k_lambda}) for the five distinct points of 1 - 2^-n capped
#: at 0.95, b = (1 + z)/2, from the high-precision reference computation
BLASCHKE_FLOOR = 1.0631438198702685
#: residual(64) / residual(8) for f = z - i must stay below this factor
CYCLICITY_DECAY = 0.5
#: residual(N = 40) / residual(N = 1) for f = 2 + z must stay below this factor
COMPLETENESS_DECAY = 0.5


@dataclass(frozen=True)
class CheckRow:
    preset: str
    criterion: int
    check: str
    identity: str
    value: float
    bound: float
    comparison: str = "<="

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.value) and self.value != -np.inf:
            return False
        if self.comparison == "<=":
            return bool(self.value <= self.bound)
        if self.comparison == "<":
            return bool(self.value < self.bound)
        return bool(self.value >= self.bound)


class _Rows(list):
    def __init__(self, preset):
        super().__init__()
        self.preset = preset

    def add(self, criterion, check, identity, value, bound, comparison="<="):
        self.append(
            CheckRow(self.preset, criterion, check, identity, float(value), float(bound), comparison)
        )


def kolmogorov_profile(grid: GridSpec, thresholds=KOLMOGOROV_THRESHOLDS) -> np.ndarray:
    """``t * lambda(t)`` for the boundary partial sum of ``C(|1 - zeta|^(-1/2))``."""
    d = np.abs(1 - grid.points)
    # the singular sample is replaced by the value half a grid step away
    d[0] = abs(1 - np.exp(1j * np.pi / grid.size))
    f = analyze(d**-0.5 + 0j, grid)
    h = analyze(cauchy_boundary_values(f), grid)
    return distribution_profile(h, thresholds).weak_products


def _max_err(x, ref):
    x = np.asarray(x, complex)
    ref = np.asarray(ref, complex)
    out = x.copy()
    out[: ref.size] -= ref
    return float(np.abs(out).max())


def _panel(pair):
    return {
        "1": lift(HardyFunction([1.0]), pair),
        "2+z": lift(HardyFunction([2.0, 1.0]), pair),
        "k_0.3": lift(HardyFunction.kernel(0.3, pair.length), pair),
    }


def _common_rows(rows: _Rows, pair: PythagoreanPair):
    """Checks that apply to every pair."""
    panel = _panel(pair)
    # key formula for (f k_lambda)_plus against the solver
    worst, worst0 = 0.0, 0.0
    for name, F in panel.items():
        for lam in (0, 0.5, 0.5j, -0.7):
            fk = product_kernel_lift(F, lam)
            direct = lift(fk.f, pair)
            rel = np.linalg.norm(fk.stacked() - direct.stacked()) / direct.norm()
            worst = max(worst, rel)
            if lam == 0:
                worst0 = max(worst0, float(np.abs(fk.f_plus.coeffs - F.f_plus.coeffs).max()))
    rows.add(3, "(f k_lam)+ formula vs solver, relative", "(f k)+ = (f+ + conj(lam g(lam))/conj(a(lam))) k", worst, 1e-6)
    rows.add(3, "lambda = 0 reproduces f+ exactly", "(f k_0)+ = f+", worst0, 0.0)
    # reproducing identities
    worst = 0.0
    for name, F in panel.items():
        for lam in (0, 0.5, 0.5j, -0.7):
            e1, e2 = eval_functionals(F, lam)
            i1 = hb_inner(F, kernel(lam, "cauchy", pair))
            i2 = hb_inner(F, kernel(lam, "b_cauchy", pair))
            worst = max(worst, abs(i1 - e1), abs(i2 - e2))
    rows.add(4, "functionals vs inner products", "<f, k>_b = f + (b/a) f+ ; <f, b k>_b = f+/a", worst, 1e-6)
    # Clark isometry
    combos = [
        KernelCombination.single(0),
        KernelCombination.single(0.3),
        KernelCombination((1, -1), (0.3, -0.3)),
        KernelCombination.single(0.5j),
    ]
    worst = 0.0
    for alpha in (1, -1, 1j):
        for h in combos:
            img = clark_isometry(alpha, h, pair)
            worst = max(worst, abs(img.norm() - h.norm()) / h.norm())
    rows.add(6, "Clark isometry norm defect, relative", "||V_alpha h||_b = ||h||_2", worst, 1e-6)
    # shift recurrence
    worst = 0.0
    for F in panel.values():
        for lam in (0.5, 0.3j, -0.8):
            worst = max(worst, shift_recurrence_check(F, lam) / F.norm())
    rows.add(9, "shift recurrence, relative", "S(f k) = -(f - f k)/conj(lam)", worst, 1e-7)


def _half_rows(rows: _Rows, pair: PythagoreanPair):
    L = pair.length
    rows.add(1, "mate coefficient error", "a = (1 - z)/2", _max_err(pair.a.coeffs, [0.5, -0.5]), 1e-6)
    one = lift(HardyFunction([1.0]), pair)
    rows.add(2, "1+ = 1", "T_conj(b) 1 = T_conj(a) 1", _max_err(one.f_plus.coeffs, [1]), 1e-8)
    rows.add(2, "g = 1", "conj(b) - conj(a) = conj(z)", _max_err(one.g.coeffs, [1]), 1e-8)
    rows.add(2, "||1||_b^2 = 2", "||f||_b^2 = ||f||_2^2 + ||f+||_2^2", abs(one.norm() ** 2 - 2), 1e-8)
    bl = lift(pair.b, pair)
    rows.add(2, "b+ = (3 + z)/2", "T_conj(b) b = T_conj(a) b+", _max_err(bl.f_plus.coeffs, [1.5, 0.5]), 1e-6)
    panel = [HardyFunction([1.0]), HardyFunction([0, 1.0]), HardyFunction([2.0, 1.0]), pair.b,
             HardyFunction([-1j, 1]), HardyFunction.kernel(0.3, L)]
    worst = max(lift(f, pair).lift_residual for f in panel)
    rows.add(2, "lift residual over the panel", "||T_conj(b) f - T_conj(a) f+||_2", worst, 1e-8)
    e1, e2 = eval_functionals(one, 0.5)
    rows.add(4, "<1, k_1/2>_b = 4", "f(lam) + b(lam)/a(lam) f+(lam)", abs(e1 - 4), 1e-6)
    rows.add(4, "<1, b k_1/2>_b = 4", "f+(lam)/a(lam)", abs(e2 - 4), 1e-6)
    cd = clark(1, pair)
    rows.add(5, "F_1 = 1", "F_alpha = a/(1 - conj(alpha) b)", _max_err(cd.F_alpha.coeffs, [1]), 1e-8)
    rows.add(5, "ac mass = 1", "ac mass = mean |F_alpha|^2", abs(cd.ac_mass - 1), 1e-6)
    rows.add(5, "total mass = 3", "(1 - |b(0)|^2)/|1 - conj(alpha) b(0)|^2", abs(cd.total_mass - 3), 1e-9)
    rows.add(5, "singular mass = 2", "total - ac", abs(cd.singular_mass - 2), 1e-6)
    rows.add(7, "shift norm = sqrt(3)", "sqrt(1 - |b(0)|^2)/|a(0)|", abs(shift_norm(pair) - np.sqrt(3)), 1e-12)
    fs = [finite_section_shift_norm(pair, d) for d in (32, 64, 128, 256)]
    rows.add(7, "finite section d=256 lower", "finite sections approach from below", fs[-1], np.sqrt(3) - 0.05, ">=")
    rows.add(7, "finite section d=256 upper", "never above the closed form", fs[-1], np.sqrt(3) + 1e-3)
    rows.add(7, "finite sections nondecreasing", "max decrease over d = 32..256", max(np.diff(fs).min() * -1, 0.0), 1e-12)
    worst_margin, worst_series = -np.inf, 0.0
    for n in (1, 2, 3):
        for r in (0.1, 0.2):
            rep = gr_approximant(n, r, pair)
            worst_margin = max(worst_margin, max(c[1] - c[2] for c in rep.checks))
            if n == 1:
                ref = r ** np.arange(L - 1)
                worst_series = max(worst_series, _max_err(rep.series.coeffs[1:], ref))
    rows.add(8, "g_r bound margin (distance - allowed)", "||(g_r - z^n) h||_b <= bound ||h||_b", worst_margin, 0.0)
    rows.add(8, "g_r series for n = 1", "g_r = z/(1 - r z)", worst_series, 1e-10)
    # cyclicity
    zres = cyclicity_curve(lift(HardyFunction([0, 1.0]), pair), 64)
    rows.add(10, "f = z residual floor", "||1 - p z||_b >= 1", zres.min(), 1 - 1e-9, ">=")
    curve = cyclicity_curve(lift(HardyFunction([-1j, 1.0]), pair), 64)
    sel = curve[[8, 16, 32, 64]]
    rows.add(10, "f = z - i strict decrease", "largest step over d = 8, 16, 32, 64", np.diff(sel).max(), 0.0, "<")
    rows.add(10, "f = z - i decay factor", "residual(64)/residual(8)", sel[-1] / sel[0], CYCLICITY_DECAY)
    # completeness
    targets = default_targets(pair)
    F = lift(HardyFunction([2.0, 1.0]), pair)
    res, _, _ = span_residual_curve({"1": targets["1"]}, F, LambdaSequence.harmonic(40), 40)
    r1 = res["1"]
    rows.add(11, "f = 2 + z residual nonincreasing", "max step of the curve", np.diff(r1).max(), 1e-10)
    rows.add(11, "f = 2 + z decay factor", "residual(40)/residual(1)", r1[-1] / r1[0], COMPLETENESS_DECAY)
    one_f = lift(HardyFunction([1.0]), pair)
    res, _, _ = span_residual_curve({"z": targets["z"]}, one_f, LambdaSequence.geometric(0.5, 40), 40)
    rows.add(11, "Blaschke control floor", "residual of z stays at the recorded floor", res["z"].min(), BLASCHKE_FLOOR - 1e-6, ">=")
    # classifier
    v = classify_one_minus_cb(0, pair)
    rows.add(12, "c = 0 cyclic", "|c| < 1", float(v.cyclic), 1, ">=")
    v = classify_one_minus_cb(1, pair)
    rows.add(12, "c = 1 not cyclic", "singular mass of mu_1", float(not v.cyclic), 1, ">=")
    rows.add(12, "c = 1 singular mass = 2", "total - ac", abs(v.evidence["singular_mass"] - 2), 1e-6)
    v = classify_one_minus_cb(2, pair)
    rows.add(12, "c = 2 not cyclic", "1 - 2b = -z is not outer", float(not v.cyclic), 1, ">=")
    rows.add(12, "c = 2 outer defect", "log|h(0)| - mean log|h|", v.evidence["outer_defect"], -np.inf)


def _rz_rows(rows: _Rows, pair: PythagoreanPair, r: float):
    c = np.sqrt(1 - r * r)
    rows.add(1, "mate is constant", f"a = sqrt(1 - {r}^2)", _max_err(pair.a.coeffs, [c]), 1e-8)
    cd = clark(1, pair)
    rows.add(5, "singular mass = 0", "mu_1 absolutely continuous", abs(cd.singular_mass), 1e-6)
    rows.add(7, "shift norm", "1/sqrt(1 - r^2)", abs(shift_norm(pair) - 1 / c), 1e-12)
    rows.add(7, "finite section below the closed form", "d = 64", finite_section_shift_norm(pair, 64), 1 / c + 1e-3)
    v = classify_one_minus_cb(1, pair)
    rows.add(12, "c = 1 cyclic", "mu_1 absolutely continuous", float(v.cyclic), 1, ">=")


def _circle_rows(rows: _Rows, grid: GridSpec, seed: int):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(20):
        c = rng.normal(size=65) + 1j * rng.normal(size=65)
        worst = max(worst, cauchy_boundary_identity_residual(from_coefficients(c, grid, -32)))
    rows.add(13, "boundary identity, degree 32", "C(f) - f = f^(0) - conj(C(conj f))", worst, 1e-9)
    worst = 0.0
    pts = grid.points
    for _ in range(20):
        f = from_coefficients(rng.normal(size=33) + 1j * rng.normal(size=33), grid, -16)
        g = from_coefficients(rng.normal(size=33) + 1j * rng.normal(size=33), grid, -16)
        lam = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        k = 1 / (1 - np.conj(lam) * pts)
        lhs = np.mean(f.samples * np.conj(g.samples * k))
        rhs = cauchy_transform(f * g.conj(), lam)
        worst = max(worst, abs(lhs - rhs))
    rows.add(13, "pairing <f, g k_lam> = C(f conj g)(lam)", "<f, g k_lam>_2 = C(f conj(g))(lam)", worst, 1e-9)
    prof = kolmogorov_profile(grid)
    rows.add(13, "weak-L1 profile sup t*lambda(t)", "C f in weak L1", prof.max(), KOLMOGOROV_CONSTANT)


def parse_preset(name: str):
    if name in ("half-one-plus-z", "circle"):
        return (name,)
    m = re.fullmatch(r"rz\(([0-9.eE+-]+)\)", name)
    if m and 0 < float(m.group(1)) < 1:
        return ("rz", float(m.group(1)))
    raise InputError(f"unknown preset {name!r}")


def verify(presets=DEFAULT_PRESETS, grid: GridSpec | None = None, seed: int = 0, **pair_kw) -> list:
    """Run the closed-form checks for every preset; returns a list of :class:`CheckRow`."""
    grid = grid or GridSpec()
    out = []
    for name in presets:
        spec = parse_preset(name)
        rows = _Rows(name)
        if spec[0] == "circle":
            _circle_rows(rows, grid, seed)
        elif spec[0] == "half-one-plus-z":
            pair = mate(HardyFunction([0.5, 0.5]), grid, label=name, **pair_kw)
            _half_rows(rows, pair)
            _common_rows(rows, pair)
        else:
            pair = mate(HardyFunction([0, spec[1]]), grid, label=name, **pair_kw)
            _rz_rows(rows, pair, spec[1])
            _common_rows(rows, pair)
        out.extend(rows)
    return out
