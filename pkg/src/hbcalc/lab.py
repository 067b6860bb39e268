"""
Completeness and cyclicity experiments in H(b).

Families ``{f k_lambda_n}`` are built with the closed-form plus parts of
:func:`hbcalc.core.product_kernel_lift`; distances to their spans are
computed in the isometric coefficient picture ``F -> (f, f_plus)``.
"""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .circle import GridSpec, HardyFunction, fit_length, outer_defect, series_product
from .core import (
    LAMBDA_MAX,
    HbElement,
    PythagoreanPair,
    clark,
    hb_norm,
    lift,
    lift_many,
    product_kernel_lift,
    shift_apply,
    shift_norm,
)
from .errors import (
    DegreeOverflowError,
    DivergenceError,
    IllConditionedSpanWarning,
    InputError,
)

GRAM_COND_MAX = 1e12
#: Tikhonov weight for the normal equations, relative to trace(G)/N
NORMAL_REG = 1e-10
#: a new family member is dropped when its component orthogonal to the
#: current span is below this fraction of its norm
DEPENDENCE_TOL = 1e-12
OUTER_THRESHOLD = -1e-4


# ---------------------------------------------------------------------------
# point sequences


@dataclass(frozen=True, eq=False)
class LambdaSequence:
    """Points in the disk, capped at ``cap`` in modulus."""

    points: np.ndarray
    cap: float = LAMBDA_MAX
    capped: np.ndarray = None  # mask of points moved onto the cap
    description: str = "explicit"

    @classmethod
    def from_points(cls, points, cap: float = LAMBDA_MAX, description="explicit"):
        pts = np.asarray(points, dtype=complex).ravel()
        if np.any(np.abs(pts) >= 1):
            raise InputError("all points must lie in the open unit disk")
        mod = np.abs(pts)
        over = mod > cap
        pts = pts.copy()
        pts[over] *= cap / mod[over]
        return cls(pts, cap, over, description)

    @classmethod
    def harmonic(cls, count: int, cap: float = LAMBDA_MAX):
        n = np.arange(1, count + 1)
        return cls.from_points(1 - 1 / (n + 1), cap, f"harmonic({count})")

    @classmethod
    def geometric(cls, q: float, count: int, cap: float = LAMBDA_MAX):
        n = np.arange(1, count + 1)
        return cls.from_points(1 - q**n, cap, f"geometric({q}, {count})")

    @classmethod
    def constant(cls, x: complex, count: int, cap: float = LAMBDA_MAX):
        return cls.from_points(np.full(count, x), cap, f"constant({x}, {count})")

    def __len__(self):
        return self.points.size

    @property
    def n_capped(self) -> int:
        return 0 if self.capped is None else int(self.capped.sum())

    @property
    def partial_blaschke_sums(self) -> np.ndarray:
        return np.cumsum(1 - np.abs(self.points))


def blaschke_partial_sums(points, N: int | None = None) -> np.ndarray:
    """Partial sums of ``1 - |lambda_n|``; finite data cannot decide divergence."""
    pts = points.points if isinstance(points, LambdaSequence) else np.asarray(points)
    pts = pts[:N] if N is not None else pts
    return np.cumsum(1 - np.abs(pts))


def _as_sequence(points) -> LambdaSequence:
    if isinstance(points, LambdaSequence):
        return points
    return LambdaSequence.from_points(points)


# ---------------------------------------------------------------------------
# projections


@dataclass
class ProjectionCurve:
    """Distances of targets to nested spans ``span(v_1..v_k)``, ``k = 1..N``."""

    residuals: np.ndarray  # shape (N, n_targets)
    dropped: list = field(default_factory=list)  # 1-based indices of dependent columns


def projection_curve(columns: np.ndarray, targets: np.ndarray) -> ProjectionCurve:
    """
    Gram-Schmidt (two passes) over the columns, recording after each step
    the norm of every target's component orthogonal to the span so far.

    Columns whose new direction is below ``DEPENDENCE_TOL`` of their norm
    are treated as dependent and skipped; the curve is nonincreasing up to
    rounding by construction.
    """
    cols = np.asarray(columns, complex)
    tg = np.asarray(targets, complex)
    if tg.ndim == 1:
        tg = tg[:, None]
    q = np.zeros((cols.shape[0], 0), complex)
    resid = tg.copy()
    out = np.zeros((cols.shape[1], tg.shape[1]))
    dropped = []
    for k in range(cols.shape[1]):
        v = cols[:, k]
        nv = np.linalg.norm(v)
        for _ in range(2):
            v = v - q @ (q.conj().T @ v)
        nr = np.linalg.norm(v)
        if nv == 0 or nr <= DEPENDENCE_TOL * nv:
            dropped.append(k + 1)
        else:
            u = v / nr
            q = np.column_stack([q, u])
            resid = resid - np.outer(u, u.conj() @ resid)
            # re-orthogonalise the residuals against the whole basis
            resid = resid - q @ (q.conj().T @ resid)
        out[k] = np.linalg.norm(resid, axis=0)
    return ProjectionCurve(out, dropped)


def _gram_from(vectors: np.ndarray) -> np.ndarray:
    # G[i, j] = <v_i, v_j>_b
    return vectors.T @ vectors.conj()


def gram_condition(G: np.ndarray) -> float:
    w = np.linalg.eigvalsh(G)
    if w.max() <= 0:
        return float("inf")
    return float(w.max() / w.min()) if w.min() > 0 else float("inf")


def family_vectors(F: HbElement, points, N: int) -> np.ndarray:
    seq = _as_sequence(points)
    if N > len(seq):
        raise InputError(f"N = {N} exceeds the {len(seq)} available points")
    cols = [product_kernel_lift(F, lam).stacked() for lam in seq.points[:N]]
    return np.column_stack(cols)


def gram(F: HbElement, points, N: int) -> np.ndarray:
    """``G[i, j] = <f k_i, f k_j>_b`` for the first ``N`` points."""
    return _gram_from(family_vectors(F, points, N))


def span_residual(
    target: HbElement, F: HbElement, points, N: int, method: str = "projection"
) -> float:
    """
    ``dist_b(target, span{f k_lambda_1, ..., f k_lambda_N})``.

    ``method="projection"`` orthogonalises the family directly;
    ``method="normal"`` solves regularised normal equations (pseudo-inverse
    when the Gram condition exceeds 1e12, with a warning).
    """
    if target.pair is not F.pair:
        raise InputError("target and generator belong to different pairs")
    V = family_vectors(F, points, N)
    t = target.stacked()
    if method == "projection":
        return float(projection_curve(V, t).residuals[-1, 0])
    if method == "normal":
        res, _ = _normal_equation_residual(V, t)
        return res
    raise InputError(f"unknown method {method!r}")


def _normal_equation_residual(V: np.ndarray, t: np.ndarray):
    """Residual via (G + delta I) c = r; returns (residual, flags)."""
    # column-linear Gram A[i, j] = <v_j, v_i>, right-hand side r_i = <t, v_i>
    A = V.conj().T @ V
    r = V.conj().T @ t
    n = A.shape[0]
    flags = []
    cond = gram_condition(A)
    if cond > GRAM_COND_MAX:
        flags.append("ill-conditioned:pinv")
        warnings.warn(
            f"Gram condition {cond:.2e} exceeds {GRAM_COND_MAX:.0e}; using pseudo-inverse",
            IllConditionedSpanWarning,
            stacklevel=3,
        )
        c = scipy.linalg.pinvh(A) @ r
    else:
        delta = NORMAL_REG * np.trace(A).real / n
        c = scipy.linalg.solve(A + delta * np.eye(n), r, assume_a="pos")
    return float(np.linalg.norm(t - V @ c)), flags


def span_residual_curve(targets: dict, F: HbElement, points, N: int):
    """Residual curves for several targets; returns (residuals dict, conditions, dropped)."""
    V = family_vectors(F, points, N)
    names = list(targets)
    T = np.column_stack([targets[k].stacked() for k in names])
    curve = projection_curve(V, T)
    G = _gram_from(V)
    conds = [gram_condition(G[:k, :k]) for k in range(1, N + 1)]
    res = {name: curve.residuals[:, j] for j, name in enumerate(names)}
    return res, conds, curve.dropped


# ---------------------------------------------------------------------------
# cyclicity


def _multiples(F: HbElement, degree: int) -> np.ndarray:
    """Stacked coefficient columns of ``z^k f`` for ``k = 0..degree``."""
    pair = F.pair
    n = pair.length
    deg_f = F.f.degree
    if deg_f + degree > pair.truncation:
        raise DegreeOverflowError(
            f"degree {degree} + deg f {deg_f} exceeds truncation {pair.truncation}"
        )
    fc = F.f.coeffs
    cols = np.zeros((n, degree + 1), complex)
    for k in range(degree + 1):
        cols[k:, k] = fc[: n - k]
    plus = lift_many(cols, pair)
    return np.vstack([cols, plus])


def cyclicity_curve(F: HbElement, degree: int) -> np.ndarray:
    """``min_{deg p <= d} ||1 - p f||_b`` for every ``d = 0..degree``."""
    one = lift(HardyFunction([1.0]), F.pair)
    V = _multiples(F, degree)
    return projection_curve(V, one.stacked()).residuals[:, 0]


def cyclicity_residual(F: HbElement, degree: int) -> float:
    return float(cyclicity_curve(F, degree)[-1])


# ---------------------------------------------------------------------------
# approximants of z^n by kernels


@dataclass
class GrReport:
    n: int
    r: float
    series: HardyFunction
    bound: float
    checks: list  # (label, measured distance, allowed, passed)

    @property
    def passed(self) -> bool:
        return all(c[3] for c in self.checks)


def gr_series(n: int, r: float, length: int) -> HardyFunction:
    """``sum_{l>=1} r^{(l-1) n} z^{l n}`` truncated to ``length`` coefficients."""
    c = np.zeros(length, complex)
    idx = np.arange(n, length, n)
    c[idx] = r ** (idx - n).astype(float)
    return HardyFunction(c)


def gr_from_kernels(n: int, r: float, length: int) -> HardyFunction:
    """The same function assembled from the kernel average at the n-th roots of unity."""
    root = np.exp(2j * np.pi / n)
    acc = np.zeros(length, complex)
    for j in range(n):
        acc += HardyFunction.kernel(np.conj(r * root**j), length).coeffs
    acc[0] -= n
    return HardyFunction(acc / (n * r**n))


def gr_bound(n: int, r: float, norm_shift: float) -> float:
    x = r**n * norm_shift**n
    return r**n * norm_shift ** (2 * n) / (1 - x)


def gr_approximant(n: int, r: float, pair: PythagoreanPair, tests=None) -> GrReport:
    """
    The approximant ``g_r`` of ``z^n`` and per-vector checks of
    ``||(g_r - z^n) h||_b <= bound * ||h||_b``.

    Only the action on the test vectors is checked, which is weaker than
    the multiplier-norm statement.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    s = shift_norm(pair)
    if not 0 < r < 1 / s:
        raise DivergenceError(f"need 0 < r < 1/||S_b|| = {1 / s:.6f}, got {r}")
    length = pair.length
    series = gr_series(n, r, length)
    bound = gr_bound(n, r, s)
    if tests is None:
        from .core import kernel

        tests = {
            "1": lift(HardyFunction([1.0]), pair),
            "k^b_0.4": kernel(0.4, "hb", pair),
        }
    diff = series - HardyFunction.monomial(n)
    checks = []
    for label, h in tests.items():
        prod = fit_length(series_product(diff.coeffs, h.f.coeffs), length)
        dist = hb_norm(lift(HardyFunction(prod), pair))
        allowed = bound * hb_norm(h) + 1e-8
        checks.append((label, dist, allowed, bool(dist <= allowed)))
    return GrReport(n, r, series, bound, checks)


# ---------------------------------------------------------------------------
# invariance of kernel spans under the shift


def shift_recurrence_check(F: HbElement, lam) -> float:
    """
    ``||S_b(f k) + (f - f k) / conj(lam)||_b`` with ``k = k_lam``; vanishes
    identically since ``z k_lam = -(1 - k_lam) / conj(lam)``.
    """
    lam = complex(lam)
    if lam == 0:
        raise InputError("lambda must be nonzero")
    fk = product_kernel_lift(F, lam)
    return hb_norm(shift_apply(fk) + (F - fk) * (1 / np.conj(lam)))


# ---------------------------------------------------------------------------
# classifiers


@dataclass
class BoundednessVerdict:
    bounded: bool
    sup_estimate: float
    sups: list
    reason: str


def hypothesis_bf_bounded(F: HbElement, levels: int = 3, eps: float = 1e-12):
    """
    Is ``b/f`` bounded on the circle?  The grid sup is tracked over
    ``levels`` successive grid doublings; growth by more than a factor two,
    or a zero of ``f`` at a grid point where ``b`` is not small, flags it as
    unbounded.
    """
    pair = F.pair
    if not np.any(F.f.coeffs):
        raise InputError("f must not vanish identically")
    sups = []
    reason = "stable under refinement"
    floored = False
    for k in range(levels + 1):
        size = pair.grid.size * 2**k
        fv = np.abs(F.f.on_grid(size))
        bv = np.abs(pair.b.on_grid(size))
        hit = (fv < eps) & (bv > np.sqrt(eps))
        floored |= bool(hit.any())
        sups.append(float(np.max(bv / np.maximum(fv, eps))))
    bounded = True
    if floored:
        bounded, reason = False, "f vanishes at a grid point where b does not"
    elif sups[-1] > 2 * sups[0]:
        bounded, reason = False, "sup grows under grid refinement"
    return BoundednessVerdict(bounded, sups[-1], sups, reason)


@dataclass
class CyclicityVerdict:
    case: str
    cyclic: bool
    evidence: dict


def classify_one_minus_cb(c, pair: PythagoreanPair, tol: float = 1e-12):
    """Classify ``1 - c b`` into the cases of the cyclicity criterion."""
    c = complex(c)
    m = abs(c)
    if m < 1 - tol:
        return CyclicityVerdict(
            "modulus_lt_1", True, {"inf_lower_bound": 1 - m}
        )
    if abs(m - 1) <= tol:
        cd = clark(np.conj(c), pair)
        ev = {
            "total_mass": cd.total_mass,
            "ac_mass": cd.ac_mass,
            "singular_mass": cd.singular_mass,
        }
        if cd.absolutely_continuous:
            return CyclicityVerdict("unimodular_ac", True, ev)
        return CyclicityVerdict("unimodular_singular", False, ev)
    h = HardyFunction([1.0]) - pair.b * c
    d = outer_defect(h, pair.grid)
    ev = {"outer_defect": d}
    if d >= OUTER_THRESHOLD:
        return CyclicityVerdict("modulus_gt_1_outer", True, ev)
    return CyclicityVerdict("modulus_gt_1_not_outer", False, ev)


def is_numerically_outer(f: HardyFunction, grid: GridSpec | None = None) -> bool:
    return outer_defect(f, grid) >= OUTER_THRESHOLD


# ---------------------------------------------------------------------------
# reports


@dataclass
class CompletenessReport:
    family: str
    sizes: list
    gram_condition: list
    residuals: dict
    flags: dict = field(default_factory=dict)  # N -> list of flags
    verdicts: dict = field(default_factory=dict)
    partial_blaschke_sums: list = field(default_factory=list)
    cap: float = LAMBDA_MAX
    n_capped: int = 0
    notes: list = field(default_factory=list)
    provenance: str = ""

    def rows(self):
        """Rows ordered by N, then target."""
        for i, n in enumerate(self.sizes):
            for target in self.residuals:
                yield {
                    "N": n,
                    "target": target,
                    "residual": self.residuals[target][i],
                    "gram_condition": self.gram_condition[i],
                    "flags": ";".join(self.flags.get(n, [])),
                }

    def to_csv(self, fh=None, provenance: str | None = None) -> str:
        prov = self.provenance if provenance is None else provenance
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "target", "residual", "gram_condition", "flags", "provenance"])
        for row in self.rows():
            w.writerow(
                [
                    row["N"],
                    row["target"],
                    f"{row['residual']:.12e}",
                    f"{row['gram_condition']:.6e}",
                    row["flags"],
                    prov,
                ]
            )
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    def summary(self) -> str:
        lines = [f"family: {self.family}"]
        lines.append(f"cap: {self.cap} ({self.n_capped} points capped)")
        if self.partial_blaschke_sums:
            lines.append(
                f"partial Blaschke sum at N={self.sizes[-1]}: "
                f"{self.partial_blaschke_sums[-1]:.6f} (no divergence verdict)"
            )
        for target, res in self.residuals.items():
            lines.append(
                f"target {target}: residual {res[0]:.6e} (N={self.sizes[0]}) -> "
                f"{res[-1]:.6e} (N={self.sizes[-1]})"
            )
        for k, v in self.verdicts.items():
            lines.append(f"verdict {k}: {v}")
        lines.extend(f"note: {n}" for n in self.notes)
        if self.provenance:
            lines.append(f"provenance: {self.provenance}")
        return "\n".join(lines) + "\n"


def completeness_experiment(
    F: HbElement, points, N: int, targets: dict, family: str = "f k_lambda"
) -> CompletenessReport:
    seq = _as_sequence(points)
    res, conds, dropped = span_residual_curve(targets, F, seq, N)
    flags = {}
    for n, c in zip(range(1, N + 1), conds):
        fl = []
        if c > GRAM_COND_MAX:
            fl.append("ill-conditioned")
        if n in dropped:
            fl.append("dependent-member")
        if fl:
            flags[n] = fl
    rep = CompletenessReport(
        family=f"{family}, points={seq.description}",
        sizes=list(range(1, N + 1)),
        gram_condition=conds,
        residuals={k: list(map(float, v)) for k, v in res.items()},
        flags=flags,
        partial_blaschke_sums=list(blaschke_partial_sums(seq, N)),
        cap=seq.cap,
        n_capped=0 if seq.capped is None else int(seq.capped[:N].sum()),
    )
    rep.notes.append(
        "completeness is qualitative; residual decay is reported, not certified"
    )
    return rep


def default_targets(pair: PythagoreanPair) -> dict:
    return {
        "1": lift(HardyFunction([1.0]), pair),
        "z": lift(HardyFunction([0.0, 1.0]), pair),
        "b": lift(pair.b, pair),
    }


def a_density_experiment(points, pair: PythagoreanPair, N: int) -> CompletenessReport:
    """Completeness of ``{a k_lambda_n}``, i.e. density of ``a H^2`` in H(b)."""
    A = lift(pair.a, pair)
    rep = completeness_experiment(A, points, N, default_targets(pair), family="a k_lambda")
    b0 = abs(complex(pair.b.coeffs[0]))
    if b0 < 1e-12:
        cd = clark(1.0, pair)
        rep.verdicts["clark_mu_1"] = (
            "absolutely continuous" if cd.absolutely_continuous else "has singular part"
        )
    rep.notes.append(
        "rigidity of F_alpha^2 is not decided numerically; residual decay is a surrogate"
    )
    return rep
