"""
Numerical calculus for de Branges-Rovnyak spaces H(b), b non-extreme.

An element of H(b) is carried as a triple ``(f, f_plus, g)`` with

    T_conj(b) f = T_conj(a) f_plus,
    conj(b) f = conj(a) f_plus + conj(z g)   on the circle,

so that ``||f||_b^2 = ||f||_2^2 + ||f_plus||_2^2``.  Everything is computed
on coefficient arrays of length ``M + 1``, where ``M`` is the truncation of
the pair's grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .circle import (
    DEFAULT_EPS,
    GridSpec,
    HardyFunction,
    fit_length,
    kernel_coefficients,
    outer_from_modulus,
    analyze,
    series_divide,
    series_product,
    spectral_factor,
)
from .errors import (
    ConditioningError,
    DegenerateSymbolError,
    DegreeOverflowError,
    InputError,
    InvariantError,
    NotInHbError,
    NotNonExtremeError,
    PairMismatchError,
    SingularityError,
)

LAMBDA_MAX = 0.95
#: damping of the finite-section solve: minimises |Ax - y|^2 + DAMPING^2 |x|^2
DAMPING = 1e-10
#: polynomial symbols up to this degree are factored exactly
FACTOR_MAX_DEGREE = 64
AC_RELATIVE_TOL = 1e-3


def _check_lambda(lam, lambda_max=LAMBDA_MAX):
    lam = complex(lam)
    if abs(lam) > lambda_max:
        raise ConditioningError(f"|lambda| = {abs(lam):.4f} exceeds {lambda_max}")
    return lam


def _upper_toeplitz(c: np.ndarray, n: int) -> np.ndarray:
    """Finite section of ``T_conj(c)``: entry (i, j) is ``conj(c[j - i])``."""
    row = fit_length(np.conj(c), n)
    col = np.zeros(n, complex)
    col[0] = row[0]
    return scipy.linalg.toeplitz(col, row)


def _hankel(c: np.ndarray, n: int) -> np.ndarray:
    """Entry (m, j) is ``c[m + j + 1]`` (zero past the truncation)."""
    first = fit_length(c[1:], n)
    return scipy.linalg.hankel(first, np.zeros(n, complex))


# ---------------------------------------------------------------------------
# Pythagorean pairs


@dataclass(frozen=True, eq=False)
class PythagoreanPair:
    """
    A symbol ``b`` and its outer mate ``a`` with ``a(0) > 0`` and
    ``|a|^2 + |b|^2 = 1`` on the circle.

    ``eps_zone`` lists the grid indices where ``1 - |b|^2`` was floored;
    they are excluded from sup-norm checks.
    """

    b: HardyFunction
    a: HardyFunction
    grid: GridSpec
    eps_zone: np.ndarray = field(repr=False)
    method: str = "factor"
    lambda_max: float = LAMBDA_MAX
    label: str = ""

    @property
    def truncation(self) -> int:
        return self.grid.truncation

    @property
    def length(self) -> int:
        return self.grid.truncation + 1

    def b_at(self, z):
        return self.b(z)

    def a_at(self, z):
        return self.a(z)

    def pythagorean_residual(self) -> float:
        """Max of ``||a|^2 + |b|^2 - 1|`` over grid points outside the eps-zone."""
        n = self.grid.size
        r = np.abs(self.a.on_grid(n)) ** 2 + np.abs(self.b.on_grid(n)) ** 2 - 1
        keep = np.ones(n, bool)
        keep[self.eps_zone] = False
        return float(np.abs(r[keep]).max())

    # cached linear algebra; the pair is immutable so caching is safe

    @cached_property
    def tb(self) -> np.ndarray:
        return _upper_toeplitz(self.b.coeffs, self.length)

    @cached_property
    def ta(self) -> np.ndarray:
        return _upper_toeplitz(self.a.coeffs, self.length)

    @cached_property
    def hb(self) -> np.ndarray:
        return _hankel(self.b.coeffs, self.length)

    @cached_property
    def ha(self) -> np.ndarray:
        return _hankel(self.a.coeffs, self.length)

    @cached_property
    def _svd(self):
        u, s, vh = np.linalg.svd(self.ta)
        return u, s, vh

    def solve_plus(self, rhs: np.ndarray) -> np.ndarray:
        """Damped least-squares solution of ``T_conj(a) x = rhs`` (columns of rhs)."""
        u, s, vh = self._svd
        filt = s / (s**2 + DAMPING**2)
        y = u.conj().T @ rhs
        y = filt[:, None] * y if y.ndim == 2 else filt * y
        return vh.conj().T @ y

    def residual(self, f: np.ndarray, fp: np.ndarray) -> float:
        return float(np.linalg.norm(self.tb @ f - self.ta @ fp))

    def g_part(self, f: np.ndarray, fp: np.ndarray) -> np.ndarray:
        """Analytic ``g`` with ``conj(z g)`` the anti-analytic part of ``conj(b) f - conj(a) fp``."""
        return self.hb @ np.conj(f) - self.ha @ np.conj(fp)

    def __repr__(self):
        return f"PythagoreanPair({self.label or 'b'}, N={self.grid.size}, M={self.truncation})"


def _pair_checks(b: HardyFunction, grid: GridSpec, eps: float):
    if b.degree == 0:
        raise InputError("the symbol b must be non-constant")
    vals = b.on_grid(grid.size)
    sup = np.abs(vals).max()
    if sup > 1 + 1e-9:
        raise InputError(f"sup |b| on the grid is {sup:.12f} > 1")
    defect = 1 - np.abs(vals) ** 2
    zone = np.nonzero(defect < eps)[0]
    if zone.size > 0.5 * grid.size:
        raise NotNonExtremeError(
            f"1 - |b|^2 is floored on {zone.size / grid.size:.0%} of the grid"
        )
    return defect, zone


def mate(
    b: HardyFunction,
    grid: GridSpec | None = None,
    *,
    method: str = "auto",
    eps: float = DEFAULT_EPS,
    lambda_max: float = LAMBDA_MAX,
    label: str = "",
) -> PythagoreanPair:
    """
    Pythagorean mate of ``b``.

    ``method="factor"`` factors the trigonometric polynomial ``1 - |b|^2``
    through its roots and is exact for polynomial ``b``; ``method="grid"``
    builds the outer function from ``sqrt(1 - |b|^2)`` on the grid.  The
    default picks ``factor`` for polynomials of degree at most 64.
    """
    grid = grid or GridSpec()
    b = HardyFunction(fit_length(b.coeffs, grid.truncation + 1, what="symbol b"))
    defect, zone = _pair_checks(b, grid, eps)
    deg = b.degree
    if method == "auto":
        method = "factor" if deg <= FACTOR_MAX_DEGREE else "grid"
    if method == "factor":
        if deg > FACTOR_MAX_DEGREE:
            raise InputError(f"exact factorisation needs degree <= {FACTOR_MAX_DEGREE}")
        bc = b.coeffs[: deg + 1]
        r = -np.correlate(bc, bc, "full")
        r[deg] += 1.0
        a = HardyFunction(fit_length(spectral_factor(r), grid.truncation + 1))
    elif method == "grid":
        w = analyze(np.sqrt(np.maximum(defect, eps)).astype(complex), grid)
        a = outer_from_modulus(w, eps=eps, zone=zone)
    else:
        raise InputError(f"unknown mate method {method!r}")
    return PythagoreanPair(b, a, grid, zone, method, lambda_max, label)


def mate_rational(
    numerator,
    denominator,
    grid: GridSpec | None = None,
    *,
    eps: float = DEFAULT_EPS,
    lambda_max: float = LAMBDA_MAX,
    label: str = "",
) -> PythagoreanPair:
    """Pythagorean pair for a rational symbol ``b = p/q`` (``q`` zero-free on the closed disk)."""
    grid = grid or GridSpec()
    p = np.trim_zeros(np.asarray(numerator, complex), "b")
    q = np.trim_zeros(np.asarray(denominator, complex), "b")
    if q.size == 0 or p.size == 0:
        raise InputError("numerator and denominator must be nonzero")
    if q.size > 1 and np.abs(np.roots(q[::-1])).min() <= 1 + 1e-12:
        raise InputError("denominator must not vanish on the closed unit disk")
    length = grid.truncation + 1
    b = HardyFunction(series_divide(p, q, length))
    _, zone = _pair_checks(b, grid, eps)
    e = max(p.size, q.size)
    p_, q_ = fit_length(p, e), fit_length(q, e)
    r = np.correlate(q_, q_, "full") - np.correlate(p_, p_, "full")
    s = spectral_factor(r)
    a = series_divide(s, q, length)
    a *= np.exp(-1j * np.angle(a[0]))
    return PythagoreanPair(b, HardyFunction(a), grid, zone, "factor", lambda_max, label)


# ---------------------------------------------------------------------------
# elements of H(b)


@dataclass(frozen=True, eq=False)
class HbElement:
    """
    An element of H(b) as the triple ``(f, f_plus, g)``.

    ``lift_residual`` is the 2-norm of ``T_conj(b) f - T_conj(a) f_plus`` on
    the finite section; it also bounds the anti-analytic leakage of ``g``.
    """

    f: HardyFunction
    f_plus: HardyFunction
    g: HardyFunction
    pair: PythagoreanPair = field(repr=False)
    lift_residual: float = 0.0

    @classmethod
    def from_parts(cls, f: np.ndarray, fp: np.ndarray, pair: PythagoreanPair):
        return cls(
            HardyFunction(f),
            HardyFunction(fp),
            HardyFunction(pair.g_part(f, fp)),
            pair,
            pair.residual(f, fp),
        )

    def stacked(self) -> np.ndarray:
        """Isometric image in ``H^2 + H^2``: the H(b) norm is its 2-norm."""
        return np.concatenate([self.f.coeffs, self.f_plus.coeffs])

    def norm(self) -> float:
        return float(np.linalg.norm(self.stacked()))

    def inner(self, other: HbElement) -> complex:
        return hb_inner(self, other)

    def boundary_residual(self) -> float:
        """``||conj(b) f - conj(a) f_plus - conj(z g)||_2`` from Laurent coefficients."""
        p = self.pair
        n = p.length
        # index i of acc holds mode i - (n - 1)
        acc = np.zeros(2 * n - 1, complex)
        for sym, vec in ((p.b.coeffs, self.f.coeffs), (p.a.coeffs, -self.f_plus.coeffs)):
            acc += series_product(np.conj(sym[::-1]), vec)[: 2 * n - 1]
        # conj(z g) has coefficient conj(g_m) at mode -(m + 1)
        idx = (n - 2) - np.arange(n - 1)
        acc[idx] -= np.conj(self.g.coeffs[: n - 1])
        return float(np.linalg.norm(acc))

    def check(self) -> dict:
        """Evaluate the element invariants; raise :class:`InvariantError` on failure."""
        scale = 1 + self.f.norm()
        diag = {
            "lift_residual": self.lift_residual,
            "boundary_residual": self.boundary_residual(),
        }
        if diag["lift_residual"] > 1e-7 * scale:
            raise InvariantError(f"lift residual {diag['lift_residual']:.2e} too large")
        if diag["boundary_residual"] > 1e-6 * scale:
            raise InvariantError(
                f"boundary identity residual {diag['boundary_residual']:.2e} too large"
            )
        return diag

    def _combine(self, other, sign):
        _same_pair(self, other)
        f = self.f.coeffs + sign * other.f.coeffs
        fp = self.f_plus.coeffs + sign * other.f_plus.coeffs
        return HbElement.from_parts(f, fp, self.pair)

    def __add__(self, other):
        return self._combine(other, 1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __mul__(self, scalar):
        s = complex(scalar)
        return HbElement(
            self.f * s, self.f_plus * s, self.g * s, self.pair, abs(s) * self.lift_residual
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1


def _same_pair(F, G):
    if F.pair is not G.pair:
        raise PairMismatchError("elements belong to different Pythagorean pairs")


def lift(f: HardyFunction, pair: PythagoreanPair, *, tol: float = 1e-4) -> HbElement:
    """
    Solve ``T_conj(b) f = T_conj(a) f_plus`` for ``f_plus`` on the finite section.

    Raises :class:`NotInHbError` when the residual exceeds
    ``tol * (1 + ||f||_2)``, i.e. ``f`` is not in H(b) at this resolution.
    """
    fc = fit_length(f.coeffs, pair.length, what="f")
    fp = pair.solve_plus(pair.tb @ fc)
    el = HbElement.from_parts(fc, fp, pair)
    if el.lift_residual > tol * (1 + np.linalg.norm(fc)):
        raise NotInHbError(
            f"lift residual {el.lift_residual:.2e}: f is not in H(b) at this truncation"
        )
    return el


def lift_many(columns: np.ndarray, pair: PythagoreanPair) -> np.ndarray:
    """Plus parts for several coefficient vectors at once (columns in, columns out)."""
    return pair.solve_plus(pair.tb @ columns)


def hb_inner(F: HbElement, G: HbElement) -> complex:
    """``<F, G>_b = <f, g>_2 + <f_plus, g_plus>_2`` (linear in the first slot)."""
    _same_pair(F, G)
    return complex(np.vdot(G.stacked(), F.stacked()))


def hb_norm(F: HbElement) -> float:
    return F.norm()


# ---------------------------------------------------------------------------
# kernels and point evaluations


def kernel(lam, kind: str, pair: PythagoreanPair) -> HbElement:
    """
    Lifted kernel element.

    kind
        ``"cauchy"`` for ``k_lam``, ``"b_cauchy"`` for ``b k_lam`` and
        ``"hb"`` for the reproducing kernel ``(1 - conj(b(lam)) b) k_lam``.
    """
    lam = _check_lambda(lam, pair.lambda_max)
    n = pair.length
    k = kernel_coefficients(lam, n)
    if kind == "cauchy":
        ratio = np.conj(pair.b(lam)) / np.conj(pair.a(lam))
        return HbElement.from_parts(k, ratio * k, pair)
    bk = series_product(pair.b.coeffs, k, n)
    if kind == "b_cauchy":
        return lift(HardyFunction(bk), pair)
    if kind == "hb":
        return lift(HardyFunction(k - np.conj(pair.b(lam)) * bk), pair)
    raise InputError(f"unknown kernel kind {kind!r}")


def eval_functionals(F: HbElement, lam) -> tuple[complex, complex]:
    """``(<F, k_lam>_b, <F, b k_lam>_b)`` from point values of ``f`` and ``f_plus``."""
    lam = _check_lambda(lam, F.pair.lambda_max)
    a_lam = complex(F.pair.a(lam))
    if abs(a_lam) <= 1e-10:
        raise SingularityError(f"a({lam}) = {a_lam} is numerically zero")
    fp = complex(F.f_plus(lam))
    b_lam = complex(F.pair.b(lam))
    return complex(F.f(lam)) + b_lam / a_lam * fp, fp / a_lam


def product_kernel_lift(F: HbElement, lam) -> HbElement:
    """
    Element for ``f k_lam`` with plus part in closed form,

        (f k_lam)_plus = (f_plus + conj(lam g(lam)) / conj(a(lam))) k_lam,

    so no Toeplitz solve is needed.
    """
    pair = F.pair
    lam = _check_lambda(lam, pair.lambda_max)
    if lam == 0:
        # k_0 = 1: the element itself, bit for bit
        return HbElement(F.f, F.f_plus, F.g, pair, F.lift_residual)
    n = pair.length
    k = kernel_coefficients(lam, n)
    fk = fit_length(series_product(F.f.coeffs, k), n, what="f k_lambda")
    shift = np.conj(lam * F.g(lam)) / np.conj(pair.a(lam))
    plus = F.f_plus.coeffs.copy()
    plus[0] += shift
    fpk = fit_length(series_product(plus, k), n, what="(f k_lambda)+")
    return HbElement.from_parts(fk, fpk, pair)


# ---------------------------------------------------------------------------
# Clark data


@dataclass(frozen=True, eq=False)
class ClarkData:
    """
    Mass bookkeeping for the Clark measure ``mu_alpha``.

    ``density = |F_alpha|^2`` is the absolutely continuous density,
    ``total_mass`` comes from the Clark identity at the origin and the
    difference is the singular mass.
    """

    alpha: complex
    F_alpha: HardyFunction
    density: object
    total_mass: float
    ac_mass: float
    singular_mass: float

    @property
    def absolutely_continuous(self) -> bool:
        return self.singular_mass <= AC_RELATIVE_TOL * self.total_mass


def clark(alpha, pair: PythagoreanPair) -> ClarkData:
    alpha = complex(alpha)
    if abs(abs(alpha) - 1) > 1e-12:
        raise InputError(f"alpha must be unimodular, got |alpha| = {abs(alpha)}")
    n = pair.length
    den = -np.conj(alpha) * pair.b.coeffs
    den[0] += 1
    vals = np.abs(HardyFunction(den).on_grid(pair.grid.size))
    if np.mean(vals < 1e-8) > 0.5:
        raise DegenerateSymbolError("1 - conj(alpha) b vanishes on most of the circle")
    F = HardyFunction(series_divide(pair.a.coeffs, np.trim_zeros(den, "b"), n))
    density = analyze(np.abs(F.on_grid(pair.grid.size)) ** 2 + 0j, pair.grid)
    b0 = complex(pair.b.coeffs[0])
    total = (1 - abs(b0) ** 2) / abs(1 - np.conj(alpha) * b0) ** 2
    ac = float(density.mean().real)
    return ClarkData(alpha, F, density, float(total), ac, float(total - ac))


@dataclass(frozen=True)
class KernelCombination:
    """Finite combination ``sum_j weights[j] k_{points[j]}`` in H^2."""

    weights: tuple
    points: tuple

    def __post_init__(self):
        if len(self.weights) != len(self.points):
            raise InputError("weights and points must have equal length")
        object.__setattr__(self, "weights", tuple(complex(w) for w in self.weights))
        object.__setattr__(self, "points", tuple(complex(p) for p in self.points))

    @classmethod
    def single(cls, mu, weight=1.0):
        return cls((weight,), (mu,))

    def norm(self) -> float:
        w = np.array(self.weights)
        mu = np.array(self.points)
        gram = 1.0 / (1.0 - np.conj(mu)[None, :] * mu[:, None])
        return float(np.sqrt(np.real(np.conj(w) @ gram @ w)))

    def coefficients(self, length: int) -> np.ndarray:
        out = np.zeros(length, complex)
        for w, mu in zip(self.weights, self.points):
            out += w * kernel_coefficients(mu, length)
        return out


def clark_isometry(alpha, h: KernelCombination, pair: PythagoreanPair) -> HbElement:
    """Image of ``h`` under ``T_{1 - conj(alpha) b} T_{conj(F_alpha)}``."""
    alpha = complex(alpha)
    n = pair.length
    inner = np.zeros(n, complex)
    for w, mu in zip(h.weights, h.points):
        mu = _check_lambda(mu, pair.lambda_max)
        F_mu = pair.a(mu) / (1 - np.conj(alpha) * pair.b(mu))
        inner += w * np.conj(F_mu) * kernel_coefficients(mu, n)
    fac = -np.conj(alpha) * pair.b.coeffs
    fac[0] += 1
    f = fit_length(series_product(fac, inner), n, what="Clark image")
    return lift(HardyFunction(f), pair)


# ---------------------------------------------------------------------------
# the shift


def shift_norm(pair: PythagoreanPair) -> float:
    """Operator norm of the shift on H(b): ``sqrt(1 - |b(0)|^2) / |a(0)|``."""
    b0 = complex(pair.b.coeffs[0])
    return float(np.sqrt(1 - abs(b0) ** 2) / abs(pair.a.coeffs[0]))


def shift_apply(F: HbElement) -> HbElement:
    n = F.pair.length
    zf = fit_length(F.f.shifted(1).coeffs, n, what="z f")
    return lift(HardyFunction(zf), F.pair)


def monomial_plus_parts(pair: PythagoreanPair, degree: int) -> np.ndarray:
    """Columns ``(z^k)_plus`` for ``k = 0..degree``."""
    if degree + 1 > pair.length:
        raise DegreeOverflowError(f"degree {degree} exceeds truncation {pair.truncation}")
    eye = np.eye(pair.length, degree + 1, dtype=complex)
    return lift_many(eye, pair)


def monomial_gram(pair: PythagoreanPair, degree: int) -> np.ndarray:
    """H(b) Gram matrix ``G[i, j] = <z^i, z^j>_b`` for ``i, j <= degree``."""
    x = monomial_plus_parts(pair, degree)
    return (np.eye(degree + 1) + x.T @ x.conj())


def finite_section_shift_norm(pair: PythagoreanPair, degree: int) -> float:
    """
    Norm of the shift restricted to polynomials of degree ``<= degree``,
    measured in the H(b) geometry.
    """
    if degree + 2 > pair.length:
        raise DegreeOverflowError("no headroom for the shift at this degree")
    g = monomial_gram(pair, degree + 1)
    g0 = g[:-1, :-1]
    g1 = g[1:, 1:]
    # <z p, z q>_b against <p, q>_b; use the conjugate (column-linear) forms
    w = scipy.linalg.eigh(g1.conj(), g0.conj(), eigvals_only=True)
    return float(np.sqrt(max(w.max(), 0.0)))
