"""
Discrete harmonic analysis on the unit circle.

Functions on the circle are sampled on the uniform grid
``zeta_j = exp(2*pi*i*j/N)`` and carried together with their discrete
Fourier coefficients.  Analytic functions are carried as truncated power
series.  All objects are immutable; every routine is a pure function.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import signal

from .errors import (
    ConditioningError,
    DegreeOverflowError,
    InputError,
    LogIntegrabilityError,
)

DEFAULT_SIZE = 4096
DEFAULT_EPS = 1e-12
#: relative size below which trailing coefficients count as numerically zero
TAIL_TOL = 1e-13


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of ``size`` points; modes ``|n| <= truncation`` are retained."""

    size: int = DEFAULT_SIZE
    truncation: int | None = None

    def __post_init__(self):
        n = int(self.size)
        if n < 2 or n & (n - 1):
            raise InputError(f"grid size must be a power of two, got {self.size}")
        m = n // 4 if self.truncation is None else int(self.truncation)
        if not 1 <= m <= n // 2:
            raise InputError(f"truncation must lie in [1, {n // 2}], got {m}")
        object.__setattr__(self, "size", n)
        object.__setattr__(self, "truncation", m)

    @property
    def points(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.size) / self.size)

    @property
    def angles(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.size) / self.size

    def refined(self, factor: int = 2) -> GridSpec:
        return GridSpec(self.size * factor, self.truncation)


# ---------------------------------------------------------------------------
# boundary functions


@dataclass(frozen=True, eq=False)
class BoundaryFunction:
    """
    Samples of a function on the circle together with its Fourier data.

    ``spectrum`` holds all ``N`` discrete Fourier coefficients in numpy FFT
    order, normalised so that ``spectrum[n]`` approximates ``f^(n)``.  The
    retained window ``-M..M`` is exposed through :attr:`coeffs`.
    """

    grid: GridSpec
    samples: np.ndarray
    spectrum: np.ndarray = field(repr=False)

    @property
    def modes(self) -> np.ndarray:
        m = self.grid.truncation
        return np.arange(-m, m + 1)

    @property
    def coeffs(self) -> np.ndarray:
        """Fourier coefficients for modes ``-M..M`` (index ``n + M``)."""
        return self.spectrum[self.modes % self.grid.size]

    def coeff(self, n: int) -> complex:
        if abs(n) > self.grid.truncation:
            return 0j
        return complex(self.spectrum[n % self.grid.size])

    def norm(self) -> float:
        """L2 norm with respect to normalised arc length."""
        return float(np.sqrt(np.mean(np.abs(self.samples) ** 2)))

    def mean(self) -> complex:
        return complex(np.mean(self.samples))

    def conj(self) -> BoundaryFunction:
        return analyze(np.conj(self.samples), self.grid)

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.samples).max(), 1.0)
        return bool(np.abs(self.samples.imag).max() <= tol * scale)

    def band_excess(self) -> float:
        """Energy carried by modes outside the retained window."""
        keep = np.zeros(self.grid.size, bool)
        keep[self.modes % self.grid.size] = True
        return float(np.sqrt(np.sum(np.abs(self.spectrum[~keep]) ** 2)))

    def __mul__(self, other):
        if isinstance(other, BoundaryFunction):
            _same_grid(self, other)
            return analyze(self.samples * other.samples, self.grid)
        return analyze(self.samples * other, self.grid)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, BoundaryFunction):
            _same_grid(self, other)
            return analyze(self.samples + other.samples, self.grid)
        return analyze(self.samples + other, self.grid)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, BoundaryFunction):
            _same_grid(self, other)
            return analyze(self.samples - other.samples, self.grid)
        return analyze(self.samples - other, self.grid)

    def __neg__(self):
        return analyze(-self.samples, self.grid)


def _same_grid(f, g):
    if f.grid != g.grid:
        raise InputError("boundary functions live on different grids")


def analyze(samples, grid: GridSpec | None = None) -> BoundaryFunction:
    """Discrete Fourier analysis of grid samples."""
    grid = grid or GridSpec()
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != (grid.size,):
        raise InputError(
            f"expected {grid.size} samples, got array of shape {samples.shape}"
        )
    spectrum = np.fft.fft(samples) / grid.size
    return BoundaryFunction(grid, samples.copy(), spectrum)


def synthesize(f: BoundaryFunction) -> np.ndarray:
    """Inverse of :func:`analyze`: grid samples from the full spectrum."""
    return np.fft.ifft(f.spectrum) * f.grid.size


def from_coefficients(coeffs, grid: GridSpec | None = None, lowest: int = 0):
    """
    Boundary function with prescribed Fourier coefficients.

    ``coeffs[k]`` is the coefficient of mode ``lowest + k``.
    """
    grid = grid or GridSpec()
    coeffs = np.asarray(coeffs, dtype=complex)
    modes = lowest + np.arange(coeffs.size)
    if coeffs.size and (modes.min() <= -grid.size // 2 or modes.max() >= grid.size // 2):
        raise DegreeOverflowError("modes exceed the grid's Nyquist range")
    spectrum = np.zeros(grid.size, complex)
    np.add.at(spectrum, modes % grid.size, coeffs)
    samples = np.fft.ifft(spectrum) * grid.size
    return BoundaryFunction(grid, samples, spectrum)


def from_function(func, grid: GridSpec | None = None) -> BoundaryFunction:
    """Sample a vectorised callable on the grid."""
    grid = grid or GridSpec()
    return analyze(func(grid.points), grid)


# ---------------------------------------------------------------------------
# truncated power series


@dataclass(frozen=True, eq=False)
class HardyFunction:
    """Truncated power series ``sum_n coeffs[n] z**n``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.ndim != 1:
            raise InputError("power series coefficients must be one dimensional")
        if c.size == 0:
            c = np.zeros(1, complex)
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def monomial(cls, n: int, scale: complex = 1.0) -> HardyFunction:
        c = np.zeros(n + 1, complex)
        c[n] = scale
        return cls(c)

    @classmethod
    def constant(cls, value: complex) -> HardyFunction:
        return cls([value])

    @classmethod
    def kernel(cls, lam: complex, length: int) -> HardyFunction:
        """Cauchy kernel ``1/(1 - conj(lam) z)`` truncated to ``length`` terms."""
        return cls(kernel_coefficients(lam, length))

    @classmethod
    def rational(cls, numerator, denominator, length: int) -> HardyFunction:
        return cls(series_divide(numerator, denominator, length))

    def __len__(self):
        return self.coeffs.size

    @property
    def degree(self) -> int:
        """Index of the last numerically nonzero coefficient."""
        return _effective_degree(self.coeffs)

    def trimmed(self) -> HardyFunction:
        return HardyFunction(self.coeffs[: self.degree + 1])

    def padded(self, length: int) -> np.ndarray:
        """Coefficients as an array of exactly ``length`` entries."""
        return fit_length(self.coeffs, length)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def on_grid(self, size: int) -> np.ndarray:
        """Values at the ``size`` uniform grid points (zero-padded transform)."""
        if self.coeffs.size > size:
            c = _alias(self.coeffs, size)
        else:
            c = np.zeros(size, complex)
            c[: self.coeffs.size] = self.coeffs
        return np.fft.ifft(c) * size

    def boundary(self, grid: GridSpec | None = None) -> BoundaryFunction:
        grid = grid or GridSpec()
        if self.degree >= grid.size // 2:
            raise DegreeOverflowError(
                f"degree {self.degree} is not representable on a grid of {grid.size}"
            )
        return from_coefficients(self.coeffs[: self.degree + 1], grid)

    def __add__(self, other):
        other = _as_series(other)
        n = max(self.coeffs.size, other.coeffs.size)
        return HardyFunction(fit_length(self.coeffs, n) + fit_length(other.coeffs, n))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_series(other))

    def __rsub__(self, other):
        return _as_series(other) - self

    def __neg__(self):
        return HardyFunction(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, HardyFunction):
            return HardyFunction(series_product(self.coeffs, other.coeffs))
        return HardyFunction(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return HardyFunction(self.coeffs / complex(other))

    def shifted(self, k: int = 1) -> HardyFunction:
        """Multiplication by ``z**k``."""
        return HardyFunction(np.concatenate([np.zeros(k, complex), self.coeffs]))


def _as_series(x) -> HardyFunction:
    if isinstance(x, HardyFunction):
        return x
    return HardyFunction.constant(complex(x))


def _effective_degree(c: np.ndarray) -> int:
    mag = np.abs(c)
    top = mag.max() if mag.size else 0.0
    if top == 0:
        return 0
    nz = np.nonzero(mag > TAIL_TOL * 1e-3 * top)[0]
    return int(nz[-1])


def _alias(c: np.ndarray, size: int) -> np.ndarray:
    out = np.zeros(size, complex)
    np.add.at(out, np.arange(c.size) % size, c)
    return out


def fit_length(c, length: int, *, what: str = "power series") -> np.ndarray:
    """
    Pad or truncate coefficients to ``length`` entries.

    Truncation is only allowed when the discarded tail is negligible;
    otherwise :class:`DegreeOverflowError` is raised.
    """
    c = np.asarray(c, dtype=complex)
    if c.size <= length:
        out = np.zeros(length, complex)
        out[: c.size] = c
        return out
    tail = np.linalg.norm(c[length:])
    if tail > TAIL_TOL * max(np.linalg.norm(c), 1.0):
        raise DegreeOverflowError(
            f"{what} needs {c.size} coefficients but only {length} are retained "
            f"(discarded tail {tail:.2e})"
        )
    return c[:length].copy()


def kernel_coefficients(lam: complex, length: int) -> np.ndarray:
    return np.conj(complex(lam)) ** np.arange(length)


def series_product(c1, c2, length: int | None = None) -> np.ndarray:
    """Cauchy product of two coefficient arrays via a zero-padded FFT."""
    c1 = np.asarray(c1, dtype=complex)
    c2 = np.asarray(c2, dtype=complex)
    if min(c1.size, c2.size) <= 32:
        out = np.convolve(c1, c2)
    else:
        out = signal.fftconvolve(c1, c2)
    if length is not None:
        out = out[:length] if out.size >= length else fit_length(out, length)
    return out


def series_divide(num, den, length: int) -> np.ndarray:
    """First ``length`` power series coefficients of ``num/den`` (``den(0) != 0``)."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    if den.size == 0 or den[0] == 0:
        raise InputError("denominator must not vanish at the origin")
    impulse = np.zeros(length, complex)
    impulse[0] = 1.0
    return signal.lfilter(num, den, impulse)


def laurent_product(c1, lo1: int, c2, lo2: int):
    """Product of two Laurent polynomials; returns (coeffs, lowest mode)."""
    return signal.fftconvolve(np.asarray(c1, complex), np.asarray(c2, complex)), lo1 + lo2


# ---------------------------------------------------------------------------
# projections and transforms


def riesz_project(f: BoundaryFunction) -> HardyFunction:
    """Orthogonal projection onto the analytic modes ``0..M``."""
    return HardyFunction(f.spectrum[: f.grid.truncation + 1])


def toeplitz_apply(phi: BoundaryFunction, f: HardyFunction) -> HardyFunction:
    """
    ``T_phi f = P_+(phi f)`` for a symbol given on the grid.

    The product is formed exactly on the coefficient level (zero-padded
    transform), so no aliasing can occur; modes of the product above the
    truncation must vanish.
    """
    m = phi.grid.truncation
    if phi.band_excess() > TAIL_TOL * max(phi.norm(), 1.0):
        raise DegreeOverflowError("symbol is not band limited to the retained window")
    fc = fit_length(f.coeffs, m + 1)
    prod, lo = laurent_product(phi.coeffs, -m, fc, 0)
    analytic = prod[-lo:]
    high = analytic[m + 1 :]
    if high.size and np.linalg.norm(high) > TAIL_TOL * max(np.linalg.norm(analytic), 1.0):
        raise DegreeOverflowError(
            "combined bandwidth of symbol and function exceeds the truncation"
        )
    return HardyFunction(analytic[: m + 1])


def cauchy_transform(f: BoundaryFunction, z, delta: float = 0.05):
    """``Cf(z) = sum_{n>=0} f^(n) z^n`` over retained modes, for ``|z| <= 1 - delta``."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) > 1 - delta):
        raise ConditioningError(
            f"|z| = {np.abs(z).max():.4f} exceeds 1 - delta = {1 - delta}"
        )
    c = f.spectrum[: f.grid.truncation + 1]
    out = np.polynomial.polynomial.polyval(z, c)
    return complex(out) if out.ndim == 0 else out


def cauchy_boundary_values(f: BoundaryFunction) -> np.ndarray:
    """Boundary values of ``Cf`` as the analytic-mode partial sum on the grid."""
    n = f.grid.size
    c = np.zeros(n, complex)
    c[: f.grid.truncation + 1] = f.spectrum[: f.grid.truncation + 1]
    return np.fft.ifft(c) * n


def cauchy_boundary_identity_residual(f: BoundaryFunction) -> float:
    """Grid sup of ``|C(f) - f - f^(0) + conj(C(conj f))|``."""
    cf = cauchy_boundary_values(f)
    cfbar = cauchy_boundary_values(f.conj())
    r = cf - f.samples - f.coeff(0) + np.conj(cfbar)
    return float(np.abs(r).max())


def conjugate_function(u: BoundaryFunction) -> BoundaryFunction:
    """Harmonic conjugate: ``v^(n) = -i sign(n) u^(n)``, ``v^(0) = 0``."""
    if not u.is_real():
        raise InputError("conjugate_function expects a real-valued function")
    n = u.grid.size
    k = np.fft.fftfreq(n, 1.0 / n)
    mult = -1j * np.sign(k)
    mult[n // 2] = 0.0
    spec = u.spectrum * mult
    samples = (np.fft.ifft(spec) * n).real
    return analyze(samples.astype(complex), u.grid)


def analytic_completion(u: BoundaryFunction) -> np.ndarray:
    """Analytic-mode coefficients of ``u + i*v`` for real ``u`` (length ``N//2 + 1``)."""
    n = u.grid.size
    c = u.spectrum[: n // 2 + 1].copy()
    c[1 : n // 2] *= 2
    return c


def _correct_isolated_zeros(logm, mod, zone, eps):
    n = mod.size
    inzone = np.zeros(n, bool)
    inzone[zone] = True
    for j in zone:
        ring1 = [(j - 1) % n, (j + 1) % n]
        ring2 = [(j - 2) % n, (j + 2) % n]
        if inzone[ring1 + ring2].any() or mod[ring1 + ring2].min() < eps:
            continue  # not isolated: keep the floor
        w1 = np.sqrt(mod[ring1[0]] * mod[ring1[1]])
        w2 = np.sqrt(mod[ring2[0]] * mod[ring2[1]])
        p = np.log(w2 / w1) / np.log(2)
        if 0 < p <= 8:
            logm[j] = np.log(w1) - p * np.log(2 * np.pi)


def outer_from_modulus(
    w: BoundaryFunction,
    eps: float = DEFAULT_EPS,
    return_zone: bool = False,
    zone=None,
):
    """
    Outer function with prescribed boundary modulus.

    ``O = exp(u + i v)`` where ``u = log max(w, eps)`` and ``v`` is its
    harmonic conjugate.  Grid points where ``w < eps`` form the eps-zone.

    Parameters
    ----------
    w : BoundaryFunction
        Nonnegative modulus samples.
    eps : float
        Floor applied before taking logarithms.
    return_zone : bool
        Also return the indices of floored grid points.
    zone : array of int, optional
        Grid indices to treat as zeros of ``w``; defaults to ``w < eps``.

    Returns
    -------
    outer : HardyFunction
        Coefficients ``0..M``, normalised so that ``outer(0) > 0``.
    zone : ndarray of int, optional

    Notes
    -----
    An isolated zero at a grid point would contribute ``log(eps)`` to the
    mean of ``log w``.  Instead its log sample is set so the quadrature is
    exact for a factor ``|1 - zeta|^p``: with ``w_1`` the geometric mean of
    the two neighbouring samples and ``p`` estimated from the next ring,
    the sample becomes ``log w_1 - p log(2 pi)`` (from
    ``prod_{j=1}^{N-1} |1 - omega^j| = N``).
    """
    vals = w.samples
    scale = max(np.abs(vals).max(), 1.0)
    if np.abs(vals.imag).max() > 1e-12 * scale or vals.real.min() < -1e-12 * scale:
        raise InputError("modulus must be real and nonnegative")
    mod = vals.real
    zone = np.nonzero(mod < eps)[0] if zone is None else np.asarray(zone, int)
    if zone.size > 0.5 * w.grid.size:
        raise LogIntegrabilityError(
            f"modulus vanishes on {zone.size / w.grid.size:.0%} of the grid"
        )
    logm = np.log(np.maximum(mod, eps))
    _correct_isolated_zeros(logm, mod, zone, eps)
    logw = analyze(logm.astype(complex), w.grid)
    n = w.grid.size
    c = np.zeros(n, complex)
    c[: n // 2 + 1] = analytic_completion(logw)
    c[0] = logw.spectrum[0].real
    values = np.exp(np.fft.ifft(c) * n)
    coeffs = np.fft.fft(values)[: w.grid.truncation + 1] / n
    # mean of log w fixes O(0); strip the round-off phase
    coeffs *= np.exp(-1j * np.angle(coeffs[0]))
    coeffs[0] = abs(coeffs[0])
    outer = HardyFunction(coeffs)
    return (outer, zone) if return_zone else outer


def outer_defect(
    f: HardyFunction,
    grid: GridSpec | None = None,
    oversample: int = 4,
    eps: float = DEFAULT_EPS,
) -> float:
    """
    ``log|f(0)| - mean(log|f|)`` over the circle.

    Nonpositive for every nonzero ``f`` (Jensen) and zero exactly when ``f``
    is outer; ``-inf`` when ``f(0) = 0``.  The boundary mean is taken on a
    grid ``oversample`` times finer than ``grid`` and offset by half a step,
    so that zeros at roots of unity (such as ``1 - z``) are not sampled.
    """
    grid = grid or GridSpec()
    f0 = complex(f.coeffs[0])
    if f0 == 0:
        return float("-inf")
    if not np.any(f.coeffs):
        raise InputError("outer_defect of the zero function")
    size = grid.size * oversample
    while size < 2 * len(f):
        size *= 2
    half_step = np.exp(1j * np.pi * np.arange(len(f)) / size)
    vals = np.abs(HardyFunction(f.coeffs * half_step).on_grid(size))
    mean_log = np.mean(np.log(np.maximum(vals, eps)))
    return float(np.log(abs(f0)) - mean_log)


# ---------------------------------------------------------------------------
# spectral factorisation of trigonometric polynomials


def spectral_factor(laurent, tol: float = 1e-14) -> np.ndarray:
    """
    Outer polynomial factor of a nonnegative trigonometric polynomial.

    Parameters
    ----------
    laurent : array_like
        Coefficients ``r_{-e}, ..., r_e`` of ``R(zeta) = sum r_k zeta^k``,
        Hermitian (``r_{-k} = conj(r_k)``) and nonnegative on the circle.

    Returns
    -------
    s : ndarray
        Ascending coefficients of a polynomial with all zeros in
        ``|z| >= 1``, ``s(0) > 0`` and ``|s|^2 = R`` on the circle.
    """
    r = np.asarray(laurent, dtype=complex)
    if r.size % 2 == 0:
        raise InputError("Laurent coefficient array must have odd length")
    e = r.size // 2
    r = 0.5 * (r + np.conj(r[::-1]))
    top = np.abs(r).max()
    if top == 0:
        raise LogIntegrabilityError("trigonometric polynomial vanishes identically")
    while e > 0 and abs(r[0]) <= tol * top and abs(r[-1]) <= tol * top:
        r = r[1:-1]
        e -= 1
    if e == 0:
        if r[0].real <= 0:
            raise LogIntegrabilityError("nonpositive constant spectral density")
        return np.array([np.sqrt(r[0].real)], complex)

    roots = np.roots(r[::-1])
    chosen = _outer_roots(roots, e)
    s = np.poly(chosen)[::-1].astype(complex)

    # scale by least squares on a modest grid: R = K |s|^2
    size = 16 * (e + 1)
    zeta = np.exp(2j * np.pi * np.arange(size) / size)
    rvals = (np.polynomial.polynomial.polyval(zeta, r) * zeta ** (-e)).real
    svals = np.abs(np.polynomial.polynomial.polyval(zeta, s)) ** 2
    k = np.dot(rvals, svals) / np.dot(svals, svals)
    if k <= 0:
        raise LogIntegrabilityError("trigonometric polynomial is not nonnegative")
    s = np.sqrt(k) * s
    s = s * np.exp(-1j * np.angle(s[0]))
    s[0] = abs(s[0])
    return s


def _outer_roots(roots: np.ndarray, count: int, unit_tol: float = 1e-5) -> np.ndarray:
    mod = np.abs(roots)
    outside = list(roots[mod > 1 + unit_tol])
    unit = list(roots[np.abs(mod - 1) <= unit_tol])
    chosen = outside
    # zeros on the circle come in (numerically split) pairs; merge each pair
    while len(unit) >= 2:
        z0 = unit.pop(0)
        j = int(np.argmin([abs(z0 - z) for z in unit]))
        z1 = unit.pop(j)
        mid = 0.5 * (z0 + z1)
        chosen.append(mid / abs(mid))
    if len(chosen) != count:
        # fall back to the ``count`` roots of largest modulus
        order = np.argsort(-mod)
        chosen = list(roots[order[:count]])
    return np.array(chosen, complex)


# ---------------------------------------------------------------------------
# distribution function


@dataclass(frozen=True, eq=False)
class DistributionProfile:
    """Distribution function ``lambda(t) = m{|h| > t}`` sampled at thresholds."""

    thresholds: np.ndarray
    masses: np.ndarray

    @property
    def weak_products(self) -> np.ndarray:
        """``t * lambda(t)``; bounded for weak-L1 functions."""
        return self.thresholds * self.masses


def distribution_profile(h: BoundaryFunction, thresholds) -> DistributionProfile:
    t = np.asarray(thresholds, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise InputError("thresholds must be a nonempty one dimensional sequence")
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise InputError("thresholds must be positive and strictly increasing")
    mag = np.sort(np.abs(h.samples))
    # fraction of samples strictly above t
    above = mag.size - np.searchsorted(mag, t, side="right")
    return DistributionProfile(t, above / mag.size)


# ---------------------------------------------------------------------------
# debug output


def dump_csv(f: BoundaryFunction, path) -> Path:
    """Write ``index, Re sample, Im sample, mode, Re coeff, Im coeff`` rows."""
    path = Path(path)
    modes = f.modes
    coeffs = f.coeffs
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re_sample", "im_sample", "mode", "re_coeff", "im_coeff"])
        for j in range(max(f.grid.size, modes.size)):
            row = ["", "", ""]
            if j < f.grid.size:
                s = f.samples[j]
                row = [j, repr(float(s.real)), repr(float(s.imag))]
            if j < modes.size:
                c = coeffs[j]
                row += [int(modes[j]), repr(float(c.real)), repr(float(c.imag))]
            else:
                row += ["", "", ""]
            w.writerow(row)
    return path
