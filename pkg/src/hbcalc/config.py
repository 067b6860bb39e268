"""
Experiment configuration: parsing, validation and symbol construction.

A configuration is either a JSON object or a flat text document of
``key = value`` lines whose values are JSON (bare words are read as
strings).  Complex numbers are written as ``[re, im]`` pairs or plain
numbers.  Example::

    # completeness run on the default symbol
    symbol = "half-one-plus-z"
    f = [2, 1]
    lambda_sequence = "harmonic"
    count = 40

Grid parameters can be overridden from the environment with
``HBCALC_GRID_SIZE``, ``HBCALC_TRUNCATION``, ``HBCALC_LAMBDA_MAX`` and
``HBCALC_EPS``.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import asdict, dataclass, field

import numpy as np

from .circle import DEFAULT_EPS, DEFAULT_SIZE, GridSpec, HardyFunction
from .core import LAMBDA_MAX, PythagoreanPair, mate, mate_rational
from .lab import LambdaSequence

KINDS = (
    "verify",
    "mate",
    "lift",
    "kernel",
    "clark",
    "cyclicity",
    "completeness",
    "classify",
    "gr",
)
ENV_PREFIX = "HBCALC_"
MIN_GRID, MAX_GRID = 2**10, 2**16


class ConfigParseError(ValueError):
    """The configuration text is not well formed."""


class ConfigValidationError(ValueError):
    """The configuration parses but a value is out of range or inconsistent."""


def _as_complex(v, name):
    if isinstance(v, bool):
        raise ConfigValidationError(f"{name}: expected a number, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        return complex(v[0], v[1])
    raise ConfigValidationError(f"{name}: expected a number or [re, im], got {v!r}")


def _as_coeffs(v, name):
    if not isinstance(v, (list, tuple)) or not v:
        raise ConfigValidationError(f"{name}: expected a nonempty coefficient list")
    return np.array([_as_complex(x, f"{name}[{i}]") for i, x in enumerate(v)])


def _complex_or_none(v, name):
    return None if v is None else _as_complex(v, name)


@dataclass
class ExperimentConfig:
    """Validated experiment description; see the module docstring for the format."""

    kind: str
    symbol: object = "half-one-plus-z"
    r: float = 0.5
    numerator: list | None = None
    denominator: list | None = None
    grid_size: int = DEFAULT_SIZE
    truncation: int | None = None
    lambda_max: float = LAMBDA_MAX
    eps: float = DEFAULT_EPS
    f: list = field(default_factory=lambda: [1])
    lambda_sequence: object = "harmonic"
    count: int = 40
    degrees: list = field(default_factory=lambda: [8, 16, 32, 64])
    c: object = 0
    alpha: object = 1
    lam: object = 0.5
    kernel_kind: str = "cauchy"
    n: int = 1
    r_gr: float = 0.2
    targets: list = field(default_factory=lambda: ["1", "z", "b"])
    presets: list | None = None
    seed: int = 0
    debug: bool = False

    # -- validation --------------------------------------------------------

    def validate(self) -> ExperimentConfig:
        if self.kind not in KINDS:
            raise ConfigValidationError(f"kind must be one of {', '.join(KINDS)}")
        n = self.grid_size
        if (
            not isinstance(n, int)
            or isinstance(n, bool)
            or n < MIN_GRID
            or n > MAX_GRID
            or n & (n - 1)
        ):
            raise ConfigValidationError(
                f"grid_size must be a power of two in [{MIN_GRID}, {MAX_GRID}], got {n!r}"
            )
        if self.truncation is not None and not 1 <= int(self.truncation) <= n // 2:
            raise ConfigValidationError(f"truncation must lie in [1, {n // 2}]")
        if not 0 < float(self.lambda_max) < 1:
            raise ConfigValidationError("lambda_max must lie in (0, 1)")
        if not 0 < float(self.eps) < 1e-3:
            raise ConfigValidationError("eps must lie in (0, 1e-3)")
        if not isinstance(self.count, int) or self.count < 1:
            raise ConfigValidationError("count must be a positive integer")
        if not self.degrees or any(
            not isinstance(d, int) or isinstance(d, bool) or d < 0 for d in self.degrees
        ):
            raise ConfigValidationError("degrees must be a list of nonnegative integers")
        if not isinstance(self.n, int) or self.n < 1:
            raise ConfigValidationError("n must be a positive integer")
        if self.kernel_kind not in ("cauchy", "b_cauchy", "hb"):
            raise ConfigValidationError("kernel_kind must be cauchy, b_cauchy or hb")
        _as_coeffs(self.f, "f")
        for name in ("c", "alpha", "lam"):
            _as_complex(getattr(self, name), name)
        self.symbol_spec()  # raises on a malformed symbol
        self.sequence_spec()
        if self.presets is not None and not isinstance(self.presets, list):
            raise ConfigValidationError("presets must be a list")
        return self

    def symbol_spec(self):
        """Normalised symbol description: ``(preset, params)`` or ``("rational", p, q)``."""
        if self.numerator is not None:
            p = _as_coeffs(self.numerator, "numerator")
            q = _as_coeffs(self.denominator or [1], "denominator")
            return ("rational", p, q)
        if self.symbol == "half-one-plus-z":
            return ("half-one-plus-z",)
        if self.symbol == "rz":
            r = float(self.r)
            if not 0 < r < 1:
                raise ConfigValidationError("rz preset needs 0 < r < 1")
            return ("rz", r)
        m = re.fullmatch(r"rz\(([0-9.eE+-]+)\)", str(self.symbol))
        if m:
            r = float(m.group(1))
            if not 0 < r < 1:
                raise ConfigValidationError("rz preset needs 0 < r < 1")
            return ("rz", r)
        raise ConfigValidationError(f"unknown symbol {self.symbol!r}")

    def sequence_spec(self):
        s = self.lambda_sequence
        if isinstance(s, list):
            pts = [_as_complex(x, "lambda_sequence") for x in s]
            if any(abs(p) >= 1 for p in pts):
                raise ConfigValidationError("explicit lambda points must lie in the disk")
            return ("explicit", pts)
        if s == "harmonic":
            return ("harmonic",)
        m = re.fullmatch(r"(geometric|constant)\(([0-9.eE+-]+)\)", str(s))
        if m:
            x = float(m.group(2))
            if m.group(1) == "geometric" and not 0 < x < 1:
                raise ConfigValidationError("geometric(q) needs 0 < q < 1")
            if m.group(1) == "constant" and not abs(x) < 1:
                raise ConfigValidationError("constant(x) needs |x| < 1")
            return (m.group(1), x)
        raise ConfigValidationError(f"unknown lambda_sequence {s!r}")

    # -- construction ------------------------------------------------------

    def grid(self) -> GridSpec:
        return GridSpec(self.grid_size, self.truncation)

    def pair(self) -> PythagoreanPair:
        spec = self.symbol_spec()
        g = self.grid()
        kw = dict(eps=float(self.eps), lambda_max=float(self.lambda_max))
        if spec[0] == "half-one-plus-z":
            return mate(HardyFunction([0.5, 0.5]), g, label="half-one-plus-z", **kw)
        if spec[0] == "rz":
            return mate(HardyFunction([0, spec[1]]), g, label=f"rz({spec[1]})", **kw)
        return mate_rational(spec[1], spec[2], g, label="rational", **kw)

    def f_function(self) -> HardyFunction:
        return HardyFunction(_as_coeffs(self.f, "f"))

    def sequence(self) -> LambdaSequence:
        spec = self.sequence_spec()
        cap = float(self.lambda_max)
        if spec[0] == "harmonic":
            return LambdaSequence.harmonic(self.count, cap)
        if spec[0] == "geometric":
            return LambdaSequence.geometric(spec[1], self.count, cap)
        if spec[0] == "constant":
            return LambdaSequence.constant(spec[1], self.count, cap)
        pts = spec[1][: self.count]
        return LambdaSequence.from_points(pts, cap)

    def complex_param(self, name) -> complex:
        return _as_complex(getattr(self, name), name)

    # -- identity ----------------------------------------------------------

    def canonical(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def provenance(self, operation: str) -> str:
        return f"{self.digest()}:{operation}"


# ---------------------------------------------------------------------------
# parsing

_FIELDS = set(ExperimentConfig.__dataclass_fields__)


def parse_text(text: str) -> dict:
    """Parse a JSON object or ``key = value`` lines into a dict."""
    stripped = text.strip()
    if not stripped:
        return {}
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise ConfigParseError(f"invalid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigParseError("top level must be an object")
        return data
    data = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigParseError(f"line {lineno}: expected 'key = value'")
        key = key.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise ConfigParseError(f"line {lineno}: bad key {key!r}")
        if key in data:
            raise ConfigParseError(f"line {lineno}: duplicate key {key!r}")
        data[key] = parse_value(value.strip())
    return data


def parse_value(value: str):
    try:
        return json.loads(value)
    except json.JSONDecodeError:
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_.()+-]*", value):
            return value
        raise ConfigParseError(f"cannot parse value {value!r}") from None


def env_overrides(environ=None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for key, conv in (
        ("grid_size", int),
        ("truncation", int),
        ("lambda_max", float),
        ("eps", float),
    ):
        raw = environ.get(ENV_PREFIX + key.upper())
        if raw is None:
            continue
        try:
            out[key] = conv(raw)
        except ValueError:
            raise ConfigParseError(f"{ENV_PREFIX}{key.upper()}={raw!r} is not a number") from None
    return out


def build_config(kind: str, *layers: dict) -> ExperimentConfig:
    """Merge layers (later wins), construct and validate."""
    merged: dict = {}
    for layer in layers:
        merged.update(layer)
    if "kind" in merged and merged["kind"] != kind:
        raise ConfigValidationError(
            f"configuration kind {merged['kind']!r} conflicts with subcommand {kind!r}"
        )
    merged["kind"] = kind
    unknown = set(merged) - _FIELDS
    if unknown:
        raise ConfigValidationError(f"unknown keys: {', '.join(sorted(unknown))}")
    return ExperimentConfig(**merged).validate()
