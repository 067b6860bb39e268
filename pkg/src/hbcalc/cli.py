"""
Command line runner.

Usage::

    hbcalc <kind> [--config FILE] [--out DIR] [--grid-size N] [--seed S]
                  [--set key=value ...] [--preset NAME ...]

``kind`` is one of verify, mate, lift, kernel, clark, cyclicity,
completeness, classify, gr.  Reports go to ``DIR/report.csv`` and
``DIR/summary.txt`` (plus ``DIR/debug/*.csv`` when ``debug = true``).
Files are written atomically.

Exit status: 0 success, 1 failing verdict, 2 parse error, 3 validation
error, 4 domain error.  Errors are reported as one JSON line on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import config as cfg
from .circle import HardyFunction, analyze, dump_csv
from .core import clark, kernel, lift
from .errors import HbError
from .lab import (
    classify_one_minus_cb,
    completeness_experiment,
    cyclicity_curve,
    default_targets,
    gr_approximant,
    hypothesis_bf_bounded,
    is_numerically_outer,
)
from .verify import DEFAULT_PRESETS, verify

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_DOMAIN = 0, 1, 2, 3, 4
#: number of leading coefficients written for power series
COEFF_ROWS = 16


class _ParseFailure(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ParseFailure(message)


def fmt(x) -> str:
    """Deterministic text for a real or complex number."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    z = complex(x)
    if z.imag == 0:
        return f"{z.real:.17g}"
    return f"{z.real:.17g}{z.imag:+.17g}j"


@dataclass
class Outcome:
    """What a run produced: table, summary lines, exit status and debug dumps."""

    header: list
    rows: list
    summary: list
    status: int = EXIT_OK
    debug: dict = field(default_factory=dict)


def _quantities(conf, op, items):
    prov = conf.provenance(op)
    return [[name, fmt(v), prov] for name, v in items]


def _coeff_items(prefix, h: HardyFunction):
    n = min(COEFF_ROWS, max(h.degree + 1, 1))
    return [(f"{prefix}[{k}]", h.coeffs[k]) for k in range(n)]


def _pair_debug(pair):
    g = pair.grid
    return {
        "b": analyze(pair.b.on_grid(g.size), g),
        "a": analyze(pair.a.on_grid(g.size), g),
    }


# ---------------------------------------------------------------------------
# one function per kind


def run_mate(conf):
    pair = conf.pair()
    items = _coeff_items("a", pair.a) + [
        ("a(0)", pair.a.coeffs[0]),
        ("pythagorean_residual", pair.pythagorean_residual()),
        ("eps_zone_size", int(pair.eps_zone.size)),
    ]
    s = [f"symbol: {pair.label}", f"method: {pair.method}", f"a(0) = {fmt(pair.a.coeffs[0])}"]
    return Outcome(["quantity", "value", "provenance"], _quantities(conf, "mate", items), s,
                   debug=_pair_debug(pair))


def run_lift(conf):
    pair = conf.pair()
    F = lift(conf.f_function(), pair)
    diag = F.check()
    items = (
        _coeff_items("f_plus", F.f_plus)
        + _coeff_items("g", F.g)
        + [("norm_b", F.norm()), ("lift_residual", diag["lift_residual"]),
           ("boundary_residual", diag["boundary_residual"])]
    )
    s = [f"symbol: {pair.label}", f"||f||_b = {fmt(F.norm())}", "invariants: ok"]
    return Outcome(["quantity", "value", "provenance"], _quantities(conf, "lift", items), s,
                   debug=_pair_debug(pair))


def run_kernel(conf):
    pair = conf.pair()
    lam = conf.complex_param("lam")
    K = kernel(lam, conf.kernel_kind, pair)
    items = _coeff_items("f", K.f) + _coeff_items("f_plus", K.f_plus) + [
        ("norm_b", K.norm()), ("lift_residual", K.lift_residual)]
    s = [f"kernel {conf.kernel_kind} at lambda = {fmt(lam)}", f"||k||_b = {fmt(K.norm())}"]
    return Outcome(["quantity", "value", "provenance"], _quantities(conf, "kernel", items), s)


def run_clark(conf):
    pair = conf.pair()
    cd = clark(conf.complex_param("alpha"), pair)
    items = _coeff_items("F_alpha", cd.F_alpha) + [
        ("total_mass", cd.total_mass), ("ac_mass", cd.ac_mass),
        ("singular_mass", cd.singular_mass), ("absolutely_continuous", cd.absolutely_continuous)]
    verdict = "absolutely continuous" if cd.absolutely_continuous else "singular part present"
    s = [f"alpha = {fmt(cd.alpha)}", f"total mass {fmt(cd.total_mass)}, ac mass {fmt(cd.ac_mass)}",
         f"verdict: {verdict}"]
    dbg = _pair_debug(pair)
    dbg["density"] = cd.density
    return Outcome(["quantity", "value", "provenance"], _quantities(conf, "clark", items), s, debug=dbg)


def run_cyclicity(conf):
    pair = conf.pair()
    F = lift(conf.f_function(), pair)
    degs = sorted(set(conf.degrees))
    curve = cyclicity_curve(F, degs[-1])
    items = [(f"residual[d={d}]", curve[d]) for d in degs]
    sel = curve[degs]
    trend = "strictly decreasing" if np.all(np.diff(sel) < 0) else "not strictly decreasing"
    s = [f"min over deg p <= d of ||1 - p f||_b at d = {degs}", f"trend: {trend}",
         f"final residual {fmt(sel[-1])}"]
    return Outcome(["quantity", "value", "provenance"], _quantities(conf, "cyclicity", items), s)


def run_completeness(conf):
    pair = conf.pair()
    F = lift(conf.f_function(), pair)
    all_targets = default_targets(pair)
    unknown = [t for t in conf.targets if t not in all_targets]
    if unknown:
        raise cfg.ConfigValidationError(f"unknown targets {unknown}; choose from 1, z, b")
    targets = {t: all_targets[t] for t in conf.targets}
    seq = conf.sequence()
    rep = completeness_experiment(F, seq, len(seq), targets)
    rep.provenance = conf.provenance("completeness")
    rep.verdicts["f_outer"] = is_numerically_outer(F.f, pair.grid)
    bf = hypothesis_bf_bounded(F)
    rep.verdicts["b_over_f_bounded"] = f"{bf.bounded} (sup {bf.sup_estimate:.6g}, {bf.reason})"
    text = rep.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    return Outcome(rows[0], rows[1:], rep.summary().splitlines())


def run_classify(conf):
    pair = conf.pair()
    v = classify_one_minus_cb(conf.complex_param("c"), pair)
    items = [("case", v.case), ("cyclic", v.cyclic)] + sorted(v.evidence.items())
    prov = conf.provenance("classify")
    rows = [[k, val if isinstance(val, str) else fmt(val), prov] for k, val in items]
    s = [f"c = {fmt(conf.complex_param('c'))}", f"case: {v.case}",
         f"verdict: {'cyclic' if v.cyclic else 'not cyclic'}"]
    return Outcome(["quantity", "value", "provenance"], rows, s)


def run_gr(conf):
    pair = conf.pair()
    rep = gr_approximant(conf.n, float(conf.r_gr), pair)
    prov = conf.provenance("gr")
    rows = [["bound", "", fmt(rep.bound), "", "", prov]]
    rows += [[label, fmt(d), fmt(rep.bound), fmt(allowed), fmt(ok), prov]
             for label, d, allowed, ok in rep.checks]
    s = [f"n = {rep.n}, r = {rep.r}", f"bound = {fmt(rep.bound)}",
         "checked on test vectors only (weaker than the multiplier norm)",
         f"verdict: {'pass' if rep.passed else 'FAIL'}"]
    return Outcome(["test", "distance", "bound", "allowed", "passed", "provenance"], rows, s,
                   EXIT_OK if rep.passed else EXIT_FAIL)


def run_verify(conf):
    presets = list(DEFAULT_PRESETS) if conf.presets is None else conf.presets
    table = verify(presets, conf.grid(), conf.seed, eps=float(conf.eps),
                   lambda_max=float(conf.lambda_max))
    rows = [[r.preset, r.criterion, r.check, r.identity, fmt(r.value), r.comparison,
             fmt(r.bound), "pass" if r.passed else "FAIL",
             conf.provenance(f"verify/{r.preset}/criterion-{r.criterion}")] for r in table]
    failed = [r for r in table if not r.passed]
    s = [f"presets: {', '.join(presets) if presets else '(none)'}",
         f"rows: {len(table)}, failed: {len(failed)}"]
    s += [f"FAIL {r.preset} criterion {r.criterion}: {r.check}" for r in failed]
    header = ["preset", "criterion", "check", "identity", "value", "comparison", "bound",
              "result", "provenance"]
    return Outcome(header, rows, s, EXIT_FAIL if failed else EXIT_OK)


RUNNERS = {
    "verify": run_verify,
    "mate": run_mate,
    "lift": run_lift,
    "kernel": run_kernel,
    "clark": run_clark,
    "cyclicity": run_cyclicity,
    "completeness": run_completeness,
    "classify": run_classify,
    "gr": run_gr,
}


def run(conf: cfg.ExperimentConfig) -> Outcome:
    """Execute a validated configuration (no file output)."""
    return RUNNERS[conf.kind](conf)


# ---------------------------------------------------------------------------
# output


def atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_outputs(out: Path, conf, outcome: Outcome):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(outcome.header)
    w.writerows(outcome.rows)
    atomic_write(out / "report.csv", buf.getvalue())
    lines = [f"kind: {conf.kind}", f"config: {conf.digest()}"] + outcome.summary
    lines.append(f"exit: {outcome.status}")
    atomic_write(out / "summary.txt", "\n".join(lines) + "\n")
    if conf.debug:
        for name, f in outcome.debug.items():
            target = out / "debug" / f"{name}.csv"
            target.parent.mkdir(parents=True, exist_ok=True)
            # dump_csv writes a file; stage it under a temporary name, then rename
            staged = dump_csv(f, target.with_name(f".{name}.csv.tmp"))
            os.replace(staged, target)


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hbcalc", description="H(b) numerics: experiments and verification")
    p.add_argument("kind", choices=cfg.KINDS)
    p.add_argument("--config", type=Path, help="configuration file (JSON or key = value lines)")
    p.add_argument("--out", type=Path, default=Path("hbcalc-out"), help="output directory")
    p.add_argument("--grid-size", type=int, help="number of grid points (power of two)")
    p.add_argument("--seed", type=int, help="seed for randomised checks")
    p.add_argument("--set", dest="sets", action="append", default=[], metavar="KEY=VALUE",
                   help="override a configuration key (value in JSON)")
    p.add_argument("--preset", dest="presets", action="append", metavar="NAME",
                   help="verification preset (repeatable)")
    p.add_argument("--no-presets", action="store_true", help="verify with an empty preset list")
    return p


def _fail(code: str, status: int, reason: str) -> int:
    print(json.dumps({"error": code, "exit": status, "reason": reason}), file=sys.stderr)
    return status


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        layers = []
        if args.config is not None:
            try:
                text = args.config.read_text()
            except OSError as exc:
                raise cfg.ConfigParseError(f"cannot read {args.config}: {exc.strerror}") from None
            layers.append(cfg.parse_text(text))
        layers.append(cfg.env_overrides())
        sets = {}
        for item in args.sets:
            key, sep, value = item.partition("=")
            if not sep:
                raise cfg.ConfigParseError(f"--set expects KEY=VALUE, got {item!r}")
            sets[key.strip()] = cfg.parse_value(value.strip())
        layers.append(sets)
        flags = {}
        if args.grid_size is not None:
            flags["grid_size"] = args.grid_size
        if args.seed is not None:
            flags["seed"] = args.seed
        if args.presets:
            flags["presets"] = args.presets
        if args.no_presets:
            flags["presets"] = []
        layers.append(flags)
        conf = cfg.build_config(args.kind, *layers)
    except (_ParseFailure, cfg.ConfigParseError) as exc:
        return _fail("parse", EXIT_PARSE, str(exc))
    except (cfg.ConfigValidationError, TypeError) as exc:
        return _fail("validation", EXIT_VALIDATION, str(exc))
    except HbError as exc:
        return _fail(exc.code, EXIT_VALIDATION, str(exc))
    try:
        outcome = run(conf)
    except cfg.ConfigValidationError as exc:
        return _fail("validation", EXIT_VALIDATION, str(exc))
    except HbError as exc:
        return _fail(exc.code, EXIT_DOMAIN, str(exc))
    write_outputs(args.out, conf, outcome)
    if outcome.status == EXIT_FAIL:
        print(json.dumps({"error": "verdict", "exit": EXIT_FAIL,
                          "reason": "; ".join(outcome.summary[-3:])}), file=sys.stderr)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
