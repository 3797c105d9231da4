"""Experiment runner: one subcommand per counting or equidistribution check.

Every subcommand writes ``<name>_points.csv``, ``<name>_histogram.csv`` and
``<name>_report.json`` (or ``.csv``) into ``--out`` and prints the report.
Exit status is 0 when every check passes, 1 when one fails and 2 on usage or
input errors. Reports carry no timing unless ``--timing`` is given, so equal
flags give byte-identical files whatever ``--threads`` is.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import click
import numpy as np

from . import __version__
from .approx import (
    HURWITZ_CONSTANT_ORBIT,
    QuadOrbitFamily,
    RationalFamily,
    approx_constant_record,
    approx_exponent_record,
    cf_constant_oracle,
    hurwitz_check,
)
from .equidist import (
    EmpiricalMeasure,
    TargetDensity,
    discrepancy,
    fit_power_law,
    grid_bins,
    histogram,
    theoretical_constant,
)
from .errors import HyperDiophError
from .exactmath import (
    BinaryQuadraticForm,
    RealQuadratic,
    parse_field,
)
from .hyperbolic import Geodesic, Horoball, perp_length
from .orbits import (
    enumerate_chains,
    enumerate_farey,
    enumerate_form_height_rationals,
    enumerate_heis_rationals,
    enumerate_imagquad_rationals,
    enumerate_quad_orbit_by_forms,
    enumerate_relative_orbit,
    window_intervals,
    heis_box,
    integral_heis_ball_counts,
    integral_heis_points,
    totient_sum_count,
)
from .heisenberg import chain_diameter
from .orbits.chains import lines_to_chains
from . import _lattice as L

SCHEMA_VERSION = 1

# options taking a variable number of numeric tokens
_MULTI_VALUE = ("--window", "--geodesic")
_NUMBER = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?(/\d+)?$")


# report plumbing ------------------------------------------------------------------

@dataclass
class Outcome:
    experiment: str
    params: dict
    counts: list = field(default_factory=list)
    fit: dict | None = None
    discrepancy: float | None = None
    theoretical: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    points: list = field(default_factory=list)
    point_extra: tuple = ()
    hist: list = field(default_factory=list)

    def check(self, name: str, measured, expected, passed: bool, rule: str):
        self.checks.append({
            "name": name,
            "measured": _clean(measured),
            "expected": _clean(expected),
            "rule": rule,
            "passed": bool(passed),
        })

    def check_relative(self, name: str, measured: float, expected: float, tol: float):
        rel = abs(measured - expected) / abs(expected)
        self.check(name, measured, expected, rel <= tol, f"relative error <= {tol}")

    def check_absolute(self, name: str, measured: float, expected: float, tol: float):
        self.check(name, measured, expected, abs(measured - expected) <= tol, f"absolute error <= {tol}")

    def check_at_most(self, name: str, measured: float, bound: float):
        self.check(name, measured, bound, measured <= bound, f"measured <= {bound}")

    @property
    def verdict(self) -> str:
        return "pass" if all(c["passed"] for c in self.checks) else "fail"

    def report(self, elapsed: float | None = None) -> dict:
        out = {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "params": _clean(self.params),
            "counts": _clean(self.counts),
            "fit": _clean(self.fit),
            "discrepancy": _clean(self.discrepancy),
            "theoretical": _clean(self.theoretical),
            "checks": self.checks,
            "verdict": self.verdict,
        }
        if elapsed is not None:
            out["wall_time"] = elapsed
        return out


def _clean(obj):
    """JSON-safe copy with numpy scalars unwrapped and non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, Fraction):
        return float(obj)
    return obj


def _fit_dict(samples) -> dict:
    f = fit_power_law(samples)
    return {"exponent": f.exponent, "constant": f.constant, "r_squared": f.r_squared, "samples": len(samples)}


def _hist_rows(rows) -> list:
    out = []
    for *ranges, emp, tgt in rows:
        lo = ";".join(repr(float(r[0])) for r in ranges)
        hi = ";".join(repr(float(r[1])) for r in ranges)
        out.append((lo, hi, float(emp), float(tgt)))
    return out


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for k, v in obj.items():
            _flatten(f"{prefix}.{k}" if prefix else k, v, rows)
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _flatten(f"{prefix}[{i}]", v, rows)
    else:
        rows.append((prefix, obj))


def _report_text(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    rows: list = []
    _flatten("", report, rows)
    return _csv_text(("key", "value"), rows)


def _emit(ctx: click.Context, outcome: Outcome, started: float):
    opts = ctx.obj
    report = outcome.report(time.perf_counter() - started if opts["timing"] else None)
    text = _report_text(report, opts["format"])
    out = opts["out"]
    if out is not None:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        name = outcome.experiment
        header = ("value_re", "value_im", "height") + tuple(outcome.point_extra)
        (d / f"{name}_points.csv").write_text(_csv_text(header, outcome.points))
        (d / f"{name}_histogram.csv").write_text(
            _csv_text(("bin_lo", "bin_hi", "mass_empirical", "mass_target"), outcome.hist)
        )
        (d / f"{name}_report.{opts['format']}").write_text(text)
    if not opts["quiet"]:
        click.echo(text, nl=False)
    ctx.exit(0 if outcome.verdict == "pass" else 1)


# argument parsing helpers -------------------------------------------------------------

def _gather_multi(argv: list[str]) -> list[str]:
    """Join the numeric tokens after ``--window``/``--geodesic`` into one comma list."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _MULTI_VALUE:
            vals = []
            i += 1
            while i < len(argv) and (_NUMBER.match(argv[i]) or _looks_like_real(argv[i])):
                vals.append(argv[i])
                i += 1
            out.append(f"{tok}={','.join(vals)}")
            continue
        out.append(tok)
        i += 1
    return out


def _looks_like_real(tok: str) -> bool:
    return tok.lower() in ("phi", "inf") or tok.lower().startswith("sqrt")


def _floats(text: str | None, what: str, counts=(2, 4, 6, 8)) -> list[float] | None:
    if text is None:
        return None
    try:
        vals = [float(parse_real(t)) for t in text.replace(",", " ").split()]
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint=what)
    if len(vals) not in counts:
        raise click.BadParameter(f"expected {' or '.join(map(str, counts))} numbers, got {len(vals)}", param_hint=what)
    return vals


def parse_real(text: str):
    """``phi``, ``sqrtN``/``sqrt(N)``, ``a+b*sqrt(d)``, a fraction ``p/q`` or a float."""
    t = text.strip().lower().replace(" ", "")
    if t in ("phi", "golden"):
        return RealQuadratic(Fraction(1, 2), Fraction(1, 2), 5)
    m = re.fullmatch(r"sqrt\(?(\d+)\)?", t)
    if m:
        n = int(m.group(1))
        r = math.isqrt(n)
        return Fraction(r) if r * r == n else RealQuadratic.sqrt(n)
    m = re.fullmatch(r"([-+]?[\d/]+)?([-+][\d/]*)\*?sqrt\(?(\d+)\)?", t)
    if m:
        a = Fraction(m.group(1) or 0)
        b = m.group(2)
        b = Fraction(b + "1") if b in ("+", "-") else Fraction(b)
        return a + b * RealQuadratic.sqrt(int(m.group(3)))
    if t in ("inf", "+inf"):
        return math.inf
    try:
        return Fraction(t)
    except ValueError:
        raise ValueError(f"cannot read {text!r} as a real number")


def _quadratic(text: str, what: str) -> RealQuadratic:
    v = parse_real(text)
    if not isinstance(v, RealQuadratic):
        raise click.BadParameter("needs a quadratic irrational such as phi or sqrt2", param_hint=what)
    return v


def _series(top: float, steps: int, geometric: bool) -> list[float]:
    if steps < 3:
        raise click.BadParameter("at least 3 steps are needed for a power-law fit", param_hint="--steps")
    if geometric:
        return [top / 2 ** (steps - 1 - k) for k in range(steps)]
    return [top * j / (steps + 1) for j in range(2, steps + 2)]


def _counts_upto(res, heights) -> list:
    h = res.heights
    return [(float(s), int(np.searchsorted(h, s * (1 + 1e-12), side="right"))) for s in heights]


# CLI -------------------------------------------------------------------------------

@click.group(context_settings={"help_option_names": ["-h", "--help"], "show_default": True})
@click.version_option(__version__)
@click.option("--threads", type=click.IntRange(1, 256), default=1, help="Worker threads for enumeration.")
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for points, histogram and report files (nothing written if omitted).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", help="Report format.")
@click.option("--timing", is_flag=True, help="Add wall time to the report (breaks byte-identity).")
@click.option("--quiet", is_flag=True, help="Do not print the report.")
@click.pass_context
def cli(ctx, threads, out, fmt, timing, quiet):
    """Counting and equidistribution experiments for rational and quadratic points."""
    ctx.obj = {"threads": threads, "out": out, "format": fmt, "timing": timing, "quiet": quiet}


@cli.command()
@click.option("--s", "s", type=click.IntRange(1), default=1000, help="Denominator bound.")
@click.option("--window", default="0,1", help="Interval a b inside [0, 1].")
@click.option("--bins", type=click.IntRange(1), default=20)
@click.option("--tolerance", type=float, default=0.02, help="Relative tolerance on count / s^2.")
@click.option("--max-discrepancy", type=float, default=0.01)
@click.pass_context
def farey(ctx, s, window, bins, tolerance, max_discrepancy):
    """Reduced fractions p/q in a window with q <= s."""
    t0 = time.perf_counter()
    a, b = _floats(window, "--window", (2,))
    res = enumerate_farey(s, (Fraction(a), Fraction(b)), workers=ctx.obj["threads"])
    o = Outcome("farey", {"s": s, "window": [a, b], "bins": bins, "tolerance": tolerance})
    o.counts = [(s, res.count)]
    const = theoretical_constant("farey_mertens")
    o.theoretical = {"count_over_s2_per_length": const}
    if (a, b) == (0.0, 1.0):
        o.check("totient_sum_oracle", res.count, totient_sum_count(s), res.count == totient_sum_count(s), "exact")
    o.check_relative("count_over_s2", res.count / (s * s * (b - a)), const, tolerance)
    mu = EmpiricalMeasure(res.values)
    target = TargetDensity.uniform_interval(a, b)
    o.discrepancy = discrepancy(mu, target, bins)
    o.check_at_most("discrepancy", o.discrepancy, max_discrepancy)
    o.hist = _hist_rows(histogram(mu, target, bins))
    o.points = [(float(v), 0.0, float(h), int(p), int(q)) for v, h, p, q in
                zip(res.values, res.heights, res.data["p"], res.data["q"])] if "p" in res.data else \
        [(float(v), 0.0, float(h)) for v, h in zip(res.values, res.heights)]
    o.point_extra = ("p", "q") if "p" in res.data else ()
    _emit(ctx, o, t0)


@cli.command()
@click.option("--s", "s", type=click.FloatRange(min=1), default=60.0, help="Bound on |q|.")
@click.option("--field", "fld", default="-4", help="Discriminant of the imaginary quadratic field.")
@click.option("--window", default="0,1,0,1", help="Box x0 x1 y0 y1.")
@click.option("--bins", type=click.IntRange(1), default=8, help="Bins per axis.")
@click.option("--normalization", type=click.Choice(["s4", "s2"]), default="s4",
              help="Power of s in the normalized mass.")
@click.option("--tolerance", type=float, default=0.05)
@click.option("--max-discrepancy", type=float, default=0.05)
@click.pass_context
def gaussian(ctx, s, fld, window, bins, normalization, tolerance, max_discrepancy):
    """Rationals p/q of an imaginary quadratic field in a box with |q| <= s.

    The normalized mass is count * w |D| zeta_K(2) / (2 pi area s^k) with
    k = 2 for "s2" and k = 4 for "s4"; the count grows like s^4.
    """
    t0 = time.perf_counter()
    D = parse_field(int(fld))
    box = _floats(window, "--window", (4,))
    res = enumerate_imagquad_rationals(D, s, tuple(box), workers=ctx.obj["threads"])
    area = (box[1] - box[0]) * (box[3] - box[2])
    const = theoretical_constant("gaussian_mertens", field=D)
    power = 2 if normalization == "s2" else 4
    mass = res.count / (const * area * s ** power)
    o = Outcome("gaussian", {"s": s, "field": D, "window": box, "bins": bins,
                             "normalization": normalization, "tolerance": tolerance})
    o.counts = [(s, res.count)]
    o.theoretical = {"normalized_mass": 1.0, "constant": const}
    o.check_relative("normalized_mass", mass, 1.0, tolerance)
    mu = EmpiricalMeasure(res.values)
    target = TargetDensity.planar_box(*box)
    b = grid_bins(target, (bins, bins))
    o.discrepancy = discrepancy(mu, target, b)
    o.check_at_most("discrepancy", o.discrepancy, max_discrepancy)
    o.hist = _hist_rows(histogram(mu, target, b))
    o.points = [(float(v.real), float(v.imag), float(h)) for v, h in zip(res.values, res.heights)]
    _emit(ctx, o, t0)


@cli.command("quad-trace")
@click.option("--s", "s", type=click.FloatRange(min=1), default=1e4, help="Height bound.")
@click.option("--alpha", default="phi", help="Base quadratic irrational.")
@click.option("--trace-window", type=click.FloatRange(min=0, min_open=True), default=10.0, help="Traces in [-T, T].")
@click.option("--bins", type=click.IntRange(1), default=20)
@click.option("--mode", type=click.Choice(["orbit", "with_conjugates", "positive"]), default="orbit")
@click.option("--regulator", type=click.Choice(["norm_one", "fundamental"]), default="norm_one",
              help="Log of the norm-one unit or of the fundamental unit.")
@click.option("--tolerance", type=float, default=0.05)
@click.option("--max-discrepancy", type=float, default=0.03)
@click.pass_context
def quad_trace(ctx, s, alpha, trace_window, bins, mode, regulator, tolerance, max_discrepancy):
    """Orbit points of bounded height and the distribution of their traces."""
    t0 = time.perf_counter()
    a0 = _quadratic(alpha, "--alpha")
    T = trace_window
    res = enumerate_quad_orbit_by_forms(a0, s, T, mode=mode, workers=ctx.obj["threads"])
    dens = theoretical_constant("quad_trace_density", alpha0=a0, regulator=regulator)
    normalized = res.count / (dens * s)
    o = Outcome("quad-trace", {"s": s, "alpha": str(a0), "trace_window": T, "bins": bins, "mode": mode,
                               "regulator": regulator, "tolerance": tolerance})
    o.counts = [(s, res.count)]
    o.theoretical = {"normalized_count": 2 * T, "count_per_height_per_trace": dens}
    o.check_relative("normalized_count", normalized, 2 * T, tolerance)
    tr = np.asarray(res.data["trace"], dtype=float)
    mu = EmpiricalMeasure(tr)
    target = TargetDensity.uniform_interval(-T, T)
    o.discrepancy = discrepancy(mu, target, bins)
    o.check_at_most("discrepancy", o.discrepancy, max_discrepancy)
    o.hist = _hist_rows(histogram(mu, target, bins))
    o.points = [(float(v), 0.0, float(h), float(t)) for v, h, t in zip(res.values, res.heights, tr)]
    o.point_extra = ("trace",)
    _emit(ctx, o, t0)


@cli.command("rel-count")
@click.option("--s", "s", type=click.FloatRange(min=1), default=2000.0, help="Largest relative height.")
@click.option("--steps", type=click.IntRange(3), default=4, help="Heights s, s/2, s/4, ...")
@click.option("--alpha", default="phi")
@click.option("--beta", default="phi")
@click.option("--regulator", type=click.Choice(["norm_one", "fundamental"]), default="norm_one")
@click.option("--tolerance", type=float, default=0.10, help="Relative tolerance on the fitted constant.")
@click.option("--exponent-tolerance", type=float, default=0.10)
@click.pass_context
def rel_count(ctx, s, steps, alpha, beta, regulator, tolerance, exponent_tolerance):
    """Orbit of beta modulo the stabiliser of alpha, counted by relative height."""
    t0 = time.perf_counter()
    a0, b0 = _quadratic(alpha, "--alpha"), _quadratic(beta, "--beta")
    heights = _series(s, steps, geometric=True)
    res = enumerate_relative_orbit(a0, b0, s, workers=ctx.obj["threads"])
    o = Outcome("rel-count", {"s": s, "steps": steps, "alpha": str(a0), "beta": str(b0),
                              "regulator": regulator, "tolerance": tolerance,
                              "exponent_tolerance": exponent_tolerance})
    o.counts = _counts_upto(res, heights)
    o.fit = _fit_dict(o.counts)
    const = theoretical_constant("relative_count_slope", alpha0=a0, beta0=b0, regulator=regulator)
    o.theoretical = {"exponent": 1.0, "constant": const}
    o.check_absolute("exponent", o.fit["exponent"], 1.0, exponent_tolerance)
    o.check_relative("constant", o.fit["constant"], const, tolerance)
    o.points = [(float(v), 0.0, float(h)) for v, h in zip(res.values, res.heights)]
    _emit(ctx, o, t0)


def _default_form_window(form: BinaryQuadraticForm, half: float, gap: float) -> list[float]:
    A, B, C = form.coefficients()
    disc = B * B - 4 * A * C
    roots = sorted((-B + sg * math.sqrt(disc)) / (2 * A) for sg in (-1, 1)) if A else [-C / B]
    edges = [-half]
    for r in roots:
        if -half < r < half:
            edges += [r - gap, r + gap]
    edges.append(half)
    return edges


@cli.command("form-equid")
@click.option("--s", "s", type=click.FloatRange(min=1), default=500.0, help="Bound on |Q(p, q)|.")
@click.option("--form", "form", default="1,-1,-1", help="Coefficients A,B,C of Ax^2+Bxy+Cy^2.")
@click.option("--window", default=None,
              help="Union of intervals a b [c d ...]; default [-2, 2] minus 0.2-neighbourhoods of the roots.")
@click.option("--bins", type=click.IntRange(1), default=20)
@click.option("--steps", type=click.IntRange(3), default=4, help="Exponent fit over s, s/2, s/4, ...")
@click.option("--max-discrepancy", type=float, default=0.05)
@click.option("--exponent-tolerance", type=float, default=0.10)
@click.pass_context
def form_equid(ctx, s, form, window, bins, steps, max_discrepancy, exponent_tolerance):
    """Rationals weighted by |Q(p, q)| against the density dt / |Q(t, 1)|."""
    t0 = time.perf_counter()
    try:
        A, B, C = (int(v) for v in form.replace(",", " ").split())
    except ValueError:
        raise click.BadParameter("expected three integers", param_hint="--form")
    Q = BinaryQuadraticForm(A, B, C)
    w = _floats(window, "--window", tuple(range(2, 41, 2))) if window else _default_form_window(Q, 2.0, 0.2)
    res = enumerate_form_height_rationals(Q, s, tuple(w), workers=ctx.obj["threads"])
    o = Outcome("form-equid", {"s": s, "form": [A, B, C], "window": w, "bins": bins, "steps": steps,
                               "exponent_tolerance": exponent_tolerance})
    o.counts = _counts_upto(res, _series(s, steps, geometric=True))
    o.fit = _fit_dict(o.counts)
    o.theoretical = {"exponent": 1.0}
    o.check_absolute("exponent", o.fit["exponent"], 1.0, exponent_tolerance)
    mu = EmpiricalMeasure(res.values)
    target = TargetDensity.reciprocal_form((A, B, C), window_intervals(w))
    o.discrepancy = discrepancy(mu, target, bins)
    o.check_at_most("discrepancy", o.discrepancy, max_discrepancy)
    o.hist = _hist_rows(histogram(mu, target, bins))
    o.points = [(float(v), 0.0, float(h)) for v, h in zip(res.values, res.heights)]
    _emit(ctx, o, t0)


@cli.command("heis-count")
@click.option("--s", "s", type=click.FloatRange(min=1), default=20.0, help="Bound on |c|.")
@click.option("--steps", type=click.IntRange(3), default=4, help="Fit over s*j/(steps+1), j = 2..steps+1.")
@click.option("--field", "fld", default="-4")
@click.option("--bins", type=click.IntRange(1), default=4, help="Bins per Heisenberg coordinate.")
@click.option("--tolerance", type=float, default=0.10, help="Relative tolerance on the fitted constant.")
@click.option("--exponent-tolerance", type=float, default=0.20)
@click.option("--max-discrepancy", type=float, default=0.08)
@click.pass_context
def heis_count(ctx, s, steps, fld, bins, tolerance, exponent_tolerance, max_discrepancy):
    """Rational points of the Heisenberg group modulo integral points, by |c|."""
    t0 = time.perf_counter()
    D = parse_field(int(fld))
    heights = _series(s, steps, geometric=False)
    res = enumerate_heis_rationals(D, s, workers=ctx.obj["threads"])
    o = Outcome("heis-count", {"s": s, "steps": steps, "field": D, "bins": bins, "tolerance": tolerance,
                               "exponent_tolerance": exponent_tolerance})
    o.counts = _counts_upto(res, heights)
    o.fit = _fit_dict(o.counts)
    const = theoretical_constant("heis_mertens", field=D)
    o.theoretical = {"exponent": 4.0, "constant": const}
    o.check_absolute("exponent", o.fit["exponent"], 4.0, exponent_tolerance)
    o.check_relative("constant", o.fit["constant"], const, tolerance)
    box = heis_box(D)
    target = TargetDensity.heisenberg_box(box["bounds"])
    mu = EmpiricalMeasure(res.values)
    b = grid_bins(target, (bins, bins, bins))
    o.discrepancy = discrepancy(mu, target, b)
    o.check_at_most("discrepancy", o.discrepancy, max_discrepancy)
    o.hist = _hist_rows(histogram(mu, target, b))
    o.points = [(float(x), float(y), float(h), float(t)) for (x, y, t), h in zip(res.values, res.heights)]
    o.point_extra = ("t",)
    _emit(ctx, o, t0)


@cli.command("heis-ball")
@click.option("--r-max", type=click.FloatRange(min=0, min_open=True), default=50.0, help="Largest Cygan radius.")
@click.option("--steps", type=click.IntRange(3), default=8, help="Radii r_max*k/steps, k = 1..steps.")
@click.option("--field", "fld", default="-4")
@click.option("--tolerance", type=float, default=0.02, help="Relative tolerance on count(r_max)/r_max^4.")
@click.option("--exponent-tolerance", type=float, default=0.10)
@click.option("--max-points", type=click.IntRange(0), default=20000, help="Size cap for the point cloud file.")
@click.pass_context
def heis_ball(ctx, r_max, steps, fld, tolerance, exponent_tolerance, max_points):
    """Integral Heisenberg points in Cygan balls centred at the origin."""
    t0 = time.perf_counter()
    D = parse_field(int(fld))
    radii = [r_max * k / steps for k in range(1, steps + 1)]
    counts = integral_heis_ball_counts(radii, D)
    const = theoretical_constant("heis_gauss_ball", field=D)
    o = Outcome("heis-ball", {"r_max": r_max, "steps": steps, "field": D, "tolerance": tolerance,
                              "exponent_tolerance": exponent_tolerance, "max_points": max_points})
    o.counts = list(zip(radii, counts))
    o.fit = _fit_dict(o.counts)
    o.theoretical = {"exponent": 4.0, "constant": const}
    o.check_absolute("exponent", o.fit["exponent"], 4.0, exponent_tolerance)
    o.check_relative("count_over_r4", counts[-1] / r_max ** 4, const, tolerance)
    # the cloud is cut at the radius holding about max_points points
    r_pts = min(r_max, (max_points / const) ** 0.25) if max_points else 0.0
    o.params["points_radius"] = r_pts
    if r_pts > 0:
        w0x, w0y, wx, wy = integral_heis_points(r_pts, D)
        w = L.to_complex(wx, wy, D)
        t = 2 * L.to_complex(w0x, w0y, D).imag
        norm = (np.abs(w) ** 4 + t * t) ** 0.25
        order = np.lexsort((t, w.imag, w.real, norm))
        o.points = [(float(w[i].real), float(w[i].imag), float(norm[i]), float(t[i])) for i in order]
    o.point_extra = ("t",)
    _emit(ctx, o, t0)


@cli.command()
@click.option("--eps", type=click.FloatRange(min=0, min_open=True), default=0.5, help="Smallest modified Cygan diameter.")
@click.option("--budget", type=click.IntRange(1), default=None,
              help="Search bound on the norm of the leading line coordinate (default from eps).")
@click.option("--field", "fld", default="-4")
@click.option("--base", default="1,0,0,0,-1,0", help="Integral line of the base chain, six integers.")
@click.option("--verify", type=click.IntRange(0), default=20, help="Chains whose diameter is re-measured numerically.")
@click.pass_context
def chains(ctx, eps, budget, fld, base, verify):
    """Chains in an orbit with modified Cygan diameter at least eps (best effort)."""
    t0 = time.perf_counter()
    D = parse_field(int(fld))
    try:
        line = [int(v) for v in base.replace(",", " ").split()]
    except ValueError:
        raise click.BadParameter("expected six integers", param_hint="--base")
    if len(line) != 6:
        raise click.BadParameter("expected six integers", param_hint="--base")
    line = [(line[0], line[1]), (line[2], line[3]), (line[4], line[5])]
    res = enumerate_chains(line, eps, budget=budget, field=D)
    o = Outcome("chains", {"eps": eps, "budget": budget, "field": D, "base": [c for e in line for c in e], "verify": verify})
    o.counts = [(eps, res.count)]
    o.theoretical = {}
    diam = np.asarray(res.data["diameter"], dtype=float)
    o.check("diameter_filter", float(diam.min()) if len(diam) else None, eps,
            bool(np.all(diam >= eps * (1 - 1e-12))), "every diameter >= eps")
    if budget is not None and budget > 1:
        smaller = enumerate_chains(line, eps, budget=budget // 2, field=D)
        big = set(map(tuple, np.stack([res.data[k] for k in _LINE_COLS], axis=1).tolist()))
        small = set(map(tuple, np.stack([smaller.data[k] for k in _LINE_COLS], axis=1).tolist()))
        o.check("budget_monotone", smaller.count, res.count, small <= big, "result at budget//2 is a subset")
    if verify and res.count:
        worst = 0.0
        for ch, d in zip(lines_to_chains(res, D)[:verify], diam[:verify]):
            worst = max(worst, abs(chain_diameter(ch, "modCygan") - d))
        o.check_at_most("numeric_diameter_error", worst, 1e-6)
    o.points = [(float(x), float(y), float(h), float(t), float(d))
                for (x, y, t), h, d in zip(res.values, res.heights, diam)]
    o.point_extra = ("t", "diameter")
    o.params["truncated"] = res.truncated
    _emit(ctx, o, t0)


_LINE_COLS = ("l0_x", "l0_y", "l1_x", "l1_y", "l2_x", "l2_y")


@cli.command()
@click.option("--horoball-height", type=click.FloatRange(min=0, min_open=True), default=1.0,
              help="Height of the horoball centred at infinity.")
@click.option("--geodesic", required=True, help="Finite endpoints a b (phi, sqrt5 and fractions allowed).")
@click.option("--tolerance", type=float, default=1e-6, help="Agreement with the numeric minimisation.")
@click.pass_context
def perp(ctx, horoball_height, geodesic, tolerance):
    """Common perpendicular between a horoball at infinity and a geodesic."""
    from scipy.optimize import minimize_scalar

    t0 = time.perf_counter()
    a, b = _floats(geodesic, "--geodesic", (2,))
    if a == b:
        raise click.BadParameter("endpoints must differ", param_hint="--geodesic")
    h = horoball_height
    length = perp_length(Horoball(math.inf, h), Geodesic(a, b))
    c, r = (a + b) / 2, abs(a - b) / 2
    # numeric: minimise the distance from the horoball boundary along the geodesic
    num = minimize_scalar(lambda th: math.log(h / (r * math.sin(th))), bounds=(1e-9, math.pi - 1e-9),
                          method="bounded", options={"xatol": 1e-12}).fun
    o = Outcome("perp", {"horoball_height": h, "geodesic": [a, b], "tolerance": tolerance})
    # log of the height 2/|a - b| of a quadratic irrational with these roots, shifted by log h
    o.theoretical = {"length": math.log(2.0 / abs(a - b)) + math.log(h)}
    o.counts = [(h, 1)]
    o.check_absolute("numeric_minimisation", length, num, tolerance)
    o.check_absolute("closed_form", length, o.theoretical["length"], 1e-12)
    o.points = [(c, r, length)]
    _emit(ctx, o, t0)


@cli.command()
@click.option("--target", default="phi", help="Real number to approximate (phi, sqrt2, a+b*sqrt(d), p/q).")
@click.option("--family", type=click.Choice(["rationals", "orbit"]), default="rationals")
@click.option("--base", default="phi", help="Base point of the orbit family.")
@click.option("--power", type=click.IntRange(1), default=2, help="Height q^power for rationals.")
@click.option("--s", "s", type=click.FloatRange(min=1), default=1e6, help="Height bound.")
@click.option("--kind", type=click.Choice(["constant", "exponent"]), default="constant")
@click.option("--h-min", type=float, default=None,
              help="Only heights above this count; default s/10 for constants, 1 for exponents.")
@click.option("--expected", type=float, default=None,
              help="Expected value (default 1/sqrt5 for phi and 1/sqrt8 for sqrt2 with rationals, power 2).")
@click.option("--tolerance", type=float, default=1e-6)
@click.pass_context
def approx(ctx, target, family, base, power, s, kind, h_min, expected, tolerance):
    """Running approximation constant or exponent of a target."""
    t0 = time.perf_counter()
    y = parse_real(target)
    fam = RationalFamily(power=power) if family == "rationals" else QuadOrbitFamily(_quadratic(base, "--base"))
    if h_min is None:
        h_min = s / 10 if kind == "constant" else 1.0
    rec = (approx_constant_record if kind == "constant" else approx_exponent_record)(y, fam, s, h_min=h_min)
    o = Outcome("approx", {"target": target, "family": family, "base": base if family == "orbit" else None,
                           "power": power, "s": s, "kind": kind, "h_min": h_min, "tolerance": tolerance})
    final = rec.final_estimate
    o.counts = [(e[0], e[1]) for e in rec.entries]
    if expected is None and kind == "constant" and family == "rationals" and power == 2:
        expected = {"phi": 1 / math.sqrt(5), "golden": 1 / math.sqrt(5), "sqrt2": 1 / math.sqrt(8)}.get(
            target.strip().lower().replace("(", "").replace(")", ""))
    if expected is not None:
        o.theoretical = {kind: expected}
        o.check_absolute(kind, final, expected, tolerance)
    if kind == "constant" and family == "rationals":
        oracle = cf_constant_oracle(y, s, power=power, h_min=h_min)
        o.check_absolute("continued_fraction_oracle", final, oracle, 1e-12 * max(1.0, abs(oracle)))
    o.points = [(float(e[0]), 0.0, float(e[1])) for e in rec.entries]
    _emit(ctx, o, t0)


@cli.command()
@click.option("--samples", type=click.IntRange(1), default=200, help="Number of random targets in [0, 1].")
@click.option("--seed", type=int, default=0)
@click.option("--s", "s", type=click.FloatRange(min=1), default=1000.0, help="Height bound.")
@click.option("--base", default="phi")
@click.option("--tolerance", type=float, default=0.05, help="Slack above the orbit's Hurwitz constant.")
@click.pass_context
def hurwitz(ctx, samples, seed, s, base, tolerance):
    """Largest approximation constant of random targets by a quadratic orbit."""
    t0 = time.perf_counter()
    ys = np.random.default_rng(seed).random(samples)
    a0 = _quadratic(base, "--base")
    rep = hurwitz_check([float(v) for v in ys], s, a0)
    o = Outcome("hurwitz", {"samples": samples, "seed": seed, "s": s, "base": str(a0), "tolerance": tolerance})
    o.counts = [(s, samples)]
    o.theoretical = {"hurwitz_constant": HURWITZ_CONSTANT_ORBIT}
    bound = rep.bound + tolerance
    o.check_at_most("maximum", rep.maximum, bound)
    o.points = [(float(v), 0.0, float(e)) for v, e in zip(ys, rep.estimates)]
    _emit(ctx, o, t0)


def main(argv=None):
    args = _gather_multi(list(sys.argv[1:] if argv is None else argv))
    try:
        return cli.main(args=args, prog_name="hyperdioph", standalone_mode=True)
    except (HyperDiophError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


if __name__ == "__main__":
    main()
