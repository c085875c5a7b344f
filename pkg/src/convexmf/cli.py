"""Command-line front end: construct expressions, estimate spectra, run
the verification suite, and build interval hierarchies.

Non-interactive by design: every command reads flags (optionally merged
from a JSON config), writes files atomically, and prints a short summary.
Exit codes: 0 success, 1 invalid parameters, 2 missing or unreadable
input, 3 a check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import cantor as cantor_mod
from . import constructions as cons
from . import regularity as reg
from . import spectrum as spec_mod
from .dyadic import ONE, DyadicRational, parse_dyadic
from .kernels import backend_name

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_CHECK = 3


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage errors; the contract reserves 2
    # for missing inputs, so route usage problems to exit 1 instead
    def error(self, message: str) -> None:  # type: ignore[override]
        raise CliError(EXIT_USAGE, f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# small I/O helpers
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        _atomic_write(out, text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def _csv_text(rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    if not os.path.exists(path):
        raise CliError(EXIT_INPUT, f"config file not found: {path}")
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(EXIT_INPUT, f"unreadable config {path}: {e}")
    if not isinstance(obj, dict):
        raise CliError(EXIT_USAGE, "config must be a JSON object of flag values")
    return obj


def _resolve(ns: argparse.Namespace, defaults: dict) -> Callable[[str], object]:
    """Value lookup with precedence: explicit flag > config file > default."""
    config = _load_config(getattr(ns, "config", None))

    def get(key: str):
        val = getattr(ns, key, None)
        if val is not None:
            return val
        if key in config:
            return config[key]
        return defaults.get(key)

    return get


def _parse_dyadic_arg(text: str, what: str) -> DyadicRational:
    try:
        return parse_dyadic(str(text))
    except ValueError:
        pass
    try:
        return DyadicRational.from_float(float(text))
    except (ValueError, OverflowError):
        raise CliError(
            EXIT_USAGE, f"{what} must be a dyadic like '3*2^-4', an integer, "
            f"or a float; got {text!r}"
        )


def _parse_int_list(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in str(text).split(",") if p.strip() != "")
    except ValueError:
        raise CliError(EXIT_USAGE, f"{what} must be a comma-separated integer list")


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------

_CONSTRUCT_DEFAULTS = {
    "dim": 1,
    "base": "quad",
    "seq": "auto",
    "depth": 2,
    "quad": None,
    "lin": None,
    "const": None,
    "spike": [],
    "mollify": None,
    "mollify_quad_exp": 7,
    "format": "json",
    "out": None,
}


def cmd_construct(ns: argparse.Namespace) -> int:
    v = _resolve(ns, _CONSTRUCT_DEFAULTS)
    dim = int(v("dim"))
    base_kind = str(v("base"))
    if base_kind not in ("quad", "zero"):
        raise CliError(EXIT_USAGE, f"base must be 'quad' or 'zero'; got {base_kind!r}")

    seq = str(v("seq"))
    depth = int(v("depth"))
    try:
        if seq == "auto":
            entries = cons.find_scale_sequence(depth)
        else:
            entries = cons.require_scale_sequence(_parse_int_list(seq, "--seq"))
    except cons.InvalidSequenceError as e:
        raise CliError(EXIT_USAGE, str(e))

    if base_kind == "zero":
        base = cons.QuadraticBase.create(dim)
    else:
        quad = v("quad")
        quad_coeffs = (
            [_parse_dyadic_arg(c, "--quad") for c in str(quad).split(",")]
            if quad is not None
            else [ONE] * dim
        )
        lin = v("lin")
        lin_coeffs = (
            [_parse_dyadic_arg(c, "--lin") for c in str(lin).split(",")]
            if lin is not None
            else []
        )
        const = v("const")
        base = cons.QuadraticBase.create(
            dim,
            quad=quad_coeffs,
            lin=lin_coeffs,
            const=_parse_dyadic_arg(const, "--const") if const is not None else 0,
        )

    try:
        expr = cons.compose(entries, dim=dim, base=base)
        for level in v("spike") or []:
            expr = cons.with_spike(expr, int(level))
        lam = v("mollify")
        if lam is not None:
            expr = cons.mollify(
                expr, _parse_dyadic_arg(lam, "--mollify"), int(v("mollify_quad_exp"))
            )
    except ValueError as e:
        raise CliError(EXIT_USAGE, str(e))

    fmt = str(v("format"))
    if fmt == "json":
        text = expr.to_json()
    elif fmt == "csv":
        # summarize the structural content even when mollification wrapped it
        inner = expr.smoothed.inner if expr.smoothed is not None else expr
        rows = [
            ["field", "value"],
            ["dim", str(expr.dim)],
            ["staircase_levels", " ".join(map(str, inner.staircase_levels))],
            ["spike_levels", " ".join(map(str, inner.spike_levels))],
            ["mollified", str(expr.smoothed is not None).lower()],
            ["certified_convex", str(expr.certified_convex).lower()],
        ]
        text = _csv_text(rows)
    else:
        raise CliError(EXIT_USAGE, f"format must be json or csv; got {fmt!r}")
    _emit(text, v("out"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------

_SPECTRUM_DEFAULTS = {
    "input": None,
    "n": 12,
    "delta": 0.125,
    "scales": None,
    "margin": 0.15,
    "derivative": False,
    "format": "csv",
    "out": None,
}


def _load_expression(path: Optional[str]) -> cons.ConvexExpr:
    if not path:
        raise CliError(EXIT_USAGE, "an input expression file is required (--input)")
    if not os.path.exists(path):
        raise CliError(EXIT_INPUT, f"input file not found: {path}")
    try:
        with open(path) as fh:
            return cons.ConvexExpr.from_json(fh.read())
    except (OSError, json.JSONDecodeError, ValueError, KeyError) as e:
        raise CliError(EXIT_INPUT, f"unreadable expression {path}: {e}")


def cmd_spectrum(ns: argparse.Namespace) -> int:
    v = _resolve(ns, _SPECTRUM_DEFAULTS)
    expr = _load_expression(v("input"))
    n = int(v("n"))
    delta = float(v("delta"))
    margin = float(v("margin"))
    scales_arg = v("scales")
    scales = None
    if scales_arg is not None:
        lo, _, hi = str(scales_arg).partition(":")
        try:
            scales = tuple(range(int(lo), int(hi) + 1))
        except ValueError:
            raise CliError(EXIT_USAGE, "--scales must look like LO:HI")

    if v("derivative"):
        if expr.dim != 1:
            raise CliError(EXIT_USAGE, "derivative curves are one-dimensional")
        if not expr.has_closed_derivative:
            raise CliError(
                EXIT_USAGE, "expression has no closed derivative (mollified part)"
            )
        evaluate = lambda X: expr.derivative_axis0(np.asarray(X)[:, 0])
    else:
        evaluate = expr.evaluate

    values = spec_mod.sample_grid(evaluate, expr.dim, n)
    try:
        curve = spec_mod.empirical_spectrum(values, expr.dim, delta=delta, scales=scales)
    except ValueError as e:
        # unresolvable grid: the sampled input cannot support the request
        raise CliError(EXIT_INPUT, str(e))
    report = spec_mod.check_upper_bound(curve, margin=margin)

    fmt = str(v("format"))
    if fmt == "csv":
        text = _csv_text(curve.csv_rows())
    elif fmt == "json":
        obj = curve.to_json_obj()
        obj["bound_check"] = {
            "passed": report.ok,
            "margin": report.margin,
            "violations": [
                {"h": h, "value": val, "bound": b} for h, val, b in report.violations
            ],
        }
        text = _json_text(obj)
    else:
        raise CliError(EXIT_USAGE, f"format must be json or csv; got {fmt!r}")
    _emit(text, v("out"))
    print(f"upper-bound check: {'pass' if report.ok else 'FAIL'} ({report})")
    return EXIT_OK if report.ok else EXIT_CHECK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _check_staircase_exact(seed: int) -> tuple[bool, str]:
    problems = []
    for l in (2, 3):
        sl = cons.StaircaseLevel(l)
        cells = sl.cell_count
        step, ramp = sl.step, sl.ramp_width
        prev_top = None
        for j in range(cells):
            plateau = cons.staircase_value(l, DyadicRational(j, -l * l))
            if plateau != step * DyadicRational(j, 0):
                problems.append(f"l={l} cell {j}: plateau value off")
                break
            ramp_start = DyadicRational(j + 1, -l * l) - ramp
            top = cons.staircase_value(l, ramp_start + ramp)  # next plateau
            if prev_top is not None and plateau != prev_top:
                problems.append(f"l={l} cell {j}: discontinuous at cell start")
                break
            if not (plateau <= top):
                problems.append(f"l={l} cell {j}: not monotone across the ramp")
                break
            prev_top = top
        if cons.staircase_value(l, ONE) != DyadicRational(1, -l):
            problems.append(f"l={l}: value at 1 is not 2^-{l}")
    if cons.staircase_antiderivative(2, ONE) != DyadicRational(61441, -19):
        problems.append("antiderivative at 1 mismatches the frozen oracle")
    if cons.staircase_antiderivative(2, DyadicRational(1, -4)) != DyadicRational(1, -23):
        problems.append("antiderivative at 1/16 mismatches the frozen oracle")
    rep = cons.convexity_check(
        cons.compose((2,), validate=False), grid_exp=12, mode="exact"
    )
    if not rep.ok:
        problems.append(f"convexity scan found {rep.violations} violations")
    return not problems, "; ".join(problems) or "exact staircase battery clean"


def _check_cusp_calibration(seed: int) -> tuple[bool, str]:
    problems = []
    worst = 0.0
    for hh in (1.1, 1.3, 1.5, 1.7, 1.9):
        f = lambda t, _h=hh: np.abs(t - 0.5) ** _h
        fp = lambda t, _h=hh: _h * np.sign(t - 0.5) * np.abs(t - 0.5) ** (_h - 1.0)
        est = reg.holder_estimate(f, 0.5)
        worst = max(worst, abs(est.value - hh))
        if abs(est.value - hh) > 0.1:
            problems.append(f"h={hh}: estimate {est.value:.3f} off by > 0.1")
        shift = reg.exponent_shift_check(f, fp, 0.5, tol=0.15)
        if shift.inconclusive or not shift.consistent:
            problems.append(f"h={hh}: shift check {shift}")
    return not problems, (
        "; ".join(problems) or f"five cusps within 0.1 (worst {worst:.3f})"
    )


def _check_derivative_stability(seed: int) -> tuple[bool, str]:
    f = lambda x: np.asarray(x) ** 2
    fp = lambda x: 2.0 * np.asarray(x)
    radius = reg.derivative_stability_radius(fp, eps=0.1)
    rng = np.random.default_rng(seed)
    problems = []
    for i in range(5):
        a = float(rng.uniform(0.2, 0.8))
        c = float(rng.uniform(0.1, 0.9)) * radius.rho
        g = lambda x, _a=a, _c=c: np.asarray(x) ** 2 + _c * (np.asarray(x) - _a) ** 2
        rep = reg.stability_check(f, fp, g, radius)
        if not rep.passed:
            problems.append(f"perturbation {i}: {rep}")
    return not problems, "; ".join(problems) or (
        f"rho {radius.rho:.3e}; 5 perturbations stable"
    )


def _check_boundary_spike(seed: int) -> tuple[bool, str]:
    base = cons.QuadraticBase.create(2, quad=[ONE, ONE])
    expr = cons.with_spike(cons.compose((), dim=2, base=base), 5)
    scales = tuple(range(4, 12))  # the spike knee 5^-5 sits inside this band
    problems = []
    for x2 in (0.3, 0.5, 0.7):
        est = reg.holder_estimate(expr.evaluate, (0.0, x2), scales)
        if est.value > 0.3:
            problems.append(f"boundary (0,{x2}): exponent {est.value:.3f} > 0.3")
    interior = reg.holder_estimate(expr.evaluate, (0.5, 0.5), scales)
    if interior.value < 1.0:
        problems.append(f"interior exponent {interior.value:.3f} < 1")
    return not problems, "; ".join(problems) or (
        f"boundary flat, interior at {interior.value:.2f}"
    )


def _check_cone_probe(seed: int) -> tuple[bool, str]:
    base = cons.QuadraticBase.create(
        2, quad=[DyadicRational(1, -7), DyadicRational(1, -7)]
    )
    expr = cons.ConvexExpr(2, base, staircase_levels=(2,))
    cone = reg.build_cone_system(2, 16, seed=seed)
    problems = []
    for j in (3, 5, 7):
        x = np.array([j / 16.0, 0.5 + j / 256.0])
        result = reg.cone_probe(expr.evaluate, x, cone)
        if result.inconclusive:
            problems.append(f"x1={j}/16: inconclusive ({result.reason})")
            continue
        center = cone.points[result.selected]
        if min(np.abs(center[0] - 1.0), np.abs(center[0] + 1.0)) > cone.eps:
            problems.append(f"x1={j}/16: selected cone center {center} not on x1 axis")
    return not problems, "; ".join(problems) or "axis cone selected at 3 kink points"


def _check_spectrum_table(seed: int) -> tuple[bool, str]:
    neg = float("-inf")
    table = [
        ("convex-typical", 2, 1.5, 1.5),
        ("convex-typical", 3, 0.5, neg),
        ("convex-upper", 2, 3.0, 2.0),
        ("monotone-multi", 2, 0.5, 1.5),
        ("measure-typical", 2, 1.0, 1.0),
        ("convex-typical", 2, 0.0, 1.0),
        ("convex-typical", 2, 1.0, 1.0),
        ("convex-typical", 2, 2.0, 2.0),
        ("convex-typical", 3, 0.0, 2.0),
        ("convex-typical", 3, 1.0, 2.0),
        ("convex-typical", 3, 2.0, 3.0),
        ("convex-upper", 2, 0.0, 1.0),
        ("convex-upper", 2, 1.0, 1.0),
        ("convex-upper", 2, 2.0, 2.0),
        ("monotone-multi", 2, 0.0, 1.0),
        ("monotone-multi", 2, 1.0, 2.0),
        ("monotone-multi", 2, 2.0, neg),
        ("measure-typical", 2, 0.0, 0.0),
        ("measure-typical", 2, 1.0, 1.0),
        ("measure-typical", 2, 2.0, 2.0),
    ]
    bad = [
        f"{kind}(d={d}, h={h})"
        for kind, d, h, want in table
        if spec_mod.theoretical_spectrum(kind, d, h) != want
    ]
    return not bad, "; ".join(bad) or f"{len(table)} tabulated values exact"


def _control_stability(seed: int) -> tuple[bool, str]:
    f = lambda x: np.asarray(x) ** 2
    fp = lambda x: 2.0 * np.asarray(x)
    radius = reg.derivative_stability_radius(fp, eps=0.1)
    g = lambda x: np.asarray(x) ** 2 + 10.0 * radius.rho * np.abs(np.asarray(x) - 0.3)
    rep = reg.stability_check(f, fp, g, radius)
    detected = not rep.passed
    return detected, (
        "10*rho perturbation detected" if detected else "CONTROL MISSED: passed"
    )


def _control_bound(seed: int) -> tuple[bool, str]:
    curve = spec_mod.SpectrumCurve(
        d=2,
        grid_exp=10,
        delta=0.25,
        cap=3.0,
        scales=(6, 7),
        bin_centers=(1.5,),
        values=(2.0,),
        counts=((1,), (2,)),
        boundary_counts=((0,), (0,)),
    )
    rep = spec_mod.check_upper_bound(curve)
    detected = not rep.ok and abs(rep.violations[0][0] - 1.5) < 1e-12
    return detected, (
        "injected curve flagged at h=1.5" if detected else "CONTROL MISSED: passed"
    )


def _control_convexity(seed: int) -> tuple[bool, str]:
    base = cons.QuadraticBase.create(1, quad=[DyadicRational(-1, 0)])
    expr = cons.ConvexExpr(1, base)
    rep = cons.convexity_check(expr, grid_exp=8)
    detected = not rep.ok
    return detected, (
        "concave input flagged" if detected else "CONTROL MISSED: reported convex"
    )


_CHECKS: dict[str, Callable[[int], tuple[bool, str]]] = {
    "staircase-exact": _check_staircase_exact,
    "cusp-calibration": _check_cusp_calibration,
    "derivative-stability": _check_derivative_stability,
    "boundary-spike": _check_boundary_spike,
    "cone-probe": _check_cone_probe,
    "spectrum-table": _check_spectrum_table,
}

_CONTROLS: dict[str, Callable[[int], tuple[bool, str]]] = {
    "control-stability": _control_stability,
    "control-bound": _control_bound,
    "control-convexity": _control_convexity,
}

_VERIFY_DEFAULTS = {
    "only": [],
    "negative_controls": False,
    "seed": 0,
    "format": "json",
    "out": None,
}


def cmd_verify(ns: argparse.Namespace) -> int:
    v = _resolve(ns, _VERIFY_DEFAULTS)
    seed = int(v("seed"))
    names = list(v("only") or [])
    available = dict(_CHECKS)
    if v("negative_controls"):
        available.update(_CONTROLS)
    if not names:
        names = list(_CHECKS)
        if v("negative_controls"):
            names += list(_CONTROLS)
    unknown = [n for n in names if n not in available]
    if unknown:
        raise CliError(
            EXIT_USAGE,
            f"unknown checks: {', '.join(unknown)}; available: "
            + ", ".join(list(_CHECKS) + list(_CONTROLS)),
        )
    results = []
    for name in names:
        passed, detail = available[name](seed)
        results.append({"check": name, "passed": passed, "detail": detail})
        print(f"{name}: {'pass' if passed else 'FAIL'} - {detail}")
    all_passed = all(r["passed"] for r in results)
    fmt = str(v("format"))
    out = v("out")
    if out:
        if fmt == "json":
            text = _json_text({"checks": results, "all_passed": all_passed})
        elif fmt == "csv":
            rows = [["check", "passed", "detail"]] + [
                [r["check"], str(r["passed"]).lower(), r["detail"]] for r in results
            ]
            text = _csv_text(rows)
        else:
            raise CliError(EXIT_USAGE, f"format must be json or csv; got {fmt!r}")
        _emit(text, out)
    print(f"verify: {'all checks pass' if all_passed else 'CHECKS FAILED'}")
    return EXIT_OK if all_passed else EXIT_CHECK


# ---------------------------------------------------------------------------
# cantor
# ---------------------------------------------------------------------------

_CANTOR_DEFAULTS = {
    "h": None,
    "seq": "auto",
    "depth": 2,
    "k_start": 1,
    "dim": 1,
    "radius_exps": None,
    "emit_intervals": False,
    "format": "csv",
    "out": None,
}


def cmd_cantor(ns: argparse.Namespace) -> int:
    v = _resolve(ns, _CANTOR_DEFAULTS)
    h_arg = v("h")
    if h_arg is None:
        raise CliError(EXIT_USAGE, "an exponent is required (--h), e.g. --h 1.5")
    try:
        h = Fraction(str(h_arg))
    except (ValueError, ZeroDivisionError):
        raise CliError(EXIT_USAGE, f"cannot parse exponent {h_arg!r}")
    k_start = int(v("k_start"))
    dim = int(v("dim"))
    seq = str(v("seq"))
    try:
        if seq == "auto":
            entries = cantor_mod.find_measure_sequence(
                h, int(v("depth")), k_start=k_start
            )
        else:
            entries = _parse_int_list(seq, "--seq")
        report = cantor_mod.covering_counts(h, entries, k_start=k_start)
    except (ValueError, cons.InvalidSequenceError) as e:
        raise CliError(EXIT_USAGE, str(e))

    rows = [["generation", "N", "log2_delta", "slope"]]
    for g in report.generations:
        rows.append(
            [str(g.index), str(1 << g.log2_count), str(-g.delta_exp), f"{g.slope:.6f}"]
        )
    print(report)

    local_obj = None
    if report.generations and report.empty_at is None:
        md = cantor_mod.build_measure(h, entries, k_start=k_start, dim=dim)
        exps_arg = v("radius_exps")
        if exps_arg is not None:
            exps = _parse_int_list(exps_arg, "--radius-exps")
        elif len(report.generations) >= 2:
            exps = tuple(g.delta_exp for g in report.generations)
        else:
            exps = (report.generations[0].cell_exp, report.generations[0].delta_exp)
        try:
            local = cantor_mod.local_dimension(md, exps)
        except ValueError as e:
            raise CliError(EXIT_USAGE, str(e))
        local_obj = {
            "point": list(local.point),
            "radius_exps": list(local.radius_exps),
            "log2_masses": list(local.log2_masses),
            "slope": local.slope,
        }
        print(local)

    intervals_obj = None
    if v("emit_intervals"):
        try:
            iset = cantor_mod.intersect_to_depth(h, entries, k_start=k_start)
        except ValueError as e:
            raise CliError(EXIT_USAGE, str(e))
        intervals_obj = {
            "generation": iset.generation,
            "empty_at": iset.empty_at,
            "endpoints": iset.endpoint_strings(),
        }

    fmt = str(v("format"))
    if fmt == "csv":
        text = _csv_text(rows)
    elif fmt == "json":
        obj = {
            "h": str(h),
            "entries": list(entries),
            "k_start": k_start,
            "empty_at": report.empty_at,
            "generations": [
                {
                    "index": g.index,
                    "level": g.level,
                    "log2_count": g.log2_count,
                    "log2_delta": -g.delta_exp,
                    "slope": g.slope,
                }
                for g in report.generations
            ],
            "local_dimension": local_obj,
        }
        if intervals_obj is not None:
            obj["intervals"] = intervals_obj
        text = _json_text(obj)
    else:
        raise CliError(EXIT_USAGE, f"format must be json or csv; got {fmt!r}")
    _emit(text, v("out"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="convexmf",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--version", action="store_true", help="print version and backend, then exit"
    )
    sub = parser.add_subparsers(dest="command")

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="JSON file of default flag values")
        p.add_argument("--out", help="output path (atomic write); default stdout")
        p.add_argument("--format", choices=["json", "csv"], help="output format")

    p = sub.add_parser("construct", parents=[], help="build a convex expression")
    p.add_argument("--dim", type=int, help="ambient dimension (default 1)")
    p.add_argument("--base", choices=["quad", "zero"], help="base term (default quad)")
    p.add_argument("--seq", help="comma levels, or 'auto' (default)")
    p.add_argument("--depth", type=int, help="sequence depth for auto (default 2)")
    p.add_argument("--quad", help="comma dyadic quadratic coefficients")
    p.add_argument("--lin", help="comma dyadic linear coefficients")
    p.add_argument("--const", help="dyadic constant term")
    p.add_argument(
        "--spike", action="append", type=int, help="add a boundary spike level"
    )
    p.add_argument("--mollify", help="smooth with this scale (0 < lam < 1/2)")
    p.add_argument("--mollify-quad-exp", type=int, dest="mollify_quad_exp")
    common(p)
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("spectrum", help="empirical spectrum and bound check")
    p.add_argument("--input", help="expression JSON file")
    p.add_argument("--n", type=int, help="grid exponent (default 12)")
    p.add_argument("--delta", type=float, help="bin width (default 0.125)")
    p.add_argument("--scales", help="coarse scale range LO:HI")
    p.add_argument("--margin", type=float, help="bound tolerance (default 0.15)")
    p.add_argument(
        "--derivative",
        action="store_const",
        const=True,
        help="analyze the derivative instead (d=1)",
    )
    common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("verify", help="run the invariant-check suite")
    p.add_argument(
        "--only", action="append", help="run one named check (repeatable)"
    )
    p.add_argument(
        "--negative-controls",
        action="store_const",
        const=True,
        dest="negative_controls",
        help="also run injected-violation controls (pass when detected)",
    )
    p.add_argument("--seed", type=int, help="seed for randomized probes (default 0)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("cantor", help="covering counts and local dimension")
    p.add_argument("--h", help="target exponent in [1,2), e.g. 1.5 or 3/2")
    p.add_argument("--seq", help="comma levels, or 'auto' (default)")
    p.add_argument("--depth", type=int, help="sequence depth for auto (default 2)")
    p.add_argument("--k-start", type=int, dest="k_start", help="first generation index")
    p.add_argument("--dim", type=int, help="product dimension (default 1)")
    p.add_argument(
        "--radius-exps", dest="radius_exps", help="comma radius exponents q (radii 2^-q)"
    )
    p.add_argument(
        "--emit-intervals",
        action="store_const",
        const=True,
        dest="emit_intervals",
        help="materialize the deepest generation (JSON output)",
    )
    common(p)
    p.set_defaults(func=cmd_cantor)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        ns = parser.parse_args(argv)
        if getattr(ns, "version", False):
            from . import __version__

            print(f"convexmf {__version__} (kernel backend: {backend_name()})")
            return EXIT_OK
        if not getattr(ns, "command", None):
            parser.print_help()
            return EXIT_USAGE
        return ns.func(ns)
    except CliError as e:
        print(str(e), file=sys.stderr)
        return e.code


if __name__ == "__main__":
    sys.exit(main())
