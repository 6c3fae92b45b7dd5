"""Command line: heisbl {polytope,check,witness,frames,montecarlo,plot}.

Exit codes: 0 success, 2 user error, 3 infeasible, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import frames as fr
from . import plot as pl
from . import report as rp
from .conditions import build_system, critical_subspaces
from .config import ConfigError, ConfigFile, load_config, parse_q_entry, parse_subspace_arg, parse_vector
from .heisenberg.group import projections_for
from .heisenberg.measure import (
    BudgetExceeded,
    GridSpec,
    MeasureBracket,
    estimate_image_measure,
    fit_scaling_exponent,
)
from .heisenberg.montecarlo import form_ratio_sweep, monte_carlo_form
from .heisenberg.witness import WITNESS_KINDS, make_witness
from .polytope import HPolytope, affine_dimension, contains, enumerate_vertices

EXIT_OK, EXIT_USER, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 2, 3, 4


class CommandResult:
    def __init__(self, report: dict, code: int = EXIT_OK, csv_text: str | None = None,
                 svg_text: str | None = None):
        self.report = report
        self.code = code
        self.csv_text = csv_text
        self.svg_text = svg_text


def _config_json(cf: ConfigFile) -> dict:
    out = cf.config.to_json()
    if cf.name:
        out["name"] = cf.name
    return out


def _polytope(cf: ConfigFile, mode: str, family: str | None):
    system = build_system(cf.config, cf.family(family), mode)
    h = HPolytope.from_system(system)
    return system, h


# commands ----------------------------------------------------------------

def cmd_polytope(cf: ConfigFile, mode: str = "sufficient", family: str | None = None) -> CommandResult:
    system, h = _polytope(cf, mode, family)
    verts = enumerate_vertices(h).vertices
    result = {
        "mode": mode,
        "feasible": bool(verts),
        "vertices": [rp.qvec(v) for v in verts],
        "p_vertices": [rp.pvec(v) for v in verts],
        "affine_dimension": affine_dimension(h),
        "constraints": [
            {"coeffs": rp.qvec(c.coeffs), "relation": c.relation, "rhs": rp.fraction_str(c.rhs),
             "tag": str(c.tag)}
            for c in h.constraints
        ],
        "family": [v.label() for v in system.family.subspaces],
    }
    report = rp.make_report("polytope", _config_json(cf), result)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"q{i + 1}" for i in range(system.dim)])
    w.writerows(rp.qvec(v) for v in verts)
    return CommandResult(report, EXIT_OK if verts else EXIT_INFEASIBLE, buf.getvalue())


def cmd_check(cf: ConfigFile, qs, mode: str = "sufficient", family: str | None = None) -> CommandResult:
    if not qs:
        raise ConfigError("no exponent vector given; pass --q or put 'q'/'exponents' in the config")
    system, h = _polytope(cf, mode, family)
    results = []
    for q in qs:
        verdict = contains(h, q)
        try:
            crit = [v.label() for v in critical_subspaces(cf.config, q, system.family)]
        except ValueError:
            crit = []
        results.append({
            "q": rp.qvec(q),
            "p": rp.pvec(q),
            "inside": verdict.inside,
            "violated": list(verdict.violated),
            "critical_subspaces": crit,
        })
    report = rp.make_report("check", _config_json(cf), {"mode": mode, "results": results})
    return CommandResult(report)


def parse_ladder(text: str) -> list[float]:
    try:
        r0, factor, count = text.split(",")
        r0, factor, count = float(Fraction(r0)), float(Fraction(factor)), int(count)
    except ValueError:
        raise ConfigError(f"ladder must be r0,factor,count; got {text!r}", "--ladder") from None
    if r0 <= 0 or factor <= 1 or count < 1:
        raise ConfigError("ladder needs r0 > 0, factor > 1, count >= 1", "--ladder")
    return [r0 * factor**k for k in range(count)]


def cmd_witness(cf: ConfigFile, condition: str, v_text: str | None, w_text: str | None,
                ladder: list[float], grid: GridSpec, q=None) -> CommandResult:
    n = cf.config.n
    v = parse_subspace_arg(v_text, n) if v_text else None
    w = parse_subspace_arg(w_text, n) if w_text else None
    witness = make_witness(cf.config, condition, v, w)
    pis = projections_for(cf.config, cf.offsets_a, cf.offsets_b)
    rows, complete = [], True
    for r in ladder:
        omega = witness.instantiate(r)
        try:
            images = [estimate_image_measure(p, omega, grid) for p in pis]
        except BudgetExceeded:
            complete = False
            break
        row = {"param": r, "omega": omega.volume, "images": [b.to_json() for b in images]}
        if q is not None:
            denom = 1.0
            for b, qj in zip(images, q):
                denom *= b.mid ** float(qj)
            row["ratio"] = omega.volume / denom
        rows.append(row)

    slopes, checks = {}, {}
    if len(rows) >= 4:
        params = [row["param"] for row in rows]
        slopes["omega"] = fit_scaling_exponent(params, [row["omega"] for row in rows])
        for j in range(len(pis)):
            mids = [MeasureBracket(**row["images"][j]).mid for row in rows]
            slopes[str(j + 1)] = fit_scaling_exponent(params, mids)
        for key, pred in witness.predicted.items():
            s = slopes[str(key)]
            ok = s <= pred + 0.15 if witness.one_sided and key != "omega" else abs(s - pred) <= 0.15
            checks[str(key)] = ok

    result = {
        "witness": witness.tag,
        "parameter": witness.parameter,
        "one_sided": witness.one_sided,
        "predicted": {str(k): e for k, e in witness.predicted.items()},
        "rows": rows,
        "slopes": slopes,
        "checks": checks,
        "complete": complete,
        "grid_h": rp.fraction_str(grid.h),
    }
    if q is not None:
        result["q"] = rp.qvec(q)
        result["predicted_ratio_exponent"] = rp.fraction_str(witness.ratio_exponent(q))
    report = rp.make_report("witness", _config_json(cf), result)

    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    header = [witness.parameter, "omega"]
    for j in range(len(pis)):
        header += [f"pi{j + 1}_lower", f"pi{j + 1}_upper"]
    if q is not None:
        header.append("ratio")
    out.writerow(header)
    for row in rows:
        line = [repr(row["param"]), repr(row["omega"])]
        for b in row["images"]:
            line += [repr(b["lower"]), repr(b["upper"])]
        if q is not None:
            line.append(repr(row["ratio"]))
        out.writerow(line)
    keys = ["omega"] + [str(j + 1) for j in range(len(pis))]
    if slopes:
        out.writerow(["# slope"] + [f"{k}={slopes[k]:.6f}" for k in keys])
    out.writerow(["# predicted"] + [f"{k}={witness.predicted[k if k == 'omega' else int(k)]}" for k in keys])
    if not complete:
        out.writerow(["# partial: cell budget exceeded"])
    return CommandResult(report, EXIT_OK if complete else EXIT_BUDGET, buf.getvalue())


def cmd_frames(cf: ConfigFile) -> CommandResult:
    analysis = fr.analyze(cf.config)
    result = analysis.to_json()
    system, h = _polytope(cf, "sufficient", None)
    verts = set(enumerate_vertices(h).vertices)
    points = set(analysis.extreme_points)
    result["cross_check"] = {
        "sufficient_vertices": [rp.qvec(v) for v in sorted(verts)],
        "agree": verts == points,
        "outside_sufficient": [
            {"q": rp.qvec(p), "violated": list(contains(h, p).violated)}
            for p in sorted(points) if not contains(h, p)
        ],
    }
    report = rp.make_report("frames", _config_json(cf), result)
    return CommandResult(report)


def cmd_montecarlo(cf: ConfigFile, samples: int, seed: int, workers: int = 1,
                   q=None, dilations: list[float] | None = None) -> CommandResult:
    if cf.functions is None:
        raise ConfigError("montecarlo needs 'functions' in the config", "functions")
    res = monte_carlo_form(cf.config, cf.functions, cf.offsets_a, cf.offsets_b,
                           samples=samples, seed=seed, workers=workers)
    result = res.to_json()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["samples", "hits", "estimate", "stderr"])
    w.writerow([res.samples, res.hits, repr(res.estimate), repr(res.stderr)])
    csv_text = buf.getvalue()
    if q is not None and dilations:
        sweep = form_ratio_sweep(cf.config, cf.functions, q, dilations, samples, seed, workers)
        result["q"] = rp.qvec(q)
        result["sweep"] = [
            {"dilation": s, "estimate": r.estimate, "stderr": r.stderr, "norm_product": nm, "ratio": ratio}
            for s, r, nm, ratio in zip(sweep.dilations, sweep.results, sweep.norms, sweep.ratios)
        ]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dilation", "estimate", "stderr", "norm_product", "ratio"])
        for row in result["sweep"]:
            w.writerow([repr(row[k]) for k in ("dilation", "estimate", "stderr", "norm_product", "ratio")])
        csv_text = buf.getvalue()
    report = rp.make_report("montecarlo", _config_json(cf), result, seed=seed)
    return CommandResult(report, csv_text=csv_text)


def cmd_plot(reports: list[tuple[str, dict]], slice_spec: str | None = None) -> CommandResult:
    named = []
    dim = None
    for label, rep in reports:
        if rep.get("command") != "polytope":
            raise ConfigError(f"{label} is not a polytope report")
        verts = [tuple(Fraction(c) for c in v) for v in rep["result"]["vertices"]]
        named.append((f"{label} ({rep['result']['mode']})", verts))
        dim = 2 * rep["config"]["m"]
    if slice_spec:
        try:
            i, j = (int(s) - 1 for s in slice_spec.split(","))
        except ValueError:
            raise ConfigError(f"slice must be i,j; got {slice_spec!r}", "--slice") from None
        if not (0 <= i < dim and 0 <= j < dim and i != j):
            raise ConfigError(f"slice indices must be distinct and in 1..{dim}", "--slice")
    else:
        nonempty = [v for _, v in named if v]
        i, j = pl.default_slice(nonempty, dim) if nonempty else (0, 1)
    layers = pl.slice_layers(named, i, j)
    svg = pl.render_svg(layers, (f"q{i + 1}", f"q{j + 1}"))
    return CommandResult({}, csv_text=pl.slice_csv(named, i, j), svg_text=svg)


# argument handling -------------------------------------------------------

def _q_arg(text: str, size: int):
    return parse_vector(text, size, "--q", parse_q_entry)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heisbl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"heisbl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json", "csv")):
        p.add_argument("config", help="JSON config file")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=fmt, default="json")

    p = sub.add_parser("polytope", help="exact vertices of the exponent polytope")
    common(p)
    p.add_argument("--mode", choices=("necessary", "sufficient"), default="sufficient")
    p.add_argument("--family", help="coords | heuristic | file:PATH")

    p = sub.add_parser("check", help="membership of exponent vectors")
    common(p, ("json",))
    p.add_argument("--mode", choices=("necessary", "sufficient"), default="sufficient")
    p.add_argument("--family", help="coords | heuristic | file:PATH")
    p.add_argument("--q", action="append", help="comma-separated reciprocal exponents, e.g. 2/5,1/5,2/5,1/5")

    p = sub.add_parser("witness", help="measure scalings of a box witness")
    common(p)
    p.add_argument("--condition", required=True, choices=WITNESS_KINDS)
    p.add_argument("--V", dest="v", help="0 | full | coords:1,2 | basis:1,1;0,1")
    p.add_argument("--W", dest="w", help="same syntax as --V")
    p.add_argument("--ladder", default="8,2,5", help="r0,factor,count (default 8,2,5)")
    p.add_argument("--grid-h", default=str(GridSpec().h), help="relative cell size, 2/h integer")
    p.add_argument("--budget", type=int, default=GridSpec().budget, help="cell budget")
    p.add_argument("--q", help="reciprocal exponents for the ratio column")

    p = sub.add_parser("frames", help="tangent fields, brackets and frame pairs")
    common(p, ("json",))

    p = sub.add_parser("montecarlo", help="Monte Carlo value of the multilinear form")
    common(p)
    p.add_argument("--budget", type=int, default=10**6, help="sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--q", help="reciprocal exponents for a dilation sweep")
    p.add_argument("--dilations", default="0,4", help="k0,k1: dilate boxes by 2^k0..2^k1")

    p = sub.add_parser("plot", help="2-D slice of polytope reports as SVG or CSV")
    p.add_argument("reports", nargs="+", help="polytope report JSON files")
    p.add_argument("--slice", help="i,j (1-based coordinates)")
    p.add_argument("--out", help="SVG path; the CSV is written next to it")
    p.add_argument("--format", choices=("svg", "csv"), default="svg")
    return parser


def run(args: argparse.Namespace) -> CommandResult:
    if args.command == "plot":
        reps = []
        for path in args.reports:
            try:
                reps.append((Path(path).stem, rp.loads(Path(path).read_text())))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(str(exc), path) from None
        return cmd_plot(reps, args.slice)

    cf = load_config(args.config)
    size = 2 * cf.config.m
    if args.command == "polytope":
        return cmd_polytope(cf, args.mode, args.family)
    if args.command == "check":
        qs = [_q_arg(t, size) for t in args.q] if args.q else cf.q_vectors
        return cmd_check(cf, qs, args.mode, args.family)
    if args.command == "witness":
        try:
            h = Fraction(args.grid_h)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"bad cell size {args.grid_h!r}", "--grid-h") from None
        grid = GridSpec(h, args.budget)
        q = _q_arg(args.q, size) if args.q else None
        return cmd_witness(cf, args.condition, args.v, args.w, parse_ladder(args.ladder), grid, q)
    if args.command == "frames":
        return cmd_frames(cf)
    if args.command == "montecarlo":
        q = _q_arg(args.q, size) if args.q else None
        try:
            k0, k1 = (int(s) for s in args.dilations.split(","))
        except ValueError:
            raise ConfigError("dilations must be k0,k1", "--dilations") from None
        return cmd_montecarlo(cf, args.budget, args.seed, args.workers, q,
                              [2.0**k for k in range(k0, k1 + 1)])
    raise AssertionError(args.command)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        res = run(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USER
    fmt = args.format
    if args.command == "plot":
        if args.out:
            Path(args.out).write_text(res.svg_text)
            Path(args.out).with_suffix(".csv").write_text(res.csv_text)
        else:
            _emit(res.svg_text if fmt == "svg" else res.csv_text, None)
        return res.code
    if fmt == "csv" and res.csv_text is not None:
        _emit(res.csv_text, args.out)
    else:
        _emit(rp.dumps(res.report), args.out)
    if res.code == EXIT_INFEASIBLE:
        print("infeasible: the polytope is empty", file=sys.stderr)
    elif res.code == EXIT_BUDGET:
        print("cell budget exceeded; the table is partial", file=sys.stderr)
    return res.code


if __name__ == "__main__":
    sys.exit(main())
