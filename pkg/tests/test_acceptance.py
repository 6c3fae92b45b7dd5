"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Tolerances are fixed: exact rational equality for polytopes, 0.15 for fitted
scaling slopes, 3 standard errors for Monte Carlo.
"""

import random
import time
from fractions import Fraction

import pytest

from heisbl import exactla as la
from heisbl.cli import cmd_frames, cmd_polytope
from heisbl.conditions import (
    ProjectionConfig,
    SubspaceFamily,
    build_system,
    constraint_B,
)
from heisbl.config import load_config
from heisbl.exactla import Subspace
from heisbl.heisenberg.measure import witness_table
from heisbl.heisenberg.montecarlo import BoxIndicator, monte_carlo_form, translate_offsets
from heisbl.heisenberg.witness import make_witness
from heisbl.polytope import HPolytope, brute_force_vertices, contains, enumerate_vertices

from conftest import CONFIG_DIR, h1_identity, h1_zero, lw_h2, qv, skewed_h2
from systems import random_system

SLOPE_TOL = 0.15
MC_SIGMAS = 3

LW_VERTS = {qv("1/5", "2/5", "1/5", "2/5"), qv("2/5", "1/5", "2/5", "1/5")}
SKEW_POINTS = [qv("1/5", "2/5", "1/5", "2/5"), qv("1/5", "2/5", "2/5", "1/5"),
               qv("2/5", "1/5", "1/5", "2/5"), qv("2/5", "1/5", "2/5", "1/5")]


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} | {detail}")
        assert ok, detail
    return emit


def _verts(report):
    return {tuple(Fraction(s) for s in v) for v in report["result"]["vertices"]}


def test_criterion_1_loomis_whitney(verdict):
    cf = load_config(CONFIG_DIR / "lw_h2.json")
    start = time.perf_counter()
    res = cmd_polytope(cf, "sufficient", "coords")
    elapsed = time.perf_counter() - start
    got = _verts(res.report)
    ok = got == LW_VERTS and elapsed < 1.0
    verdict(1, ok, f"vertices={sorted(map(lambda v: tuple(map(str, v)), got))} time={elapsed:.3f}s (<1s)")


def test_criterion_2_skewed(verdict):
    cf = load_config(CONFIG_DIR / "skewed_h2.json")
    start = time.perf_counter()
    frames = cmd_frames(cf).report["result"]
    pairs = [tuple(p) for p in frames["frame_pairs"]]
    points = [tuple(Fraction(s) for s in p) for p in frames["extreme_points"]]

    family = cf.family()
    suff = HPolytope.from_system(build_system(cf.config, family, "sufficient"))
    nec = HPolytope.from_system(build_system(cf.config, family, "necessary"))
    suff_v = enumerate_vertices(suff).vertices
    subset = all(contains(nec, v) for v in suff_v)
    rejected = [contains(suff, qv(*q)) for q in (("1/5", "2/5", "2/5", "1/5"), ("2/5", "1/5", "1/5", "2/5"))]
    in_nec = all(contains(nec, qv(*q)) for q in (("1/5", "2/5", "2/5", "1/5"), ("2/5", "1/5", "1/5", "2/5")))
    tag_c = all(not r.inside and r.violated and all(t.startswith("C(") for t in r.violated) for r in rejected)
    elapsed = time.perf_counter() - start

    ok = (pairs == [(1, 3), (1, 4), (2, 3), (2, 4)] and points == SKEW_POINTS
          and subset and in_nec and tag_c and elapsed < 1.0)
    verdict(2, ok, f"pairs={pairs} extreme_points_match={points == SKEW_POINTS} "
                   f"strict_subset={subset and in_nec} rejected_by_C={tag_c} time={elapsed:.3f}s (<1s)")


def _random_coordinate_config(rng):
    n = rng.randint(1, 4)
    m = rng.randint(1, 3)
    return ProjectionConfig.coordinate(n, [sorted(rng.sample(range(1, n + 1), rng.randint(0, n)))
                                           for _ in range(m)])


def test_criterion_3_finner_coincidence(verdict):
    rng = random.Random(2024)
    configs = [_random_coordinate_config(rng) for _ in range(20)]
    same = 0
    nonempty = 0
    for cfg in configs:
        fam = SubspaceFamily.coordinate(cfg.n)
        a = enumerate_vertices(HPolytope.from_system(build_system(cfg, fam, "necessary"))).as_set()
        b = enumerate_vertices(HPolytope.from_system(build_system(cfg, fam, "sufficient"))).as_set()
        same += a == b
        nonempty += bool(a)

    implied = 0
    checked_vertices = 0
    for _ in range(50):
        cfg = _random_coordinate_config(rng)
        while cfg.n < 2:  # every subspace of R^1 is a coordinate subspace
            cfg = _random_coordinate_config(rng)
        v = Subspace.zero(cfg.n)
        while not v.dim or v.is_coordinate:
            basis = [[rng.randint(-3, 3) for _ in range(cfg.n)] for _ in range(rng.randint(1, cfg.n))]
            v = Subspace.span(cfg.n, basis)
        verts = enumerate_vertices(
            HPolytope.from_system(build_system(cfg, SubspaceFamily.coordinate(cfg.n), "sufficient"))
        ).vertices
        b1, b2 = constraint_B(cfg, v)
        checked_vertices += len(verts)
        implied += all(b1.satisfied(q) and b2.satisfied(q) for q in verts)
    ok = same == 20 and implied == 50
    verdict(3, ok, f"necessary==sufficient on {same}/20 configs ({nonempty} nonempty); "
                   f"B implied for {implied}/50 non-coordinate V ({checked_vertices} vertices checked)")


def test_criterion_4_oracle_equivalence(verdict):
    systems = []
    for cfg, fam in ((lw_h2(), SubspaceFamily.coordinate(2)), (skewed_h2(), SubspaceFamily.heuristic(skewed_h2()))):
        for mode in ("sufficient", "necessary"):
            systems.append(HPolytope.from_system(build_system(cfg, fam, mode)))
    named = len(systems)
    rng = random.Random(7)
    systems += [random_system(rng, max_total=30) for _ in range(200)]
    assert all(h.dim <= 6 and len(h.constraints) <= 30 for h in systems[named:])
    agree = sum(enumerate_vertices(h).as_set() == brute_force_vertices(h).as_set() for h in systems)
    nonempty = sum(not enumerate_vertices(h).is_empty for h in systems)
    verdict(4, agree == len(systems),
            f"exact vertex sets agree on {agree}/{len(systems)} systems "
            f"({named} example systems, {nonempty} nonempty)")


def _table_line(name, table):
    parts = [f"{k}:{s:.3f}/{p}" for k, (s, p, _) in table.checks(SLOPE_TOL).items()]
    return f"{name} " + " ".join(parts)


def test_criterion_5_scaling_slopes(verdict):
    start = time.perf_counter()
    lines, ok = [], True
    for name, cfg in (("H1[L=0]", h1_zero()), ("H1[L=I]", h1_identity()), ("H2-LW", lw_h2())):
        for kind in ("A1", "A2"):
            table = witness_table(make_witness(cfg, kind))
            ok &= table.passed and all(abs(s - p) <= SLOPE_TOL for s, p, _ in table.checks(SLOPE_TOL).values())
            lines.append(_table_line(f"{name}/{kind}", table))
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    verdict(5, ok, f"slope/predicted within {SLOPE_TOL}, time={elapsed:.1f}s (<300s); " + "; ".join(lines))


def _b_and_c_witnesses():
    cases = []
    for name, cfg, fam in (("H2-LW", lw_h2(), SubspaceFamily.coordinate(2)),
                           ("skewed", skewed_h2(), SubspaceFamily.heuristic(skewed_h2()))):
        for v in fam.subspaces:
            if v.dim == 0:
                continue
            for kind in ("B1", "B2"):
                cases.append((name, make_witness(cfg, kind, v)))
        for v, w in fam.pairs:
            for kind in ("C1", "C2"):
                cases.append((name, make_witness(cfg, kind, v, w)))
    return cases


def test_criterion_6_b_and_c_witnesses(verdict):
    b_ok = b_total = c_ok = c_total = 0
    failures = []
    for name, wit in _b_and_c_witnesses():
        table = witness_table(wit)
        if wit.one_sided:
            c_total += 1
            c_ok += table.passed
        else:
            b_total += 1
            good = all(abs(s - p) <= SLOPE_TOL for s, p, _ in table.checks(SLOPE_TOL).values())
            b_ok += good
        if not table.passed:
            failures.append(_table_line(f"{name}/{wit.tag}", table))
    ok = b_ok == b_total and c_ok == c_total and b_total and c_total
    verdict(6, bool(ok), f"B two-sided within {SLOPE_TOL}: {b_ok}/{b_total}; "
                         f"C one-sided (slope <= bound + {SLOPE_TOL}): {c_ok}/{c_total}"
                         + (f"; failures: {failures}" if failures else ""))


def test_criterion_7_monte_carlo(verdict):
    cfg = h1_zero()
    unit = [BoxIndicator((0, 0), (1, 2))] * 2
    samples = 10**6
    runs = {w: monte_carlo_form(cfg, unit, samples=samples, seed=11, workers=w) for w in (1, 4, 8)}
    base = runs[1]
    close = abs(base.estimate - 1.75) <= MC_SIGMAS * base.stderr
    deterministic = runs[1] == runs[4] == runs[8]

    # offsets realizable by one translation x0 = 1/2, y0 = -1/3
    a, b = [[Fraction(1, 2)]] * 2, [[Fraction(-1, 3)]] * 2
    direct = monte_carlo_form(cfg, unit, a, b, samples=samples, seed=12)
    moved = monte_carlo_form(cfg, translate_offsets(cfg, unit, a, b), samples=samples, seed=13)
    sigma = (direct.stderr**2 + moved.stderr**2) ** 0.5
    invariant = abs(direct.estimate - moved.estimate) <= MC_SIGMAS * sigma

    ok = close and deterministic and invariant
    verdict(7, ok, f"estimate={base.estimate:.5f} stderr={base.stderr:.5f} "
                   f"|est-7/4|/stderr={abs(base.estimate - 1.75) / base.stderr:.2f} (<=3); "
                   f"offset diff/sigma={abs(direct.estimate - moved.estimate) / sigma:.2f} (<=3); "
                   f"workers 1/4/8 identical={deterministic}")


def test_criterion_8_property_suites(verdict):
    import test_conditions
    import test_frames
    import test_group
    import test_measure

    props = {
        "group axioms": [test_group.test_group_axioms],
        "projection is a left coset map": [test_group.test_projection_is_left_coset_map],
        "bracket antisymmetry and same-side commutation": [
            lambda c=c: test_frames.test_antisymmetry_and_same_side(c) for c in test_frames.FIELD_CONFIGS
        ],
        "tangency": [lambda c=c: test_frames.test_tangency(c) for c in test_frames.FIELD_CONFIGS],
        "constraint integrality": [test_conditions.test_constraints_are_integral],
        "C1 and C2 collapse to C on coordinate data": [
            test_conditions.test_c1_and_c2_collapse_to_c_on_coordinate_data
        ],
        "measure bracket soundness": [test_measure.test_bracket_soundness_against_sampling],
        "refinement monotonicity": [
            lambda w=w: test_measure.test_bracket_refinement_is_monotone(*w) for w in test_measure.WITNESSES
        ],
    }
    failed = []
    for name, calls in props.items():
        try:
            for call in calls:
                call()
        except Exception as exc:  # report every property, then fail
            failed.append(f"{name} ({type(exc).__name__})")
    verdict(8, not failed, f"{len(props) - len(failed)}/{len(props)} properties hold"
                           + (f"; failed: {failed}" if failed else ": " + ", ".join(props)))
