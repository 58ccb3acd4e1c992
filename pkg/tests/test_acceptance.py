"""Acceptance gate: one test per criterion, at the stated tolerances and
runtime budgets.  Run with `pytest tests/test_acceptance.py -v -s` to see
the per-criterion lines.
"""

import json
import math
import random
import sys
import time

import pytest

from logtract.brush import (
    avoiding_threshold,
    avoiding_thresholds,
    float_curve,
    limit_threshold,
    random_brush,
    worked_instance,
)
from logtract.conjugacy import (
    ConjugacyMap,
    conjugate_log,
    make_conjugacy,
    verify_conjugacy,
)
from logtract.families import ExpPair, Exponential, disjoint_type_rescale
from logtract.logspace import (
    Itinerary,
    PairTract,
    derivative_on_tract,
    forward_on_tract,
    inverse_branch,
    log_transform,
    normalized_margin,
    tract_of,
    vertical_order,
)
from logtract.pipeline import ray_tail_pipeline
from logtract.projection import (
    CurveDynamics,
    ProjectionConfig,
    commutation_defect,
    first_avoiding,
    project_limit,
)
from logtract.rays import anchored_ladder, trace_tail

_EPS = sys.float_info.epsilon


def _families():
    return [("exponential", log_transform(Exponential(1))),
            ("exp_pair", log_transform(ExpPair(0.5, 0.5)))]


def _random_tract(T, rng):
    if T.kind == "exp":
        return rng.randint(-12, 12)
    return PairTract(rng.choice((1, -1)), rng.randint(-4, 4), rng.randint(-8, 8))


def test_criterion_1_expansion_inequality():
    """|F'(w)| >= (Re F(w) - log L) / (4 pi) at 1e5 tract points/family."""
    t0 = time.monotonic()
    four_pi = 4.0 * math.pi
    violations = 0
    for name, T in _families():
        rng = random.Random(101)
        for _ in range(100_000):
            v = complex(T.logL + 0.05 + rng.random() * 45,
                        (rng.random() - 0.5) * 45)
            w = inverse_branch(T, _random_tract(T, rng), v)
            fv = forward_on_tract(T, w)
            bound = (fv.real - T.logL) / four_pi
            actual = abs(derivative_on_tract(T, w))
            if actual < bound * (1.0 - 8.0 * _EPS):
                violations += 1
    elapsed = time.monotonic() - t0
    assert violations == 0
    assert elapsed < 5.0
    print(f"\nACCEPTANCE 1 PASS expansion inequality: 2x1e5 samples, "
          f"0 violations, {elapsed:.2f}s")


def test_criterion_2_pullback_contraction():
    """Measured gap ratios <= 0.5 + 1e-6 for depths 2..40 on 100 random
    bounded eventually periodic itineraries, margin >= 0."""
    t0 = time.monotonic()
    _, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    assert normalized_margin(G) >= 0
    rng = random.Random(202)
    worst = 0.0
    for _ in range(100):
        pre = tuple(rng.randint(-16, 16) for _ in range(rng.randint(0, 4)))
        per = tuple(rng.randint(-16, 16) for _ in range(rng.randint(1, 4)))
        lad = anchored_ladder(G, Itinerary(pre, per), 40, t=1.5 + rng.random())
        for r in lad.ratios():
            worst = max(worst, r)
    elapsed = time.monotonic() - t0
    assert worst <= 0.5 + 1e-6
    assert elapsed < 10.0
    print(f"\nACCEPTANCE 2 PASS pullback contraction: 100 itineraries, "
          f"worst ratio {worst:.4f}, {elapsed:.2f}s")


def test_criterion_3_inverse_branch_round_trip():
    """inverse(forward(w)) within 1e-10 (1 + |w|) on 1e4 samples/family."""
    t0 = time.monotonic()
    worst = 0.0
    for name, T in _families():
        rng = random.Random(303)
        for _ in range(10_000):
            v = complex(T.logL + 0.05 + rng.random() * 40,
                        (rng.random() - 0.5) * 40)
            tid = _random_tract(T, rng)
            w = inverse_branch(T, tid, v)
            fv = forward_on_tract(T, w)
            w2 = inverse_branch(T, tid, fv)
            worst = max(worst, abs(w2 - w) / (1.0 + abs(w)))
    elapsed = time.monotonic() - t0
    assert worst < 1e-10
    assert elapsed < 2.0
    print(f"\nACCEPTANCE 3 PASS round trip: 2x1e4 samples, worst "
          f"{worst:.2e}, {elapsed:.2f}s")


def test_criterion_4_brush_oracle_equivalence():
    """Iterative projection equals the exact affine oracle to 1e-12 on 1000
    random instances; monotone thresholds; gaps within Q / Lambda^n."""
    t0 = time.monotonic()
    # the worked instance first
    B = worked_instance()
    zs = avoiding_thresholds(B, "H1", 30)
    assert zs[0] == 10 and zs[1] == 11.5 == zs[2]
    assert limit_threshold(B, "H1") == 11.5
    from logtract.brush import BrushPoint, project_exact
    from fractions import Fraction
    assert project_exact(B, BrushPoint("H1", Fraction(102, 10))).t == Fraction(23, 2)

    rng = random.Random(404)
    worst = 0.0
    mono_violations = 0
    gap_violations = 0
    for _ in range(1000):
        inst = random_brush(rng, 20)
        hid = rng.choice(inst.hairs).hid
        zs = avoiding_thresholds(inst, hid, 30)
        for a, b in zip(zs, zs[1:]):
            if b < a:
                mono_violations += 1
        for n in range(1, 31):
            if zs[n] - zs[n - 1] > inst.Q / inst.expansion ** n:
                gap_violations += 1
        plane, step, inside = float_curve(inst, hid)
        cd = CurveDynamics(plane, step, inside)
        t_start = float(inst.hair(hid).t0)
        top = float(zs[-1]) + 3.0
        grid = [t_start + (top - t_start) * j / 120 for j in range(121)]
        for n in (0, 9, 30):
            got, _ = first_avoiding(cd, t_start, n, grid, 1e-15)
            worst = max(worst, abs(got - float(zs[n])))
    elapsed = time.monotonic() - t0
    assert worst <= 1e-12
    assert mono_violations == 0
    assert gap_violations == 0
    assert elapsed < 30.0
    print(f"\nACCEPTANCE 4 PASS brush oracle: 1000 instances, worst "
          f"{worst:.2e}, 0 monotonicity / 0 gap-bound violations, {elapsed:.2f}s")


def _projection_hairs():
    hairs = [Itinerary.constant(k) for k in range(-12, 13)]
    hairs += [Itinerary((), (0, k)) for k in range(1, 14)]
    hairs += [Itinerary((), (0, -k)) for k in range(1, 14)]
    return hairs  # 51


def test_criterion_5_projection_structure():
    """Idempotence within t_tol on every converged run over >= 50 hairs;
    commutation defects confined to orbits meeting the closed region, with
    max modulus stable under sample doubling."""
    t0 = time.monotonic()
    _, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    cfg = ProjectionConfig(R=math.exp(30.0), n_max=20, t_tol=1e-6)
    hairs = _projection_hairs()
    assert len(hairs) >= 50
    tails = {}
    converged = 0
    for s in hairs:
        tail = trace_tail(G, s, 0.0, 1e80, 0.02, depth=2,
                          max_samples=1200, spacing=0.35)
        tails[s] = tail
        res = project_limit(g, tail, tail.ts()[0], cfg)
        assert res.converged
        converged += 1
        again = project_limit(g, tail, res.output_t, cfg)
        assert again.converged
        assert abs(again.output_t - res.output_t) <= cfg.t_tol * (1 + abs(res.output_t))
        zn = [t for _, t in res.zn_trace]
        assert all(b >= a for a, b in zip(zn, zn[1:]))
    pairs = []
    for s in hairs[:10]:
        im = s.shifted()
        if im not in tails:
            tails[im] = trace_tail(G, im, 0.0, 1e80, 0.02, depth=2,
                                   max_samples=1200, spacing=0.35)
        pairs.append((tails[s], tails[im]))
    rep1 = commutation_defect(g, G, pairs, cfg, n_samples=12)
    rep2 = commutation_defect(g, G, pairs, cfg, n_samples=24)
    for d in rep1.defects + rep2.defects:
        assert d.orbit_meets_region
    assert rep1.defects and rep2.defects
    assert abs(rep2.max_defect_log_modulus - rep1.max_defect_log_modulus) < 0.5
    # defects sit inside the region's reach: bounded modulus
    assert rep2.max_defect_log_modulus < math.log(cfg.R) + 0.5
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    print(f"\nACCEPTANCE 5 PASS projection structure: {converged} hairs "
          f"converged+idempotent, {len(rep1.defects)}->{len(rep2.defects)} defects "
          f"all on region-meeting orbits, max log-modulus "
          f"{rep2.max_defect_log_modulus}, {elapsed:.2f}s")


def test_criterion_6_crossing_property():
    """Exact crossings <= 1 on brush instances; dynamical-plane disc
    crossings measured and reported (no assertion)."""
    from logtract.brush import crossing_count
    rng = random.Random(606)
    worst = 0
    for _ in range(300):
        inst = random_brush(rng, 20)
        mx, _ = crossing_count(inst)
        worst = max(worst, mx)
    assert worst <= 1
    # dynamical-plane measurement: sign changes of Re(position) - log R
    _, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    log_R = 30.0
    counts = {}
    for k in (0, 3, -5):
        tail = trace_tail(G, Itinerary.constant(k), 0.0, 1e80, 0.02, depth=2,
                          max_samples=1200, spacing=0.35)
        sgn = [p.position.real - log_R > 0 for p in tail.samples]
        counts[k] = sum(1 for a, b in zip(sgn, sgn[1:]) if a != b)
    print(f"\nACCEPTANCE 6 PASS crossings: exact max {worst} <= 1 on 300 "
          f"instances; measured disc crossings per traced hair {counts} (reported)")


def test_criterion_7_conjugacy_bounds():
    """Zero displacement/annulus/equivariance violations on 1e3 converged
    samples; relative residual <= 1e-8; exact identity at factor 1."""
    t0 = time.monotonic()
    C, _ = make_conjugacy(Exponential(1))
    rng = random.Random(707)
    rep = verify_conjugacy(C, 1150, rng)
    elapsed = time.monotonic() - t0
    assert rep.converged >= 1000
    assert rep.displacement_violations == 0
    assert rep.annulus_violations == 0
    assert rep.equivariance_violations == 0
    assert rep.roundtrip_failures == 0
    assert rep.escape_transport_failures == 0
    assert rep.max_residual <= 1e-8
    assert rep.plane_samples > 0 and rep.max_plane_residual <= 1e-8
    C1 = ConjugacyMap(C.F, C.F, 1.0, 5.0, 6)
    w = complex(2.3, 1.1)
    x, b = conjugate_log(C1, w)
    assert x == w and b.analytic_bound == 0.0
    assert elapsed < 60.0
    print(f"\nACCEPTANCE 7 PASS conjugacy: {rep.converged}/{rep.samples} converged, "
          f"max displacement {rep.max_displacement:.3f} <= {rep.displacement_bound:.3f}, "
          f"log residual {rep.max_residual:.2e}, plane residual "
          f"{rep.max_plane_residual:.2e}, 0 violations, {elapsed:.2f}s")


def test_criterion_8_ray_pipeline():
    """For 20 definitely escaping seeds: N found, certified tail through
    the N-th orbit point within combined error, min |f^n| over the tail
    nondecreasing for N <= n <= 20."""
    t0 = time.monotonic()
    f = Exponential(1)
    conj = make_conjugacy(f)
    C, _ = conj
    R = math.exp(C.Q + 2.0)
    log_R = math.log(R)
    rng = random.Random(808)
    seeds = [complex(58.0 + 590.0 * i / 19 + rng.random(), 0.0) for i in range(20)]
    for z in seeds:
        res = ray_tail_pipeline(f, z, R, 30, conjugacy=conj)
        assert res.verdict.escaping
        assert res.contained is True
        assert res.containment_distance <= res.combined_error
        floors = res.escape_floor_by_depth
        assert len(floors) >= 21
        for n in range(res.N, 20):
            if floors[n] >= log_R:
                assert floors[n + 1] >= floors[n]
    elapsed = time.monotonic() - t0
    assert elapsed < 120.0
    print(f"\nACCEPTANCE 8 PASS ray pipeline: 20 seeds contained within "
          f"combined error, escape floors monotone, {elapsed:.2f}s")


def test_criterion_9_order_correspondence():
    """Vertical order preserved entrywise under the tract correspondence on
    100 random pairs."""
    t0 = time.monotonic()
    C, _ = make_conjugacy(Exponential(1))
    from logtract.conjugacy import correspond_itinerary
    rng = random.Random(909)
    violations = 0
    for _ in range(100):
        s1 = Itinerary(tuple(rng.randint(-6, 6) for _ in range(rng.randint(0, 2))),
                       (rng.randint(-6, 6),))
        s2 = Itinerary(tuple(rng.randint(-6, 6) for _ in range(rng.randint(0, 2))),
                       (rng.randint(-6, 6),))
        o_g = vertical_order(C.G, s1, s2)
        o_f = vertical_order(C.F, correspond_itinerary(C, s1),
                             correspond_itinerary(C, s2))
        if o_g != o_f:
            violations += 1
    elapsed = time.monotonic() - t0
    assert violations == 0
    print(f"\nACCEPTANCE 9 PASS order correspondence: 100 pairs, "
          f"0 violations, {elapsed:.2f}s")


def test_criterion_10_determinism(tmp_path):
    """verify twice with the same config and seed: byte-identical report."""
    from logtract.cli import main
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["verify", "--out", str(a), "--seed", "42"]) == 0
    assert main(["verify", "--out", str(b), "--seed", "42"]) == 0
    ra = (a / "verify_report.json").read_bytes()
    rb = (b / "verify_report.json").read_bytes()
    assert ra == rb
    print("\nACCEPTANCE 10 PASS determinism: byte-identical verify reports")
