import math
import random

import pytest

from logtract.errors import DomainError, TailTooShort
from logtract.logspace import Itinerary, forward_on_tract
from logtract.projection import (
    CurveDynamics,
    ProjectionConfig,
    commutation_defect,
    first_avoiding,
    project_depth,
    project_limit,
)
from logtract.rays import trace_tail

LOG_R = 30.0


@pytest.fixture(scope="module")
def cfg():
    return ProjectionConfig(R=math.exp(LOG_R), n_max=20, t_tol=1e-7)


def _tail(G, s, t_max=1e80, tol=0.02):
    return trace_tail(G, s, 0.0, t_max, tol, depth=2, max_samples=1200, spacing=0.3)


def test_identity_branch(G, rescaled_exp, cfg, zero_bar):
    _, g = rescaled_exp
    tail = _tail(G, zero_bar)
    t_far = tail.ts()[-2]
    out = project_depth(g, tail, t_far, 0, cfg)
    assert out.t == t_far


def test_depth_zero_is_region_exit(G, rescaled_exp, cfg, zero_bar):
    _, g = rescaled_exp
    tail = _tail(G, zero_bar)
    out = project_depth(g, tail, tail.ts()[0], 0, cfg)
    # independent oracle: bisection against Re(position) = log R directly
    tr = tail.tracer
    lo, hi = tail.ts()[0], tail.ts()[-1]
    for _ in range(200):
        mid = math.sqrt((1 + lo) * (1 + hi)) - 1
        if tr.point(mid, strict=False).position.real >= LOG_R:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-9 * (1 + hi):
            break
    assert abs(out.position.real - LOG_R) < 1e-5
    assert out.t == pytest.approx(hi, rel=1e-5)


def test_limit_monotone_trace_and_idempotence(G, rescaled_exp, cfg):
    _, g = rescaled_exp
    for s in (Itinerary.constant(0), Itinerary.constant(-3), Itinerary((0,), (5,))):
        tail = _tail(G, s)
        res = project_limit(g, tail, tail.ts()[0], cfg)
        assert res.converged
        ts = [t for _, t in res.zn_trace]
        assert all(b >= a for a, b in zip(ts, ts[1:]))
        again = project_limit(g, tail, res.output_t, cfg)
        assert again.converged
        assert abs(again.output_t - res.output_t) <= cfg.t_tol * (1 + abs(res.output_t))


def test_limit_order_preserving(G, rescaled_exp, cfg, zero_bar):
    _, g = rescaled_exp
    tail = _tail(G, zero_bar)
    ts = tail.ts()
    r1 = project_limit(g, tail, ts[0], cfg)
    r2 = project_limit(g, tail, ts[len(ts) // 2], cfg)
    assert r2.output_t >= r1.output_t - cfg.t_tol * (1 + abs(r1.output_t))
    # two-case form: output is max(input, hair threshold)
    thr = r1.output_t
    for t in (ts[0], thr * 2 if thr > 0 else ts[-2]):
        r = project_limit(g, tail, t, cfg)
        assert r.output_t == pytest.approx(max(t, thr), rel=1e-5) or r.output_t >= t


def test_gap_ratios_decay(G, rescaled_exp, cfg):
    _, g = rescaled_exp
    # prefix with a band-16 image makes the depth-1 constraint bite
    s = Itinerary((0, 16), (0,))
    tail = _tail(G, s)
    res = project_limit(g, tail, tail.ts()[0], cfg)
    assert res.converged
    for r in res.gap_ratios:
        assert r < 1.0


def test_tail_too_short(G, rescaled_exp, zero_bar):
    _, g = rescaled_exp
    huge = ProjectionConfig(R=math.exp(200.0), n_max=3, t_tol=1e-6)
    tail = trace_tail(G, zero_bar, 0.0, 10.0, 0.02, depth=2)
    with pytest.raises(TailTooShort):
        project_limit(g, tail, tail.ts()[0], huge)


def test_radius_must_exceed_cutoff(G, rescaled_exp, zero_bar):
    _, g = rescaled_exp
    tail = _tail(G, zero_bar)
    with pytest.raises(DomainError):
        project_limit(g, tail, tail.ts()[0], ProjectionConfig(R=1.0))


def test_commutation_defects_confined(G, rescaled_exp, cfg):
    _, g = rescaled_exp
    pairs = []
    for s in (Itinerary.constant(0), Itinerary.constant(2), Itinerary((0,), (3,))):
        pairs.append((_tail(G, s), _tail(G, s.shifted())))
    rep = commutation_defect(g, G, pairs, cfg, n_samples=8)
    assert rep.samples == 24
    assert len(rep.defects) > 0          # the region genuinely moves points here
    for d in rep.defects:
        assert d.orbit_meets_region
        assert d.log_modulus <= LOG_R + 0.5
    # boundedness evidence: max modulus stable under doubling
    rep2 = commutation_defect(g, G, pairs, cfg, n_samples=16)
    assert rep2.max_defect_log_modulus == pytest.approx(
        rep.max_defect_log_modulus, abs=0.5)


def test_brush_oracle_equivalence_via_engine():
    from logtract.brush import avoiding_threshold, float_curve, random_brush
    rng = random.Random(23)
    worst = 0.0
    for _ in range(40):
        B = random_brush(rng, 12)
        hid = rng.choice(B.hairs).hid
        plane, step, inside = float_curve(B, hid)
        cd = CurveDynamics(plane, step, inside)
        t0 = float(B.hair(hid).t0)
        top = float(avoiding_threshold(B, hid, 15)) + 2.0
        grid = [t0 + (top - t0) * j / 200 for j in range(201)]
        for n in (0, 1, 5, 15):
            got, _ = first_avoiding(cd, t0, n, grid, 1e-15)
            worst = max(worst, abs(got - float(avoiding_threshold(B, hid, n))))
    assert worst < 1e-12
