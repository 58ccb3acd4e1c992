"""Cross-module hard-assertion suite behind `logtract verify`.

Every check here is an invariant the library promises unconditionally (up
to the stated float slack); a red result is a bug or a broken environment,
not a tuning issue.  All sampling is driven by the config seed, so reports
are byte-identical across reruns.
"""

from __future__ import annotations

import cmath
import math
import random
import sys
import zlib
from fractions import Fraction

from . import brush as brushmod
from .config import RunConfig
from .conjugacy import (
    ConjugacyMap,
    _pullback_conjugate,
    conjugate_log,
    deep_hair_point,
    make_conjugacy,
    verify_conjugacy,
)
from .errors import LogtractError
from .families import (
    DomainRescaled,
    Escaped,
    ExpPair,
    Exponential,
    derivative,
    disjoint_type_rescale,
    evaluate,
    singular_bound,
    verify_disjoint_type,
)
from .logspace import (
    Itinerary,
    LogTransform,
    NotInTract,
    PairTract,
    expansion_lower_bound,
    forward_on_tract,
    inverse_branch,
    log_transform,
    normalized_margin,
    tract_of,
    vertical_order,
)
from .projection import CurveDynamics, ProjectionConfig, first_avoiding, project_limit
from .rays import anchored_ladder, pullback_point, trace_tail
from .regions import Square, Strip, contains, exp_image

_EPS = sys.float_info.epsilon


def _sample_tract_point(F: LogTransform, rng, spread: float = 40.0) -> complex:
    v = complex(F.logL + 0.3 + rng.random() * spread, (rng.random() - 0.5) * spread)
    if F.kind == "exp":
        tid = rng.randint(-8, 8)
    else:
        tid = PairTract(rng.choice((1, -1)), rng.randint(-3, 3), rng.randint(-8, 8))
    return inverse_branch(F, tid, v)


def _families():
    f1 = Exponential(1)
    f2 = ExpPair(0.5, 0.5)
    return [("exponential", f1), ("exp_pair", f2)]


def check_regions(rng) -> dict:
    bad = 0
    for _ in range(500):
        a = rng.uniform(-3, 2)
        b = a + rng.uniform(0.1, 3)
        strip = Strip(a, b)
        z = complex(rng.uniform(a - 1, b + 1), rng.uniform(-3, 3))
        if abs(z.imag) < math.pi:
            if contains(exp_image(strip), cmath.exp(z)) != contains(strip, z):
                bad += 1
    sq = Square(Fraction(3))
    exact_ok = (not contains(sq, complex(10.5, 0.707))) and contains(sq, complex(2.999999, 0))
    return {"passed": bad == 0 and exact_ok, "mismatches": bad}


def check_family_evaluation(rng) -> dict:
    bad = 0
    worst_fd = 0.0
    for _, f in _families():
        lam = complex(rng.uniform(0.5, 2), rng.uniform(-0.5, 0.5))
        g = DomainRescaled(f, lam)
        for _ in range(500):
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            if evaluate(g, z) != evaluate(f, lam * z):
                bad += 1
            h = 1e-6
            fp = evaluate(f, z + h)
            fm = evaluate(f, z - h)
            d = derivative(f, z)
            if not any(isinstance(v, Escaped) for v in (fp, fm, d)):
                worst_fd = max(worst_fd, abs((fp - fm) / (2 * h) - d))
    crit_resid = 0.0
    for ab in [(1, 1), (0.5, 0.5), (2, 0.5)]:
        p = ExpPair(*ab)
        _, values = singular_bound(p)
        zc = 0.5 * cmath.log(p.b / p.a)
        crit_resid = max(crit_resid, abs(derivative(p, zc)))
    return {"passed": bad == 0 and worst_fd < 1e-6 and crit_resid < 1e-10,
            "exact_mismatches": bad, "worst_central_diff": worst_fd,
            "critical_point_residual": crit_resid}


def check_disjoint_rescale(rng) -> dict:
    ok = True
    details = {}
    for name, f in _families():
        for mode in ("domain", "range"):
            lam, g = disjoint_type_rescale(f, mode)
            cert = verify_disjoint_type(g, 512)
            details[f"{name}_{mode}"] = {
                "lam": lam, "radius": cert.checked_radius,
                "max_image": cert.max_image_modulus, "valid": cert.valid,
            }
            ok = ok and cert.valid
        coarse = verify_disjoint_type(disjoint_type_rescale(f)[1], 8)
        fine = verify_disjoint_type(disjoint_type_rescale(f)[1], 4096)
        ok = ok and (coarse.valid == fine.valid)
    return {"passed": ok, **details}


def check_semiconjugacy(rng) -> dict:
    worst = 0.0
    for _, f in _families():
        F = log_transform(f)
        for _ in range(10_000):
            w = _sample_tract_point(F, rng, spread=20.0)
            if w.real > 700:
                continue
            v = forward_on_tract(F, w)
            fz = evaluate(f, cmath.exp(w))
            if isinstance(fz, Escaped) or v.real > 700:
                continue
            worst = max(worst, abs(cmath.exp(v) - fz) / abs(fz))
    return {"passed": worst < 1e-10, "worst_relative_residual": worst}


def check_expansion(rng) -> dict:
    worst_margin = math.inf
    n = 0
    for _, f in _families():
        F = log_transform(f)
        for _ in range(5000):
            w = _sample_tract_point(F, rng)
            try:
                bound, actual = expansion_lower_bound(F, w)
            except LogtractError:
                return {"passed": False, "violation_at": str(w)}
            worst_margin = min(worst_margin, actual - bound)
            n += 1
    return {"passed": worst_margin >= -8 * _EPS, "samples": n, "worst_margin": worst_margin}


def check_tract_disjointness(rng) -> dict:
    flips = 0
    boundary = 0
    for _, f in _families():
        F = log_transform(f)
        for _ in range(1500):
            w = _sample_tract_point(F, rng)
            base = tract_of(F, w)
            for du in (8 * _EPS, -8 * _EPS):
                w2 = complex(w.real * (1 + du), w.imag * (1 + du))
                t2 = tract_of(F, w2)
                if isinstance(t2, NotInTract):
                    if t2.boundary:
                        boundary += 1
                    else:
                        flips += 1
                elif t2 != base:
                    flips += 1
    return {"passed": flips == 0, "flips": flips, "boundary_flags": boundary}


def check_equivariance(rng) -> dict:
    worst = 0.0
    f = Exponential(1)
    F = log_transform(f)
    for _ in range(500):
        k = rng.randint(-8, 8)
        v = complex(F.logL + 0.5 + rng.random() * 30, (rng.random() - 0.5) * 30)
        w1 = inverse_branch(F, k + 1, v)
        w0 = inverse_branch(F, k, v)
        worst = max(worst, abs(w1 - w0 - 2j * math.pi))
    return {"passed": worst < 1e-12, "worst": worst}


def check_contraction(rng) -> dict:
    lam, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    worst = 0.0
    for _ in range(20):
        pre = tuple(rng.randint(-6, 6) for _ in range(rng.randint(0, 3)))
        per = tuple(rng.randint(-6, 6) for _ in range(rng.randint(1, 3)))
        s = Itinerary(pre, per)
        lad = anchored_ladder(G, s, 40, t=2.0 + rng.random())
        rats = [r for r in lad.ratios() if math.isfinite(r)]
        if rats:
            worst = max(worst, max(rats))
    return {"passed": worst <= 0.5 + 1e-6, "worst_ratio": worst}


def check_forward_backward(rng) -> dict:
    lam, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    worst = 0.0
    for _ in range(20):
        s = Itinerary((rng.randint(-4, 4),), (rng.randint(-4, 4),))
        seed = complex(31.0, 0.0)
        p = pullback_point(G, s, 12, seed)
        q = pullback_point(G, s.shifted(), 11, seed)
        fw = forward_on_tract(G, p.position)
        err = abs(fw - q.position)
        allow = 10 * (p.error.total(abs(p.position)) + q.error.total(abs(q.position))) + 1e-12
        worst = max(worst, err - allow)
    return {"passed": worst <= 0, "worst_excess": worst}


def check_tail_injectivity(rng) -> dict:
    lam, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    tail = trace_tail(G, Itinerary.constant(0), 0.0, 1e30, 1e-3, max_samples=600)
    ts = tail.ts()
    strict_t = all(b > a for a, b in zip(ts, ts[1:]))
    distinct = True
    for a, b in zip(tail.samples, tail.samples[1:]):
        sep = abs(b.position - a.position)
        if sep <= a.error.analytic_bound + b.error.analytic_bound:
            distinct = False
    return {"passed": strict_t and distinct, "samples": len(ts)}


def check_brush(rng) -> dict:
    ok = True
    B = brushmod.worked_instance()
    ok &= brushmod.avoiding_threshold(B, "H1", 0) == Fraction(10)
    ok &= brushmod.avoiding_threshold(B, "H1", 1) == Fraction(23, 2)
    ok &= brushmod.limit_threshold(B, "H1") == Fraction(23, 2)
    ok &= brushmod.project_exact(B, brushmod.BrushPoint("H1", Fraction(102, 10))).t == Fraction(23, 2)
    worst_iter = 0.0
    for _ in range(60):
        inst = brushmod.random_brush(rng, 12)
        mx, _ = brushmod.crossing_count(inst)
        ok &= mx <= 1
        ok &= brushmod.check_axioms(inst).passed
        hid = rng.choice(inst.hairs).hid
        zs = [brushmod.avoiding_threshold(inst, hid, n) for n in range(16)]
        ok &= all(b >= a for a, b in zip(zs, zs[1:]))
        ok &= all(zs[n] - zs[n - 1] <= inst.Q / inst.expansion ** n for n in range(1, 16))
        zi = brushmod.limit_threshold(inst, hid)
        ok &= all(zi >= z for z in zs)
        # pi_model order preservation and idempotence
        t1 = float(inst.hair(hid).t0) + rng.random() * 10
        t2 = t1 + rng.random() * 10
        p1 = brushmod.project_exact(inst, brushmod.BrushPoint(hid, Fraction(t1)))
        p2 = brushmod.project_exact(inst, brushmod.BrushPoint(hid, Fraction(t2)))
        ok &= p2.t >= p1.t
        ok &= brushmod.project_exact(inst, p1).t == p1.t
        # iterative engine agreement
        plane, step, inside = brushmod.float_curve(inst, hid)
        cd = CurveDynamics(plane, step, inside)
        t0 = float(inst.hair(hid).t0)
        top = float(brushmod.avoiding_threshold(inst, hid, 12)) + 4.0
        grid = [t0 + (top - t0) * j / 300 for j in range(301)]
        for n in (0, 2, 7, 12):
            got, _ = first_avoiding(cd, t0, n, grid, 1e-15)
            worst_iter = max(worst_iter, abs(got - float(brushmod.avoiding_threshold(inst, hid, n))))
    ok &= worst_iter <= 1e-12
    return {"passed": bool(ok), "worst_iterative_error": worst_iter}


def check_brush_defect(rng) -> dict:
    """Exact semi-conjugacy defect on a brush: defect points' orbits meet
    the closed square, and the defect set has bounded parameter extent."""
    ok = True
    for _ in range(20):
        inst = brushmod.random_brush(rng, 10)
        for h in inst.hairs:
            bound = brushmod.limit_threshold(inst, h.hid)
            for j in range(12):
                t = h.t0 + Fraction(j, 2)
                p = brushmod.BrushPoint(h.hid, t)
                lhs = brushmod.brush_map(inst, brushmod.project_exact(inst, p))
                rhs = brushmod.project_exact(inst, brushmod.brush_map(inst, p))
                if lhs != rhs:
                    # orbit must meet the closed square
                    q = p
                    meets = False
                    for _ in range(40):
                        hh = inst.hair(q.hid)
                        if hh.height.abs_below(inst.Q) and q.t <= inst.Q:
                            meets = True
                            break
                        q = brushmod.brush_map(inst, q)
                    ok &= meets
                    ok &= t <= bound  # defect confined below the limit threshold
    return {"passed": bool(ok)}


def check_conjugacy(rng) -> dict:
    f = Exponential(1)
    C, g = make_conjugacy(f)
    rep = verify_conjugacy(C, 120, rng)
    ratio_worst = 0.0
    for _ in range(25):
        w = deep_hair_point(C.G, rng.randint(-2, 2), 31.0 + rng.random() * 300)
        try:
            _, _, disps = _pullback_conjugate(C.G, C.F, C.displacement_bound, w, C.Q, C.depth)
        except LogtractError:
            continue
        for d1, d2 in zip(disps, disps[1:]):
            if d1 > 1e-13:
                ratio_worst = max(ratio_worst, d2 / d1)
    C1 = ConjugacyMap(C.F, C.F, 1.0, 5.0, 4)
    w0 = complex(2.0, 1.0)
    ident = conjugate_log(C1, w0)[0] == w0
    return {"passed": rep.valid and ratio_worst <= 0.5 + 1e-6 and ident,
            "report_valid": rep.valid, "worst_theta_ratio": ratio_worst,
            "identity_exact": ident,
            "max_displacement": rep.max_displacement,
            "displacement_bound": rep.displacement_bound,
            "max_residual": rep.max_residual}


def check_projection_idempotence(rng) -> dict:
    lam, g = disjoint_type_rescale(Exponential(1))
    G = log_transform(g)
    cfg = ProjectionConfig(R=math.exp(30.0), n_max=20, t_tol=1e-6)
    ok = True
    for k in (0, 1, -2):
        tail = trace_tail(G, Itinerary.constant(k), 0.0, 1e80, 0.02,
                          max_samples=800, depth=2)
        ts = tail.ts()
        t_probe = ts[len(ts) // 3]
        res = project_limit(g, tail, t_probe, cfg)
        if not res.converged:
            ok = False
            continue
        res2 = project_limit(g, tail, res.output_t, cfg)
        ok &= res2.converged and abs(res2.output_t - res.output_t) <= cfg.t_tol * (1 + abs(res.output_t))
        ok &= all(b >= a for (_, a), (_, b) in zip(res.zn_trace, res.zn_trace[1:]))
    return {"passed": bool(ok)}


def check_order(rng) -> dict:
    f = Exponential(1)
    C, g = make_conjugacy(f)
    ok = True
    for _ in range(20):
        s1 = Itinerary((rng.randint(-5, 5),), (rng.randint(-5, 5),))
        s2 = Itinerary((rng.randint(-5, 5),), (rng.randint(-5, 5),))
        o12 = vertical_order(C.G, s1, s2)
        o21 = vertical_order(C.G, s2, s1)
        ok &= o12 == -o21
        of = vertical_order(C.F, s1, s2)
        ok &= of == o12
    ok &= vertical_order(C.G, Itinerary.constant(0), Itinerary.constant(1)) == -1
    return {"passed": bool(ok)}


CHECKS = [
    ("regions", check_regions),
    ("family_evaluation", check_family_evaluation),
    ("disjoint_rescale", check_disjoint_rescale),
    ("semiconjugacy", check_semiconjugacy),
    ("expansion_inequality", check_expansion),
    ("tract_disjointness", check_tract_disjointness),
    ("inverse_branch_equivariance", check_equivariance),
    ("pullback_contraction", check_contraction),
    ("forward_backward_identity", check_forward_backward),
    ("tail_injectivity", check_tail_injectivity),
    ("brush_invariants", check_brush),
    ("brush_commutation_defect", check_brush_defect),
    ("conjugacy_bounds", check_conjugacy),
    ("projection_idempotence", check_projection_idempotence),
    ("vertical_order", check_order),
]


def run_all(cfg: RunConfig) -> dict:
    results = {}
    all_ok = True
    for name, fn in CHECKS:
        rng = random.Random(cfg.seed ^ zlib.crc32(name.encode()))
        try:
            out = fn(rng)
        except LogtractError as exc:
            out = {"passed": False, "error": f"{exc.kind}: {exc}"}
        results[name] = out
        all_ok &= bool(out.get("passed"))
    return {"all_passed": all_ok, "checks": results}
