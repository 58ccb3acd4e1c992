"""Command-line entry point.

Subcommands: trace, render, project, conjugate, brush, verify.  All take
--config (JSON), --out, --seed; structured results go to JSON/CSV files in
the output directory, rasters to PNG.  Exit codes: 0 success, 1 usage,
2 domain error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import random
import sys

from . import brush as brushmod
from .config import VERSION, RunConfig, dump_json, load_config
from .conjugacy import ConjugacyMap, make_conjugacy, verify_conjugacy
from .errors import LogtractError
from .families import disjoint_type_rescale
from .logspace import Itinerary, log_transform
from .projection import ProjectionConfig, commutation_defect, project_limit
from .rays import HairTail, trace_tail
from .verify import run_all


def _ensure_out(cfg: RunConfig, override: str | None) -> str:
    out = override or cfg.out_dir
    os.makedirs(out, exist_ok=True)
    return out


def _rescaled(cfg: RunConfig):
    f = cfg.family_obj()
    lam, g = disjoint_type_rescale(f, cfg.rescale_mode)
    return f, lam, g


def _tail_csv(path: str, tail: HairTail, cfg: RunConfig) -> None:
    with open(path, "w") as fh:
        fh.write(f"# logtract {VERSION} config={cfg.hash()}\n")
        fh.write("t,re_log,im_log,re_plane,im_plane,err\n")
        for p in tail.samples:
            zp = p.plane_position
            re_p = repr(zp.real) if zp is not None else "inf"
            im_p = repr(zp.imag) if zp is not None else "inf"
            fh.write(f"{p.t!r},{p.position.real!r},{p.position.imag!r},"
                     f"{re_p},{im_p},{p.error.analytic_bound!r}\n")


def _tail_json(tail: HairTail) -> dict:
    return {
        "itinerary": tail.itinerary.to_json(),
        "samples": [
            {"t": p.t, "position": [p.position.real, p.position.imag],
             "plane": None if p.plane_position is None
             else [p.plane_position.real, p.plane_position.imag],
             "depth": p.depth, "err": p.error.analytic_bound}
            for p in tail.samples
        ],
    }


def cmd_trace(cfg: RunConfig, out: str) -> int:
    _, _, g = _rescaled(cfg)
    G = log_transform(g)
    summary = {"addresses": [], "max_err": 0.0}
    for i, addr in enumerate(cfg.addresses):
        s = Itinerary.from_json(addr)
        tail = trace_tail(G, s, cfg.trace.t_min, cfg.trace.t_max, cfg.trace.tol,
                          spacing=cfg.trace.spacing, max_samples=cfg.trace.max_samples,
                          k_max=cfg.trace.k_max)
        _tail_csv(os.path.join(out, f"tail_{i}.csv"), tail, cfg)
        dump_json(_tail_json(tail), os.path.join(out, f"tail_{i}.json"), cfg)
        worst = max(p.error.analytic_bound for p in tail.samples)
        summary["addresses"].append({"index": i, "itinerary": addr,
                                     "samples": len(tail.samples), "max_err": worst})
        summary["max_err"] = max(summary["max_err"], worst)
    dump_json(summary, os.path.join(out, "trace_summary.json"), cfg)
    return 0


def cmd_render(cfg: RunConfig, out: str) -> int:
    from .render import render_image, save_png

    f = cfg.family_obj()
    tails = []
    if cfg.render.overlay_rays and cfg.addresses:
        _, _, g = _rescaled(cfg)
        G = log_transform(g)
        for addr in cfg.addresses:
            s = Itinerary.from_json(addr)
            try:
                tails.append(trace_tail(G, s, cfg.trace.t_min, cfg.trace.t_max,
                                        cfg.trace.tol, spacing=cfg.trace.spacing,
                                        max_samples=cfg.trace.max_samples,
                                        k_max=cfg.trace.k_max))
            except LogtractError:
                continue
    img = render_image(f, cfg.render, tails)
    save_png(img, os.path.join(out, "escape.png"), cfg.hash())
    return 0


def cmd_project(cfg: RunConfig, out: str) -> int:
    _, _, g = _rescaled(cfg)
    G = log_transform(g)
    pcfg = ProjectionConfig(R=math.exp(cfg.projection.log_R),
                            n_max=cfg.projection.n_max,
                            t_tol=cfg.projection.t_tol,
                            orbit_horizon=cfg.projection.orbit_horizon)
    report = {"hairs": [], "defects": None}
    pairs = []
    ps = cfg.projection
    for i, addr in enumerate(cfg.addresses):
        s = Itinerary.from_json(addr)
        tail = trace_tail(G, s, 0.0, ps.trace_t_max, ps.trace_tol,
                          spacing=ps.trace_spacing, max_samples=cfg.trace.max_samples,
                          k_max=cfg.trace.k_max, depth=ps.trace_depth)
        image_tail = trace_tail(G, s.shifted(), 0.0, ps.trace_t_max, ps.trace_tol,
                                spacing=ps.trace_spacing, max_samples=cfg.trace.max_samples,
                                k_max=cfg.trace.k_max, depth=ps.trace_depth)
        pairs.append((tail, image_tail))
        ts = tail.ts()
        rows = []
        for j in range(cfg.projection.samples_per_hair):
            t = ts[0] + (ts[-1] - ts[0]) * (j + 0.5) / cfg.projection.samples_per_hair
            res = project_limit(g, tail, t, pcfg)
            rows.append({"t": t, "output_t": res.output_t, "n_used": res.n_used,
                         "converged": res.converged, "zn_trace": res.zn_trace,
                         "gap_ratios": res.gap_ratios})
            with open(os.path.join(out, f"zn_trace_{i}_{j}.csv"), "w") as fh:
                fh.write(f"# logtract {VERSION} config={cfg.hash()}\n")
                fh.write("n,t\n")
                for n, tv in res.zn_trace:
                    fh.write(f"{n},{tv!r}\n")
        report["hairs"].append({"index": i, "itinerary": addr, "projections": rows})
    defect = commutation_defect(g, G, pairs, pcfg, n_samples=6)
    report["defects"] = {
        "samples": defect.samples,
        "count": len(defect.defects),
        "max_defect_log_modulus": defect.max_defect_log_modulus,
        "tolerance": defect.tolerance,
        "all_orbits_meet_region": all(d.orbit_meets_region for d in defect.defects),
    }
    dump_json(report, os.path.join(out, "projection_report.json"), cfg)
    return 0


def cmd_conjugate(cfg: RunConfig, out: str) -> int:
    f = cfg.family_obj()
    if cfg.conjugacy.lam_override == 1.0:
        F = log_transform(f)
        C = ConjugacyMap(F, F, 1.0, cfg.conjugacy.Q or 5.0, cfg.conjugacy.depth)
    else:
        C, _ = make_conjugacy(f, Q=cfg.conjugacy.Q, depth=cfg.conjugacy.depth)
    rng = random.Random(cfg.seed)
    rep = verify_conjugacy(C, cfg.conjugacy.samples, rng)
    data = {
        "lam": [C.lam.real, C.lam.imag] if isinstance(C.lam, complex) else [float(C.lam), 0.0],
        "Q": C.Q, "samples": rep.samples, "converged": rep.converged,
        "max_residual": rep.max_residual,
        "plane_samples": rep.plane_samples, "max_plane_residual": rep.max_plane_residual,
        "max_displacement": rep.max_displacement,
        "displacement_bound": rep.displacement_bound,
        "violations": {
            "displacement": rep.displacement_violations,
            "annulus": rep.annulus_violations,
            "equivariance": rep.equivariance_violations,
            "roundtrip": rep.roundtrip_failures,
            "escape_transport": rep.escape_transport_failures,
        },
        "valid": rep.valid,
    }
    dump_json(data, os.path.join(out, "conjugacy_report.json"), cfg)
    status = "PASS" if rep.valid else "FAIL"
    print(f"conjugacy {status}: displacement {rep.max_displacement:.4f} <= "
          f"{rep.displacement_bound:.4f}, residual {rep.max_residual:.3e}, "
          f"{rep.converged}/{rep.samples} converged")
    return 0 if rep.valid else 3


def cmd_brush(cfg: RunConfig, out: str) -> int:
    B = brushmod.brush_from_json(cfg.brush) if cfg.brush else brushmod.worked_instance()
    ax = brushmod.check_axioms(B)
    mx, counts = brushmod.crossing_count(B)
    pi_rows = []
    for h in B.hairs:
        zs = [float(brushmod.avoiding_threshold(B, h.hid, n)) for n in range(11)]
        zi = brushmod.limit_threshold(B, h.hid)
        probes = [float(h.t0) + 0.2, float(zi) + 0.5]
        pis = [[t, float(brushmod.project_exact(B, brushmod.BrushPoint(h.hid, t)).t)]
               for t in probes]
        pi_rows.append({"hid": h.hid, "zn": zs, "z_limit": float(zi), "pi": pis})
    data = {
        "axioms": {"passed": ax.passed, "violations": ax.violations, "note": ax.note},
        "max_crossings": mx, "crossings": counts, "hairs": pi_rows,
    }
    dump_json(data, os.path.join(out, "brush_report.json"), cfg)
    with open(os.path.join(out, "brush_zn.csv"), "w") as fh:
        fh.write(f"# logtract {VERSION} config={cfg.hash()}\n")
        fh.write("hid,n,zn\n")
        for row in pi_rows:
            for n, z in enumerate(row["zn"]):
                fh.write(f"{row['hid']},{n},{z!r}\n")
    return 0


def cmd_verify(cfg: RunConfig, out: str) -> int:
    report = run_all(cfg)
    dump_json(report, os.path.join(out, "verify_report.json"), cfg)
    for name, res in report["checks"].items():
        print(f"{'PASS' if res.get('passed') else 'FAIL'} {name}")
    return 0 if report["all_passed"] else 3


COMMANDS = {
    "trace": cmd_trace,
    "render": cmd_render,
    "project": cmd_project,
    "conjugate": cmd_conjugate,
    "brush": cmd_brush,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="logtract", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON run config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="RNG seed override")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        out = _ensure_out(cfg, args.out)
        return COMMANDS[args.command](cfg, out)
    except LogtractError as exc:
        sys.stderr.write(json.dumps({"error": exc.kind, "message": str(exc)}) + "\n")
        return 2
    except (OSError, json.JSONDecodeError, TypeError, ValueError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
