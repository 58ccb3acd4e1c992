"""Projection of hair points to the least point after them whose forward
orbit avoids a fixed bounded region.

The finite-depth projection scans a traced hair for the first parameter
whose orbit stays clear for n steps, then bisects the crossing down to a
relative parameter tolerance.  The limit projection iterates the depth and
accepts once the parameter stabilises; monotonicity of the thresholds is
structural (the depth-(n+1) scan starts at the depth-n result).

The engine is generic over a curve, a one-step dynamics, and a region, so
the same code runs on numerically traced hairs and on the exact affine
brush model that serves as its oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import DomainError, TailTooShort
from .families import Escaped, FunctionFamily, evaluate
from .logspace import LogOverflow, LogTransform, forward_on_tract
from .rays import HairTail, RayPoint
from .regions import Disc, Region, contains


@dataclass(frozen=True)
class ProjectionConfig:
    R: float
    region: Region | None = None      # default: open disc of radius R at 0
    n_max: int = 30
    t_tol: float = 1e-6               # relative: accepted at t_tol * (1 + |t|)
    orbit_horizon: int = 64

    def resolved_region(self) -> Region:
        return self.region if self.region is not None else Disc(0j, self.R)

    def __post_init__(self):
        if self.n_max < 1:
            raise DomainError("n_max must be at least 1")
        if self.t_tol <= 0:
            raise DomainError("t_tol must be positive")
        if self.orbit_horizon < self.n_max:
            raise DomainError("orbit horizon must cover n_max")


@dataclass
class ProjectionResult:
    input_t: float
    output_t: float
    output: RayPoint | None
    n_used: int
    zn_trace: list[tuple[int, float]]
    converged: bool
    gap_ratios: list[float]
    first_blocked_step: int | None    # smallest j whose orbit constraint moved the point


# ---------------------------------------------------------------------------
# generic engine

@dataclass
class CurveDynamics:
    """A curve with one-step dynamics and an avoidance test.

    plane(t):  point of the curve (opaque type, complex for traced hairs);
    step(z):   one application of the map (None/Escaped = left double
               range, treated as definitely outside any bounded region);
    inside(z): whether the point lies in the avoided region.
    """

    plane: Callable[[float], object]
    step: Callable[[object], object]
    inside: Callable[[object], bool]

    def orbit_clear(self, t: float, n: int, start: int = 0) -> tuple[bool, int | None]:
        """Whether orbit steps start..n avoid the region; on failure also
        the first offending step."""
        z = self.plane(t)
        for j in range(n + 1):
            if z is None or isinstance(z, Escaped):
                return True, None
            if j >= start and self.inside(z):
                return False, j
            if j < n:
                z = self.step(z)
        return True, None


def first_avoiding(cd: CurveDynamics, t_start: float, n: int,
                   grid: list[float], t_tol: float, start: int = 0) -> tuple[float, int | None]:
    """Minimal t' >= t_start on the curve whose orbit steps start..n avoid
    the region: linear scan over the grid, then bisection to relative t_tol.

    Returns (t', first blocked step at t_start) — the latter None when the
    start already satisfies the condition.  Raises TailTooShort when no
    grid point satisfies it.
    """
    ok, blocked = cd.orbit_clear(t_start, n, start)
    if ok:
        return t_start, None
    lo = t_start
    hi = None
    for t in grid:
        if t <= t_start:
            continue
        good, _ = cd.orbit_clear(t, n, start)
        if good:
            hi = t
            break
        lo = t
    if hi is None:
        raise TailTooShort(f"no parameter on the traced range clears {n} orbit steps")
    while hi - lo > t_tol * (1.0 + abs(hi)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        good, _ = cd.orbit_clear(mid, n, start)
        if good:
            hi = mid
        else:
            lo = mid
    return hi, blocked


# ---------------------------------------------------------------------------
# traced-hair wrappers

def _tail_dynamics(g: FunctionFamily, tail: HairTail, region: Region) -> CurveDynamics:
    if tail.tracer is None:
        raise DomainError("tail carries no tracer; re-trace it in-process")
    tracer = tail.tracer

    def plane(t: float):
        return tracer.point(t, strict=False).plane_position

    def step(z: complex):
        return evaluate(g, z)

    return CurveDynamics(plane, step, lambda z: contains(region, z))


def project_depth(g: FunctionFamily, tail: HairTail, t: float, n: int,
                  cfg: ProjectionConfig) -> RayPoint:
    """Finite-depth projection of the tail point at parameter t: the least
    t' >= t whose first n forward steps avoid the region."""
    if not cfg.R > g.L:
        raise DomainError(f"projection radius {cfg.R} must exceed the cutoff L={g.L}")
    cd = _tail_dynamics(g, tail, cfg.resolved_region())
    grid = sorted({p.t for p in tail.samples} | {t})
    t_out, _ = first_avoiding(cd, t, n, grid, cfg.t_tol)
    return tail.tracer.point(t_out, strict=False)


def project_limit(g: FunctionFamily, tail: HairTail, t: float,
                  cfg: ProjectionConfig, start: int = 0) -> ProjectionResult:
    """Depth-iterated projection: run the finite-depth projection for
    n = 0, 1, ... and accept once the parameter stabilises for three
    consecutive depths within the relative tolerance.

    start > 0 shifts the orbit condition: the least point whose orbit
    steps start..n avoid the region (start=1 realises map-then-project
    through the order isomorphism of a hair onto its image).
    """
    if not cfg.R > g.L:
        raise DomainError(f"projection radius {cfg.R} must exceed the cutoff L={g.L}")
    cd = _tail_dynamics(g, tail, cfg.resolved_region())
    grid = sorted({p.t for p in tail.samples} | {t})
    trace: list[tuple[int, float]] = []
    cur = t
    stable = 0
    converged = False
    n_used = cfg.n_max
    first_blocked: int | None = None
    for n in range(start, cfg.n_max + 1):
        nxt, blocked = first_avoiding(cd, cur, n, grid, cfg.t_tol, start)
        if first_blocked is None and blocked is not None:
            first_blocked = blocked
        if nxt < cur:
            raise DomainError("projection thresholds regressed; scan invariant broken")
        trace.append((n, nxt))
        if n >= 1:
            if abs(nxt - cur) <= cfg.t_tol * (1.0 + abs(nxt)):
                stable += 1
                if stable >= 3:
                    converged = True
                    n_used = n
                    cur = nxt
                    break
            else:
                stable = 0
        cur = nxt
    gaps = [abs(b - a) for (_, a), (_, b) in zip(trace, trace[1:])]
    ratios = [g2 / g1 for g1, g2 in zip(gaps, gaps[1:]) if g1 > 0 and g2 > 0]
    out = tail.tracer.point(cur, strict=False) if converged else None
    return ProjectionResult(
        input_t=t, output_t=cur, output=out, n_used=n_used, zn_trace=trace,
        converged=converged, gap_ratios=ratios, first_blocked_step=first_blocked,
    )


# ---------------------------------------------------------------------------
# commutation defect

@dataclass
class DefectSample:
    address_key: str
    t: float
    relative_defect: float        # two-route separation over the route scale
    log_modulus: float            # Re of the defect point's log position
    orbit_meets_region: bool
    on_image_tail: bool | None    # map-then-project lands on the traced image
    n_used: int                   # (None: image tail not traced to that zone)


@dataclass
class DefectReport:
    samples: int
    defects: list[DefectSample]
    max_defect_log_modulus: float | None
    tolerance: float


def commutation_defect(g: FunctionFamily, G: LogTransform,
                       pairs: list[tuple[HairTail, HairTail]],
                       cfg: ProjectionConfig, n_samples: int,
                       tolerance: float = 1e-6) -> DefectReport:
    """Compare project-then-map against map-then-project along hairs.

    The map restricted to a hair is an order isomorphism onto the image
    hair, so projecting the image point equals mapping the least parameter
    whose orbit steps 1..n+1 avoid the region; that realisation keeps both
    routes on one parametrisation.  The traced image tail cross-checks that
    the second route's result indeed lies on it.  Defects are recorded with
    evidence that the sample's own orbit meets the region.
    """
    defects: list[DefectSample] = []
    total = 0
    for tail, image_tail in pairs:
        ts = tail.ts()
        lo = ts[0]
        # clip to the zone where the region can interact at all; hairs live
        # on exponential parameter scales, so sample log-uniformly
        reach = math.log(cfg.R) + 1.5
        inside = [p.t for p in tail.samples if p.position.real <= reach]
        hi = max(inside) if inside else ts[-1]
        if hi <= lo:
            hi = ts[-1]
        ratio = (1.0 + hi) / (1.0 + lo)
        cd = _tail_dynamics(g, tail, cfg.resolved_region())
        image_pts = [p.position for p in image_tail.samples]
        for i in range(n_samples):
            t = (1.0 + lo) * ratio ** ((i + 0.5) / n_samples) - 1.0
            total += 1
            res = project_limit(g, tail, t, cfg)
            res2 = project_limit(g, tail, t, cfg, start=1)
            if not (res.converged and res2.converged):
                continue
            try:
                route1 = forward_on_tract(G, res.output.position)   # g(pi(z))
                route2 = forward_on_tract(G, res2.output.position)  # pi(g(z))
            except LogOverflow:
                continue
            scale = 1.0 + abs(route2)
            d = abs(route1 - route2) / scale
            err = (res.output.error.analytic_bound + res2.output.error.analytic_bound)
            if d > tolerance + err:
                _, blocked = cd.orbit_clear(t, res.n_used)
                lo_im = min(q.real for q in image_pts)
                hi_im = max(q.real for q in image_pts)
                if lo_im - 0.5 <= route2.real <= hi_im + 0.5:
                    on_image = any(abs(route2 - q) <= 0.5 + err * scale for q in image_pts)
                else:
                    on_image = None  # image tail not traced out to this zone
                zpos = tail.tracer.point(t, strict=False).position
                defects.append(DefectSample(
                    address_key=str(tail.itinerary.to_json()),
                    t=t,
                    relative_defect=d,
                    log_modulus=zpos.real,
                    orbit_meets_region=blocked is not None,
                    on_image_tail=on_image,
                    n_used=res.n_used,
                ))
    max_mod = max((d.log_modulus for d in defects), default=None)
    return DefectReport(samples=total, defects=defects,
                        max_defect_log_modulus=max_mod, tolerance=tolerance)
