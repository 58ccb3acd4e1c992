"""Certified pullback points, hair-tail tracing, endpoints, and escape
classification.

A point with a given tract itinerary is computed as the limit of inverse-
branch compositions applied to a seed deep in the right half-plane.  In the
rescaled regime (normalized margin >= 0) each composition step at least
halves distances, so the ladder of depth-m values carries certified error
bounds read off the measured gaps; an a-priori seed-separation diameter D
gives the independent bound D / 2^n.
"""

from __future__ import annotations

import cmath
import functools
import math
import sys
from dataclasses import dataclass

from .errors import (
    ContractRegimeError,
    DomainError,
    AddressNotRealized,
    UnresolvedTail,
)
from .families import Escaped, FunctionFamily, canonical_form, evaluate
from .logspace import (
    EIGHT_PI,
    Itinerary,
    LogTransform,
    MAX_LOG,
    NotInTract,
    TractId,
    inverse_branch,
    inverse_contraction_bound,
    normalized_margin,
    seed_anchor,
    tract_of,
)
from .regions import ErrorBudget

_EPS = sys.float_info.epsilon

DEFAULT_K_MAX = 16
# a-priori distance from an anchored seed to the nearest hair point: at most
# the horizontal gap to the hair's leftmost point (< 5 for bands |k| <= 16)
# plus the half-width of a tract band
SEED_SEP = 6.0
DEPTH_CAP = 64
TURNAROUND_ALLOWANCE = 0.5


@dataclass(frozen=True)
class RayPoint:
    """A certified approximation of the point with the given itinerary.

    `position` is in logarithmic coordinates; `plane_position` its
    exponential, or None when that leaves double range.  The analytic part
    of the error bounds the distance to the true limit point (for fixed-seed
    pullbacks) or to the hair (for tail samples).
    """

    itinerary: Itinerary
    depth: int
    position: complex
    plane_position: complex | None
    error: ErrorBudget
    t: float | None = None


@dataclass
class HairTail:
    """Sampled piece of a traced hair, ordered by the seed offset t."""

    itinerary: Itinerary
    samples: list[RayPoint]
    endpoint_estimate: RayPoint | None = None
    tracer: "TailTracer | None" = None

    def ts(self) -> list[float]:
        return [p.t for p in self.samples]


def _plane(w: complex) -> complex | None:
    if w.real > MAX_LOG:
        return None
    return cmath.exp(w)


def require_contract_regime(F: LogTransform) -> None:
    m = normalized_margin(F)
    if m < 0:
        raise ContractRegimeError(
            f"normalized margin {m:.3f} < 0: pullback contraction not certified")


def _check_window(s: Itinerary, k_max: int) -> None:
    if s.max_band() > k_max:
        raise AddressNotRealized(
            f"itinerary band {s.max_band()} outside the configured window {k_max}")


@dataclass
class Ladder:
    """Depth ladder of pullbacks along an itinerary.

    values[m] is the depth-m composition applied to seed(m); gaps[m] the
    jump from depth m-1.  Once gaps hit the float floor the ladder freezes,
    so recorded gaps never bounce at rounding scale.
    """

    values: list[complex]
    gaps: list[float]
    frozen_at: int | None

    def ratios(self) -> list[float]:
        out = []
        for i in range(2, len(self.gaps)):
            g0, g1 = self.gaps[i - 1], self.gaps[i]
            out.append(0.0 if g1 == 0.0 else (math.inf if g0 == 0.0 else g1 / g0))
        return out


def anchored_ladder(F: LogTransform, s: Itinerary, n: int, t: float = 2.0) -> Ladder:
    """Ladder with the canonical per-depth seeds: (log L + 8*pi + t) raised
    to the band of the depth-m itinerary entry.  Anchoring keeps the
    per-depth seed displacement uniform, which is what makes the measured
    gap ratios obey the 1/2 contraction certificate; a fixed seed across
    depths only satisfies the seed-independence bound."""
    return run_ladder(F, s, n, lambda m: seed_anchor(F, s.entry(m), t))


def run_ladder(F: LogTransform, s: Itinerary, n: int, seed_fn) -> Ladder:
    """Compute depth 0..n pullbacks; seed_fn(m) supplies the depth-m seed."""
    level = [seed_fn(j) for j in range(n + 1)]
    values = [level[0]]
    gaps = [0.0]
    frozen = None
    for m in range(1, n + 1):
        top = n - m
        nxt = [inverse_branch(F, s.entry(j), level[j + 1]) for j in range(top + 1)]
        level = nxt
        w = level[0]
        gap = abs(w - values[-1])
        floor = 8.0 * _EPS * (1.0 + abs(w))
        values.append(w)
        gaps.append(gap)
        if gap <= floor:
            frozen = m
            for mm in range(m + 1, n + 1):
                values.append(w)
                gaps.append(0.0)
            break
    return Ladder(values, gaps, frozen)


def _tail_bound(lad: Ladder, certified_half: bool, seed_sep: float) -> float:
    """Bound on the distance from the deepest ladder value to the limit."""
    n = len(lad.values) - 1
    g = lad.gaps[-1]
    if lad.frozen_at is not None:
        g = max(g, 8.0 * _EPS * (1.0 + abs(lad.values[-1])))
    if certified_half:
        return min(g, seed_sep / (2.0 ** n)) if n >= 1 else seed_sep
    ratios = [r for r in lad.ratios() if math.isfinite(r)]
    rho = min(max(ratios, default=0.95), 0.95)
    return g * rho / (1.0 - rho) if rho < 1.0 else math.inf


def pullback_point(F: LogTransform, s: Itinerary, n: int, seed: complex, *,
                   k_max: int = DEFAULT_K_MAX, seed_sep: float = SEED_SEP) -> RayPoint:
    """Depth-n inverse-branch composition along s applied to a fixed seed.

    Requires the contraction regime and a seed with Re > log L.  The
    analytic error bound covers the distance to the depth-infinity limit.
    """
    require_contract_regime(F)
    _check_window(s, k_max)
    if not seed.real > F.logL:
        raise DomainError(f"seed must satisfy Re > log L = {F.logL}")
    if n < 1:
        raise DomainError("depth must be at least 1")
    lad = run_ladder(F, s, n, lambda m: seed)
    w = lad.values[-1]
    tid = tract_of(F, w)
    if isinstance(tid, NotInTract) or tid != s.entry(0):
        raise DomainError(f"pullback left its tract: {tid} != {s.entry(0)}")
    bound = _tail_bound(lad, certified_half=True, seed_sep=max(seed_sep, abs(seed)))
    return RayPoint(
        itinerary=s,
        depth=n,
        position=w,
        plane_position=_plane(w),
        error=ErrorBudget(bound, 4 * n + 2),
    )


class TailTracer:
    """Evaluator for points of one hair, keyed by the seed offset t.

    gamma(t) is the depth-n pullback of the seed (log L + 8*pi + t) + i*y
    anchored at the depth-n itinerary entry's band.  With depth=None the
    smallest depth whose certified bound reaches tol is used (good for deep
    windows); a fixed depth pins one smooth stratum of the parametrisation,
    which projections rely on for continuous coverage.

    The certified bound starts at the seed-separation diameter and shrinks
    by a closed-form contraction factor per pullback.  The factor at each
    step may use the segment's infimum abscissa: the chain value and the
    tracked hair point both sit at Re >= max(tract floor, Re - carried
    distance), and Re is linear along segments.
    """

    def __init__(self, F: LogTransform, s: Itinerary, tol: float, *,
                 k_max: int = DEFAULT_K_MAX, seed_sep: float = SEED_SEP,
                 depth_cap: int = DEPTH_CAP, depth: int | None = None):
        require_contract_regime(F)
        _check_window(s, k_max)
        if tol <= 0:
            raise DomainError("tolerance must be positive")
        self.F = F
        self.s = s
        self.tol = tol
        self.seed_sep = seed_sep
        self.depth_cap = depth_cap
        self.depth = depth
        self._floor = F.logL + EIGHT_PI + max(0.0, normalized_margin(F))

    def seed(self, m: int, t: float) -> complex:
        return seed_anchor(self.F, self.s.entry(m), t)

    def _step_factor(self, re_v: float, dist: float) -> float:
        re_min = max(min(re_v, self._floor), re_v - dist)
        return min(0.5, inverse_contraction_bound(self.F, re_min))

    def _chain(self, n: int, t: float) -> tuple[complex, float]:
        w = self.seed(n, t)
        dist = self.seed_sep
        for j in range(n - 1, -1, -1):
            dist *= self._step_factor(w.real, min(dist, self.seed_sep))
            w = inverse_branch(self.F, self.s.entry(j), w)
        return w, dist

    def point(self, t: float, strict: bool = True) -> RayPoint:
        """Certified sample at offset t; in strict mode the bound must
        reach tol, otherwise the best achievable bound is returned as-is
        (float range caps what is knowable about some hair segments)."""
        if t < 0:
            raise DomainError("seed offset t must be nonnegative")
        best: tuple[complex, float, int] | None = None
        depths = [self.depth] if self.depth is not None \
            else range(1, self.depth_cap + 1)
        for n in depths:
            try:
                w, bound = self._chain(n, t)
            except (OverflowError, DomainError):
                break
            if best is None or bound < best[1]:
                best = (w, bound, n)
            if bound < self.tol:
                break
        if best is None:
            raise UnresolvedTail("no pullback depth is representable at this offset")
        w, bound, n = best
        if strict and bound >= self.tol:
            raise UnresolvedTail(
                f"certified bound {bound:.3e} above tol {self.tol:.3e} (float-range floor)")
        return RayPoint(self.s, n, w, _plane(w), ErrorBudget(bound, 4 * n + 2), t)


def _warped_mid(F: LogTransform, a: float, b: float) -> float:
    """Midpoint of two seed offsets, geometric in the full seed abscissa
    (hairs live on exponential scales, so linear bisection never converges
    on wide windows)."""
    c = F.logL + EIGHT_PI
    return math.exp(0.5 * (math.log(c + a) + math.log(c + b))) - c


def trace_tail(F: LogTransform, s: Itinerary, t_min: float, t_max: float,
               tol: float, *, spacing: float = 0.25, max_samples: int = 2000,
               k_max: int = DEFAULT_K_MAX, initial: int = 9,
               depth: int | None = None) -> HairTail:
    """Sample the hair over [t_min, t_max], refining until consecutive
    log-plane positions sit within `spacing` of each other."""
    if t_min > t_max:
        raise DomainError("t_min must not exceed t_max")
    tracer = TailTracer(F, s, tol, k_max=k_max, depth=depth)
    if t_min == t_max:
        return HairTail(s, [tracer.point(t_min)], tracer=tracer)
    c = F.logL + EIGHT_PI
    ratio = (c + t_max) / (c + t_min)
    ts = [(c + t_min) * ratio ** (j / (initial - 1)) - c for j in range(initial)]
    ts[0], ts[-1] = t_min, t_max
    pts = [tracer.point(t) for t in ts]
    while True:
        inserted = False
        j = 0
        while j < len(pts) - 1:
            a, b = pts[j], pts[j + 1]
            if abs(b.position - a.position) > spacing and (b.t - a.t) > 4.0 * _EPS * (1 + b.t):
                if len(pts) >= max_samples:
                    raise UnresolvedTail(f"sample budget {max_samples} exhausted")
                mid = _warped_mid(F, a.t, b.t)
                if not a.t < mid < b.t:
                    mid = 0.5 * (a.t + b.t)
                pts.insert(j + 1, tracer.point(mid))
                inserted = True
            j += 1
        if not inserted:
            break
    pts = _dedup(pts)
    _assert_tail_shape(pts)
    return HairTail(s, pts, tracer=tracer)


def _dedup(pts: list[RayPoint]) -> list[RayPoint]:
    """Drop samples certifiably indistinguishable from their predecessor
    (separation within summed bounds); deep contraction makes such
    duplicates inevitable on grids touching the endpoint."""
    kept = [pts[0]]
    for p in pts[1:]:
        prev = kept[-1]
        floor = prev.error.analytic_bound + p.error.analytic_bound \
            + 64.0 * _EPS * (1.0 + abs(p.position))
        if abs(p.position - prev.position) > floor:
            kept.append(p)
    return kept


def _assert_tail_shape(pts: list[RayPoint]) -> None:
    for a, b in zip(pts, pts[1:]):
        if not b.t > a.t:
            raise DomainError("tail samples must be strictly increasing in t")
    for a, b in zip(pts[1:], pts[2:]):
        if b.position.real < a.position.real - TURNAROUND_ALLOWANCE:
            raise DomainError(
                f"tail turns back in Re by more than the allowance at t={b.t}")


def hair_endpoint(F: LogTransform, s: Itinerary, tol: float, *,
                  k_max: int = DEFAULT_K_MAX, depth_cap: int = DEPTH_CAP) -> RayPoint | None:
    """Landing point of the hair: accelerated limit of the t=0 pullbacks.

    Aitken acceleration on the depth sequence; accepted after three
    consecutive agreements within tol, otherwise None.
    """
    require_contract_regime(F)
    _check_window(s, k_max)
    seeds = lambda m: seed_anchor(F, s.entry(m), 0.0)
    lad = run_ladder(F, s, depth_cap, seeds)
    e = lad.values
    accelerated: list[complex] = []
    agreements = 0
    last = None
    for m in range(2, len(e)):
        d1, d2 = e[m - 1] - e[m - 2], e[m] - e[m - 1]
        dd = d2 - d1
        acc = e[m] if abs(dd) == 0.0 else e[m] - d2 * d2 / dd
        accelerated.append(acc)
        if last is not None and abs(acc - last) < tol:
            agreements += 1
            if agreements >= 3:
                bound = _tail_bound(lad, certified_half=True, seed_sep=SEED_SEP)
                return RayPoint(s, m, acc, _plane(acc),
                                ErrorBudget(max(bound, abs(acc - last)), 6 * m), 0.0)
        else:
            agreements = 0
        last = acc
    return None


# ---------------------------------------------------------------------------
# escape classification

@dataclass(frozen=True)
class EscapeVerdict:
    kind: str                  # "escaping" | "reentered" | "undecided"
    index: int | None          # n_exit for escaping, re-entry step otherwise
    reason: str | None = None  # "overflow" | "monotone-real" for escapes
    log_moduli: tuple[float, ...] = ()

    @property
    def escaping(self) -> bool:
        return self.kind == "escaping"


@functools.lru_cache(maxsize=64)
def _monotone_real_threshold(f: FunctionFamily) -> float | None:
    """Real abscissa beyond which the family provably climbs to infinity
    along the real axis, or None when the coefficients make no such claim.

    For positive real coefficients the restriction to the reals is convex
    and increasing, so f(x) >= x + 1 together with slope >= 1.05 at one
    point pins the whole tail: each orbit step then gains at least 1.
    Rescaled families may have thresholds at e^30-like scales, hence the
    exponential search after the fine scan.
    """
    c = canonical_form(f)
    if any(p.imag != 0 or p.real <= 0 for p in c.params) or c.nu.imag != 0 or c.nu.real <= 0:
        return None

    def val(x: float) -> float:
        v = evaluate(f, complex(x, 0.0))
        return math.inf if isinstance(v, Escaped) else v.real

    x = 0.0
    while x <= 64.0:
        if val(x) >= x + 1.0 and val(x + 0.125) - val(x) >= 0.140625:
            return x
        x += 0.125
    x = 64.0
    while x <= 1e250:
        if val(x) >= x + 1.0 and val(x * 1.01) - val(x) >= 0.0105 * x:
            return x
        x *= 2.0
    return None


def escape_test(f: FunctionFamily, z: complex, R: float, horizon: int) -> EscapeVerdict:
    """Definite-escape classification of the orbit of z.

    Escaping only on sound evidence: float overflow (treated as definite by
    design) or entry of the orbit into the family's monotone real regime.
    ReEntered when the modulus drops below R after exceeding it; Undecided
    otherwise.  index reports the first step from which the recorded moduli
    stay at or above R.
    """
    if not R > f.L:
        raise DomainError(f"R must exceed the family's cutoff L={f.L}")
    if horizon < 1:
        raise DomainError("horizon must be at least 1")
    log_R = math.log(R)
    x0 = _monotone_real_threshold(f)
    logm: list[float] = []
    w: complex | Escaped = z
    reason = None
    for j in range(horizon + 1):
        if isinstance(w, Escaped):
            logm.append(math.inf)
            reason = "overflow"
            break
        logm.append(math.log(abs(w)) if abs(w) > 0 else -math.inf)
        if x0 is not None and w.imag == 0.0 and w.real >= x0:
            reason = "monotone-real"
            break
        if j < horizon:
            w = evaluate(f, w)
    if reason == "monotone-real":
        # continue the (real, increasing) orbit until it clears R, so the
        # exit index refers to the completed escape
        for _ in range(64):
            if logm[-1] >= log_R:
                break
            w = evaluate(f, w)
            if isinstance(w, Escaped):
                logm.append(math.inf)
                break
            logm.append(math.log(abs(w)))
    if reason is not None:
        n_exit = 0
        for i in range(len(logm) - 1, -1, -1):
            if logm[i] < log_R:
                n_exit = i + 1
                break
        return EscapeVerdict("escaping", n_exit, reason, tuple(logm))
    above = False
    for i, lm in enumerate(logm):
        if lm >= log_R:
            above = True
        elif above:
            return EscapeVerdict("reentered", i, None, tuple(logm))
    return EscapeVerdict("undecided", None, None, tuple(logm))


# ---------------------------------------------------------------------------
# speed-ordering falsification

@dataclass(frozen=True)
class SpeedOrderingReport:
    checked: int
    counterexample: tuple[complex, complex] | None

    @property
    def none_found(self) -> bool:
        return self.counterexample is None


def speed_ordering_check(F: LogTransform, a: float, b: float, n_pairs: int,
                         rng, *, k_window: int = 8, depth: float = 40.0) -> SpeedOrderingReport:
    """Falsification-only sampling of the linear speed ordering.

    phi(x) = a*x + b must dominate the identity on the sampled range; the
    check looks for tract-sharing pairs where Re w > phi(Re z) holds but
    Re F(w) > phi(Re F(z)) fails.  Finding none proves nothing and is
    reported as such.
    """
    if a < 1.0:
        raise DomainError("slope must be at least 1")
    x_lo = F.logL
    if (a - 1.0) * x_lo + b <= 0.0:
        raise DomainError("phi(x) = a*x + b must exceed x on the sampled range")

    def rand_tract() -> TractId:
        k = rng.randint(-k_window, k_window)
        if F.kind == "pair":
            from .logspace import PairTract
            return PairTract(rng.choice((1, -1)), rng.randint(-2, 2), k)
        return k

    def rand_in(tid: TractId) -> complex | None:
        # a tract point that is also a usable image value; below the
        # certified margin tracts poke left of the half-plane, so reject
        for _ in range(32):
            v = complex(F.logL + 0.5 + rng.random() * depth, (rng.random() - 0.5) * depth)
            p = inverse_branch(F, tid, v)
            if p.real > F.logL + 1e-9:
                return p
        return None

    checked = 0
    for _ in range(n_pairs):
        T = rand_tract()
        T_img = rand_tract()
        vz = rand_in(T_img)
        vw = rand_in(T_img)
        if vz is None or vw is None:
            continue
        z = inverse_branch(F, T, vz)
        w = inverse_branch(F, T, vw)
        for (p, fp), (q, fq) in (((z, vz), (w, vw)), ((w, vw), (z, vz))):
            if q.real > a * p.real + b:
                checked += 1
                if not fq.real > a * fp.real + b:
                    return SpeedOrderingReport(checked, (p, q))
    return SpeedOrderingReport(checked, None)
