"""End-to-end path from an escaping seed to a certified ray tail through
one of its orbit points.

Steps: classify the orbit as definitely escaping; read the tract itinerary
of the orbit from the first index that stays beyond the radius; trace the
corresponding hair of the disjoint-type rescaling; transport it through the
near-infinity conjugacy; and check that the orbit point sits on the
transported tail within the combined certified error.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .conjugacy import ConjugacyMap, conjugate_log, conjugate_log_inverse, make_conjugacy
from .errors import DomainError, ItineraryUnreadable, OrbitLeftHalfPlane
from .families import Escaped, FunctionFamily, evaluate
from .logspace import (
    Itinerary,
    LogOverflow,
    LogTransform,
    NotInTract,
    forward_on_tract,
    tract_of,
)
from .rays import EscapeVerdict, HairTail, escape_test


@dataclass
class TransportedSample:
    t: float
    position: complex        # log plane, original-map side
    error: float


@dataclass
class PipelineResult:
    verdict: EscapeVerdict
    N: int
    itinerary: Itinerary             # original-side = rescaled-side indices
    lifted_orbit: list[complex]      # log lifts of the orbit from N on
    tail: HairTail                   # traced on the rescaled side
    transported: list[TransportedSample]
    containment_distance: float | None
    combined_error: float | None
    contained: bool | None           # None when the point is too shallow to transport
    escape_floor_by_depth: list[float]   # min over samples of Re of n-th forward lift


def _lift_orbit(F: LogTransform, orbit: list, N: int, max_len: int) -> list[complex]:
    """Log lifts of the plane orbit from index N on, extended by log-plane
    forward steps once the plane values overflow."""
    z = orbit[N]
    if isinstance(z, Escaped) or z == 0:
        raise DomainError("orbit point at N is not representable in the plane")
    lifts = [cmath.log(z)]
    while len(lifts) < max_len:
        idx = N + len(lifts)
        if idx < len(orbit) and not isinstance(orbit[idx], Escaped) and abs(orbit[idx]) > 0:
            prev = lifts[-1]
            w = cmath.log(orbit[idx])
            # keep the lift on the branch reached by the flow
            try:
                cont = forward_on_tract(F, prev)
            except (LogOverflow, DomainError):
                break
            k = round((cont.imag - w.imag) / (2.0 * math.pi))
            lifts.append(w + 2j * math.pi * k)
        else:
            try:
                lifts.append(forward_on_tract(F, lifts[-1]))
            except (LogOverflow, DomainError):
                break
    return lifts


def _read_itinerary(F: LogTransform, lifts: list[complex]) -> Itinerary:
    ids = []
    for w in lifts:
        tid = tract_of(F, w)
        if isinstance(tid, NotInTract):
            raise ItineraryUnreadable(
                f"orbit lift {w} is boundary-ambiguous; itinerary entry uncertified")
        ids.append(tid)
    if not ids:
        raise ItineraryUnreadable("no representable orbit lifts to read")
    return Itinerary(tuple(ids), (ids[-1],))


def _window_for(C: ConjugacyMap, w_target: complex) -> tuple[float, float]:
    """Seed-offset window on the rescaled side whose traced positions
    bracket the conjugacy preimage of the target."""
    wg, _ = conjugate_log_inverse(C, w_target)
    base = C.G.logL + 8.0 * math.pi
    # depth-1 samples sit at log(base + t) - Re(delta); aim t at wg
    lo = math.exp(max(wg.real + C.G.delta.real - 2.0, 0.0)) - base
    hi = math.exp(min(wg.real + C.G.delta.real + 2.0, 705.0)) - base
    return max(lo, 0.0), max(hi, 1.0)


def ray_tail_pipeline(f: FunctionFamily, z: complex, R: float, horizon: int, *,
                      tol: float = 1e-9, spacing: float = 0.35,
                      conjugacy: tuple[ConjugacyMap, FunctionFamily] | None = None,
                      itinerary_len: int = 24) -> PipelineResult:
    """Escaping seed -> certified ray tail through its N-th orbit point.

    Preconditions: the escape test must return a definite escape.  The
    containment check runs when the orbit point is deep enough for the
    conjugacy (its rescaled-side preimage orbit must clear the working
    half-plane); shallower points still yield the itinerary and tail, with
    contained = None.
    """
    verdict = escape_test(f, z, R, horizon)
    if not verdict.escaping:
        raise DomainError(f"seed does not definitely escape (verdict {verdict.kind})")
    N = verdict.index

    C, g = conjugacy if conjugacy is not None else make_conjugacy(f)

    orbit: list = [z]
    for _ in range(N + itinerary_len):
        v = evaluate(f, orbit[-1])
        orbit.append(v)
        if isinstance(v, Escaped):
            break

    lifts = _lift_orbit(C.F, orbit, N, itinerary_len)
    s = _read_itinerary(C.F, lifts)
    w_N = lifts[0]

    # transportable?
    try:
        t_lo, t_hi = _window_for(C, w_N)
        transportable = True
    except (OrbitLeftHalfPlane, LogOverflow, DomainError):
        transportable = False

    from .rays import trace_tail

    if transportable:
        tail = trace_tail(C.G, s, t_lo, t_hi, tol, spacing=spacing,
                          k_max=max(16, s.max_band() + 1))
    else:
        tail = trace_tail(C.G, s, 0.0, 1.0, tol, k_max=max(16, s.max_band() + 1))

    transported: list[TransportedSample] = []
    for p in tail.samples:
        try:
            x, budget = conjugate_log(C, p.position)
        except (OrbitLeftHalfPlane, LogOverflow, DomainError):
            continue
        transported.append(TransportedSample(
            p.t, x, budget.total(abs(x)) + p.error.total(abs(p.position))))

    distance = combined = None
    contained = None
    if transportable and len(transported) >= 2:
        distance = math.inf
        local_err = 0.0
        for a, b in zip(transported, transported[1:]):
            d = _point_segment(w_N, a.position, b.position)
            if d < distance:
                distance = d
                local_err = max(a.error, b.error) + 0.5 * abs(b.position - a.position)
        combined = tol + local_err
        contained = distance <= combined

    floors = _escape_floors(C.F, transported, depth=21)
    return PipelineResult(
        verdict=verdict, N=N, itinerary=s, lifted_orbit=lifts, tail=tail,
        transported=transported, containment_distance=distance,
        combined_error=combined, contained=contained,
        escape_floor_by_depth=floors,
    )


def _point_segment(p: complex, a: complex, b: complex) -> float:
    ab = b - a
    den = abs(ab) ** 2
    if den == 0.0:
        return abs(p - a)
    s = ((p - a).real * ab.real + (p - a).imag * ab.imag) / den
    s = min(1.0, max(0.0, s))
    return abs(p - (a + s * ab))


def _escape_floors(F: LogTransform, transported: list[TransportedSample],
                   depth: int) -> list[float]:
    """min over tail samples of the log-modulus of the n-th forward image,
    for n = 0..depth-1; values past float range count as +inf."""
    floors: list[float] = []
    cur = [s.position for s in transported]
    for _ in range(depth):
        if not cur:
            break
        floors.append(min(w.real for w in cur))
        nxt = []
        for w in cur:
            try:
                nxt.append(forward_on_tract(F, w))
            except (LogOverflow, DomainError):
                continue
        if not nxt:
            # every sample left double range: definitely beyond any radius
            floors.extend([math.inf] * (depth - len(floors)))
            break
        cur = nxt
    return floors
