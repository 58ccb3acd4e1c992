"""Synthetic straight brush with affine hair dynamics, in exact arithmetic.

Hairs are horizontal half-lines [t0, inf) x {y} at heights y = p + q*sqrt(2)
with rational p, q and q != 0 — irrational by construction, so a hair can
never be tangent to the boundary of the rational square (-Q, Q)^2.  The
model map sends each hair affinely onto its sigma-image with a uniform
expansion factor.  Everything here is computed in Fractions, which makes
this module the ground-truth oracle for the iterative projection engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

Rat = Fraction


def _sign_p_q_sqrt2(p: Rat, q: Rat) -> int:
    """Exact sign of p + q*sqrt(2); never 0 unless p = q = 0."""
    if q == 0:
        return (p > 0) - (p < 0)
    if q > 0:
        if p >= 0:
            return 1
        return 1 if 2 * q * q > p * p else -1
    if p <= 0:
        return -1
    return 1 if p * p > 2 * q * q else -1


@dataclass(frozen=True, order=False)
class QuadHeight:
    """Exact number p + q*sqrt(2) with q != 0 (hence irrational)."""

    p: Rat
    q: Rat

    def __post_init__(self):
        object.__setattr__(self, "p", Fraction(self.p))
        object.__setattr__(self, "q", Fraction(self.q))
        if self.q == 0:
            raise DomainError("height must be irrational: q = 0 not allowed")

    def __float__(self) -> float:
        return float(self.p) + float(self.q) * math.sqrt(2.0)

    def cmp_rational(self, r: Rat) -> int:
        return _sign_p_q_sqrt2(self.p - Fraction(r), self.q)

    def cmp(self, other: "QuadHeight") -> int:
        return _sign_p_q_sqrt2(self.p - other.p, self.q - other.q)

    def abs_below(self, bound: Rat) -> bool:
        """Exact |p + q*sqrt(2)| < bound."""
        b = Fraction(bound)
        return self.cmp_rational(b) < 0 and _sign_p_q_sqrt2(self.p + b, self.q) > 0


@dataclass(frozen=True)
class Hair:
    hid: str
    height: QuadHeight
    t0: Rat  # endpoint parameter, >= 0

    def __post_init__(self):
        object.__setattr__(self, "t0", Fraction(self.t0))
        if self.t0 < 0:
            raise DomainError(f"endpoint of {self.hid} must be nonnegative")


@dataclass(frozen=True)
class BrushPoint:
    hid: str
    t: Rat

    def __post_init__(self):
        object.__setattr__(self, "t", Fraction(self.t))


@dataclass
class AffineBrush:
    hairs: list[Hair]
    sigma: dict[str, str]
    expansion: Rat                # uniform factor > 1
    Q: Rat                        # half-side of the avoided square

    def __post_init__(self):
        self.expansion = Fraction(self.expansion)
        self.Q = Fraction(self.Q)
        if self.expansion <= 1:
            raise DomainError("expansion factor must exceed 1")
        if self.Q <= 0:
            raise DomainError("square half-side must be positive")
        self._by_id = {h.hid: h for h in self.hairs}
        if len(self._by_id) != len(self.hairs):
            raise DomainError("hair ids must be unique")
        for src, dst in self.sigma.items():
            if src not in self._by_id or dst not in self._by_id:
                raise DomainError(f"sigma maps unknown hair {src!r} -> {dst!r}")
        missing = [h.hid for h in self.hairs if h.hid not in self.sigma]
        if missing:
            raise DomainError(f"sigma is not total: missing {missing}")

    def hair(self, hid: str) -> Hair:
        return self._by_id[hid]

    def image(self, hid: str) -> str:
        return self.sigma[hid]


def brush_map(B: AffineBrush, p: BrushPoint) -> BrushPoint:
    """One step of the model dynamics: the hair maps affinely onto its
    sigma-image, endpoint to endpoint, stretched by the expansion factor."""
    h = B.hair(p.hid)
    if p.t < h.t0:
        raise DomainError(f"point parameter {p.t} below the endpoint {h.t0}")
    dst = B.image(p.hid)
    t = B.expansion * (Fraction(p.t) - h.t0) + B.hair(dst).t0
    return BrushPoint(dst, t)


def _orbit_ids(B: AffineBrush, hid: str, n: int) -> list[str]:
    out = [hid]
    for _ in range(n):
        out.append(B.image(out[-1]))
    return out


def avoiding_thresholds(B: AffineBrush, hid: str, n: int) -> list[Rat]:
    """Exact minimal parameters for depths 0..n in one sweep.

    The j-th iterate is affine in t; a hair whose height clears the square
    band contributes no constraint, otherwise the iterate must reach the
    right edge, giving the pulled-back threshold (Q - intercept_j) / slope_j.
    The depth-n value is the running maximum, so the sequence is monotone
    by construction.
    """
    if n < 0:
        raise DomainError("depth must be nonnegative")
    h0 = B.hair(hid)
    best = h0.t0
    out = []
    slope, icept = Fraction(1), Fraction(0)
    cur = hid
    for j in range(n + 1):
        h = B.hair(cur)
        if h.height.abs_below(B.Q):
            tau = (B.Q - icept) / slope
            if tau > best:
                best = tau
        out.append(best)
        nxt = B.image(cur)
        icept = B.expansion * (icept - h.t0) + B.hair(nxt).t0
        slope = B.expansion * slope
        cur = nxt
    return out


def avoiding_threshold(B: AffineBrush, hid: str, n: int) -> Rat:
    """Exact minimal parameter on the hair whose first n forward steps all
    avoid the open square."""
    return avoiding_thresholds(B, hid, n)[-1]


def limit_threshold(B: AffineBrush, hid: str) -> Rat:
    """Exact limit of the depth-n thresholds.

    The sigma-orbit of a finite brush is eventually periodic; past the cycle
    entry the thresholds approach a single limit geometrically (factor
    expansion^-period per turn, sign preserved), so the supremum over all
    depths is attained among the pre-cycle thresholds and that limit.
    """
    seen: dict[str, int] = {}
    ids = []
    cur = hid
    while cur not in seen:
        seen[cur] = len(ids)
        ids.append(cur)
        cur = B.image(cur)
    entry = seen[cur]
    period = len(ids) - entry

    h0 = B.hair(hid)
    best = h0.t0
    slope, icept = Fraction(1), Fraction(0)
    cur = hid
    constrained_cycle = False
    d_entry = None
    for j in range(entry + period):
        h = B.hair(cur)
        if h.height.abs_below(B.Q):
            tau = (B.Q - icept) / slope
            if tau > best:
                best = tau
            if j >= entry:
                constrained_cycle = True
        if j == entry:
            d_entry = (icept - h.t0) / slope
        nxt = B.image(cur)
        icept = B.expansion * (icept - h.t0) + B.hair(nxt).t0
        slope = B.expansion * slope
        cur = nxt
    if constrained_cycle:
        # thresholds tend to -d_infinity = -(icept_e - t0_e)/slope_e
        limit = -d_entry
        if limit > best:
            best = limit
    return best


def project_exact(B: AffineBrush, p: BrushPoint) -> BrushPoint:
    """Exact projection: the least point at or after p on its hair whose
    whole forward orbit avoids the open square."""
    z = limit_threshold(B, p.hid)
    t = Fraction(p.t)
    return BrushPoint(p.hid, t if t >= z else z)


# ---------------------------------------------------------------------------
# axioms and geometry

@dataclass
class AxiomReport:
    passed: bool
    violations: list[str]
    neighbor_stats: list[dict]
    note: str


def check_axioms(B: AffineBrush) -> AxiomReport:
    """Structural checks of the brush axioms on a finite family.

    Heights must be pairwise distinct (exact, via the p + q*sqrt(2) form),
    endpoints nonnegative, the hair map endpoint-to-endpoint (structural
    for the affine model).  Density along the height axis is not decidable
    for a finite family; nearest-neighbour gaps are reported as evidence.
    """
    import functools

    violations: list[str] = []
    for i, a in enumerate(B.hairs):
        for b in B.hairs[i + 1:]:
            if a.height.cmp(b.height) == 0:
                violations.append(f"duplicate height: {a.hid} and {b.hid}")
    order = sorted(B.hairs, key=functools.cmp_to_key(lambda u, v: u.height.cmp(v.height)))
    stats = []
    for i, h in enumerate(order):
        below = order[i - 1] if i > 0 else None
        above = order[i + 1] if i + 1 < len(order) else None
        stats.append({
            "hid": h.hid,
            "height": float(h.height),
            "gap_below": float(h.height) - float(below.height) if below else None,
            "gap_above": float(above.height) - float(h.height) if above else None,
            "endpoint_gap_below": abs(float(h.t0 - below.t0)) if below else None,
            "endpoint_gap_above": abs(float(above.t0 - h.t0)) if above else None,
        })
    note = ("single hair: density bullet not applicable (finite)"
            if len(B.hairs) == 1 else
            "finite family: height accumulation reported as neighbour gaps only")
    return AxiomReport(passed=not violations, violations=violations,
                       neighbor_stats=stats, note=note)


def crossing_count(B: AffineBrush, Q: Rat | None = None) -> tuple[int, dict[str, int]]:
    """Exact number of intersections of each hair with the boundary of
    (-Q, Q)^2, and the maximum over hairs.

    A horizontal half-line at irrational height either misses the band
    (|y| > Q), starts at or beyond the right edge (t0 > Q: zero crossings),
    or crosses the edge x = Q exactly once; tangency is impossible because
    Q is rational.
    """
    Q = B.Q if Q is None else Fraction(Q)
    counts: dict[str, int] = {}
    for h in B.hairs:
        if not h.height.abs_below(Q):
            counts[h.hid] = 0
        elif h.t0 > Q:
            counts[h.hid] = 0
        else:
            counts[h.hid] = 1
    return max(counts.values(), default=0), counts


# ---------------------------------------------------------------------------
# float rendition for the iterative projection engine

def float_curve(B: AffineBrush, hid: str):
    """(plane, step, inside) callables over (hid, float t) points, for the
    generic projection engine.  The square test keeps the exact per-hair
    band decision and compares the float abscissa to Q without rounding
    (floats are dyadic rationals)."""
    band = {h.hid: h.height.abs_below(B.Q) for h in B.hairs}
    t0f = {h.hid: float(h.t0) for h in B.hairs}
    lam = float(B.expansion)

    def plane(t: float):
        return (hid, t)

    def step(pt):
        src, t = pt
        dst = B.image(src)
        return (dst, lam * (t - t0f[src]) + t0f[dst])

    def inside(pt):
        src, t = pt
        return band[src] and -B.Q < Fraction(t) < B.Q

    return plane, step, inside


# ---------------------------------------------------------------------------
# serialization and generation

def _rat_to_json(r: Rat) -> list[int]:
    return [r.numerator, r.denominator]


def _rat(o) -> Rat:
    return Fraction(o[0], o[1])


def brush_to_json(B: AffineBrush) -> dict:
    return {
        "hairs": [{"id": h.hid, "p": _rat_to_json(h.height.p),
                   "q": _rat_to_json(h.height.q), "t": _rat_to_json(h.t0)}
                  for h in B.hairs],
        "sigma": dict(B.sigma),
        "lambda": _rat_to_json(B.expansion),
        "Q": _rat_to_json(B.Q),
    }


def brush_from_json(d: dict) -> AffineBrush:
    hairs = [Hair(h["id"], QuadHeight(_rat(h["p"]), _rat(h["q"])), _rat(h["t"]))
             for h in d["hairs"]]
    return AffineBrush(hairs, dict(d["sigma"]), _rat(d["lambda"]), _rat(d["Q"]))


def random_brush(rng, max_hairs: int = 20) -> AffineBrush:
    """Random instance satisfying the axioms by construction."""
    n = rng.randint(1, max_hairs)
    hairs: list[Hair] = []
    used: set[tuple[Rat, Rat]] = set()
    for i in range(n):
        while True:
            p = Fraction(rng.randint(-60, 60), rng.randint(1, 12))
            q = Fraction(rng.randint(-12, 12), rng.randint(1, 12))
            if q != 0 and (p, q) not in used:
                used.add((p, q))
                break
        t0 = Fraction(rng.randint(0, 150), rng.randint(1, 8))
        hairs.append(Hair(f"h{i}", QuadHeight(p, q), t0))
    sigma = {h.hid: f"h{rng.randrange(n)}" for h in hairs}
    lam = Fraction(rng.choice([3, 2, 5, 4]), rng.choice([2, 1]))
    if lam <= 1:
        lam = Fraction(2)
    Q = Fraction(rng.randint(1, 90), rng.randint(1, 6))
    return AffineBrush(hairs, sigma, lam, Q)


def worked_instance() -> AffineBrush:
    """Two hairs, expansion 2, endpoints 10 and 0, square half-side 3."""
    hairs = [
        Hair("H1", QuadHeight(Fraction(1), Fraction(1, 2)), Fraction(10)),
        Hair("H2", QuadHeight(Fraction(-1), Fraction(1, 3)), Fraction(0)),
    ]
    return AffineBrush(hairs, {"H1": "H2", "H2": "H2"}, Fraction(2), Fraction(3))
