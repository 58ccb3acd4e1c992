"""Logarithmic-coordinate lift of a family: tract indexing, forward
evaluation, exact inverse branches, the expansion estimate, and tract
itineraries.

Every supported family reduces to core(nu*z) with core either lam*e^u or
a*e^u + b*e^(-u) (see families.canonical_form).  In log coordinates the lift
satisfies exp(lift(w)) = f(exp(w)) and the whole tract set is the core's
tract set translated by -log(nu).  Tracts are indexed structurally:

* exponential core: one integer k, the 2*pi*i band;
* two-sided core: (sign, m, k) with sign +-1 for the right/left plane tract,
  m the 2*pi band of the intermediate exponential, k the outer band.  Each
  triple indexes one inverse branch of the lift onto the right half-plane
  {Re > log L}; round-trip tests pin the convention down.
"""

from __future__ import annotations

import cmath
import functools
import math
import sys
from dataclasses import dataclass

from .errors import BranchCutError, DomainError, LogtractError
from .families import FunctionFamily, canonical_form

TWO_PI = 2.0 * math.pi
EIGHT_PI = 8.0 * math.pi
MAX_LOG = 709.0
_EPS = sys.float_info.epsilon

# above this real part the two-sided core is handled by its one-term
# asymptotic form; exp(2*Re v) would overflow anyway
_PAIR_ASYM = 350.0


class LogOverflow(LogtractError):
    """Forward value exceeds double range (the plane point has modulus
    beyond exp(MAX_LOG))."""

    kind = "LogOverflow"


@dataclass(frozen=True)
class PairTract:
    sign: int  # +1 right, -1 left
    m: int
    k: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise DomainError("tract sign must be +-1")


TractId = int | PairTract


@dataclass(frozen=True)
class NotInTract:
    boundary: bool = False


def _band(y: float) -> int:
    """Index k with y in [2*pi*k - pi, 2*pi*k + pi)."""
    return math.floor((y + math.pi) / TWO_PI)


def _reduce(y: float) -> tuple[int, float]:
    k = _band(y)
    return k, y - TWO_PI * k


def translate_id(tid: TractId, dk: int) -> TractId:
    """The tract 2*pi*i*dk above tid."""
    if isinstance(tid, PairTract):
        return PairTract(tid.sign, tid.m, tid.k + dk)
    return tid + dk


def tract_id_to_json(tid: TractId):
    if isinstance(tid, PairTract):
        return [tid.sign, tid.m, tid.k]
    return tid


def tract_id_from_json(obj) -> TractId:
    if isinstance(obj, list):
        s, m, k = obj
        return PairTract(int(s), int(m), int(k))
    return int(obj)


@dataclass(frozen=True)
class LogTransform:
    """Lift of a family to logarithmic coordinates.

    delta is the domain shift (principal log of the canonical argument
    scale), so tracts sit at the core's tracts minus delta.  c is the branch
    constant of the exponential core; the two-sided core keeps its two
    coefficient logs instead.
    """

    family: FunctionFamily
    logL: float
    kind: str                    # "exp" | "pair"
    params: tuple[complex, ...]
    delta: complex               # principal log of nu
    c: complex                   # exp core: log of the scale; pair: 0


def log_transform(family: FunctionFamily, L: float | None = None) -> LogTransform:
    """Build the lift of `family` over the cutoff L (default: the family's)."""
    L = family.L if L is None else float(L)
    if L <= 0:
        raise DomainError("cutoff L must be positive")
    c = canonical_form(family)
    delta = cmath.log(c.nu) if c.nu != 1 else 0j
    if c.kind == "exp":
        mu = c.params[0]
        if L <= abs(mu):
            raise DomainError(
                f"cutoff L={L} must exceed |scale|={abs(mu)} for a clean tract structure")
        return LogTransform(family, math.log(L), "exp", c.params, delta, cmath.log(mu))
    a, b = c.params
    if L <= abs(a) + abs(b):
        raise DomainError(
            f"cutoff L={L} must exceed |a|+|b|={abs(a) + abs(b)} for two-sided tracts")
    return LogTransform(family, math.log(L), "pair", c.params, delta, 0j)


# ---------------------------------------------------------------------------
# tract membership

def tract_of(F: LogTransform, w: complex) -> TractId | NotInTract:
    """The tract containing w, or NotInTract (flagged when w sits within
    8 ulps of a tract boundary or its band index is below float resolution)."""
    u = w + F.delta
    if F.kind == "exp":
        return _tract_exp(F, u)
    return _tract_pair(F, u)


def _tract_exp(F: LogTransform, u: complex) -> int | NotInTract:
    mu = F.params[0]
    q = F.logL - math.log(abs(mu))       # tract condition: Re e^u > q, q > 0
    log_q = math.log(q)
    k, y = _reduce(u.imag)
    cy = math.cos(y)
    if cy <= 0.0:
        return NotInTract(boundary=False)
    margin = u.real + math.log(cy) - log_q
    tol = 8.0 * _EPS * max(1.0, abs(u.real), abs(log_q))
    if abs(margin) <= tol:
        return NotInTract(boundary=True)
    if margin < 0.0:
        return NotInTract(boundary=False)
    return k


def _tract_pair(F: LogTransform, u: complex) -> PairTract | NotInTract:
    a, b = F.params
    if u.real > MAX_LOG:
        if u.imag == 0.0:
            # exactly on the positive real axis: the plane point exceeds
            # double range but its direction (hence the tract) is certain
            return PairTract(1, 0, _band(u.imag - F.delta.imag))
        # generic deep point: the band index is below float resolution
        return NotInTract(boundary=True)
    Z = cmath.exp(u)
    # sign of the plane-side tract
    if Z.real > 0:
        sign = 1
    elif Z.real < 0:
        sign = -1
    else:
        return NotInTract(boundary=True)
    # modulus condition |a e^Z + b e^-Z| > L, in log form when Z is deep
    if abs(Z.real) <= _PAIR_ASYM:
        fz = a * cmath.exp(Z) + b * cmath.exp(-Z)
        r = abs(fz)
        if r == 0.0:
            return NotInTract(boundary=False)
        margin = math.log(r) - F.logL
    else:
        coeff = a if Z.real > 0 else b
        margin = abs(Z.real) + math.log(abs(coeff)) - F.logL
    tol = 8.0 * _EPS * max(1.0, abs(Z.real), F.logL)
    if abs(margin) <= tol:
        return NotInTract(boundary=True)
    if margin < 0.0:
        return NotInTract(boundary=False)
    # intermediate band: m with Im Z in [2*pi*m - pi, 2*pi*m + pi).  The
    # float evaluation of Im Z = e^x sin(y) is exact when y = 0 and has
    # relative error ~eps otherwise, so the band is uncertain only when
    # that error reaches the band edge.
    m, ym = _reduce(Z.imag)
    band_uncertainty = 8.0 * _EPS * abs(Z.imag)
    if band_uncertainty > math.pi or math.pi - abs(ym) <= band_uncertainty:
        return NotInTract(boundary=True)
    if sign > 0:
        k = _band(u.imag)
    else:
        k = math.floor(u.imag / TWO_PI)
    return PairTract(sign, m, k)


def y_anchor(F: LogTransform, tid: TractId) -> float:
    """Imaginary part centring the tract's band (seed placement helper)."""
    if isinstance(tid, PairTract):
        base = TWO_PI * tid.k + (0.0 if tid.sign > 0 else math.pi)
    else:
        base = TWO_PI * tid
    return base - F.delta.imag


def seed_anchor(F: LogTransform, tid: TractId, t: float) -> complex:
    """Seed point at depth parameter t for pullbacks toward tract tid."""
    return complex(F.logL + EIGHT_PI + t, y_anchor(F, tid))


# ---------------------------------------------------------------------------
# forward map

def forward_map(F: LogTransform, w: complex) -> tuple[complex, TractId]:
    """Value of the lift at w together with w's tract.

    Raises DomainError off the tracts and LogOverflow when the value leaves
    double range.
    """
    tid = tract_of(F, w)
    if isinstance(tid, NotInTract):
        raise DomainError(f"{w} is not inside a tract (boundary={tid.boundary})")
    return forward_on_tract(F, w), tid


def forward_on_tract(F: LogTransform, w: complex) -> complex:
    """The lift's value at w, assuming w lies in a tract (not re-checked)."""
    u = w + F.delta
    if u.real > MAX_LOG:
        raise LogOverflow(f"forward value at Re(u)={u.real} exceeds double range")
    if F.kind == "exp":
        return cmath.exp(u) + F.c
    a, b = F.params
    Z = cmath.exp(u)
    if Z.real > 0:
        if 2.0 * Z.real > MAX_LOG:
            return Z + cmath.log(a)
        return Z + cmath.log(a) + cmath.log(1 + (b / a) * cmath.exp(-2 * Z))
    if -2.0 * Z.real > MAX_LOG:
        return -Z + cmath.log(b)
    return -Z + cmath.log(b) + cmath.log(1 + (a / b) * cmath.exp(2 * Z))


def derivative_on_tract(F: LogTransform, w: complex) -> complex:
    """d/dw of the lift at a tract point, by closed form."""
    u = w + F.delta
    if u.real > MAX_LOG:
        raise LogOverflow("derivative exceeds double range")
    if F.kind == "exp":
        return cmath.exp(u)
    a, b = F.params
    Z = cmath.exp(u)
    if Z.real > 0:
        if 2.0 * Z.real > MAX_LOG:
            return Z
        r = (b / a) * cmath.exp(-2 * Z)
        return Z * (1 - r) / (1 + r)
    if -2.0 * Z.real > MAX_LOG:
        return -Z
    s = (a / b) * cmath.exp(2 * Z)
    return Z * (s - 1) / (s + 1)


# ---------------------------------------------------------------------------
# inverse branches

def inverse_branch(F: LogTransform, tid: TractId, v: complex) -> complex:
    """The point of tract tid that the lift sends to v.

    Defined for Re v > log L.  Closed forms: exponential core
    log(v - c) + 2*pi*i*k; two-sided core via the quadratic in e^Z.
    """
    if not v.real > F.logL:
        raise DomainError(f"inverse branch needs Re v > log L = {F.logL}, got {v.real}")
    if F.kind == "exp":
        if isinstance(tid, PairTract):
            raise DomainError("integer tract id expected for the exponential core")
        arg = v - F.c
        if arg == 0:
            raise BranchCutError("image coincides with the branch constant")
        return cmath.log(arg) + TWO_PI * 1j * tid - F.delta
    if not isinstance(tid, PairTract):
        raise DomainError("(sign, m, k) tract id expected for the two-sided core")
    a, b = F.params
    log_u = _pair_root_log(a, b, v, tid.sign)
    Z = log_u + TWO_PI * 1j * tid.m
    return _outer_log(Z, tid.sign) + TWO_PI * 1j * tid.k - F.delta


def _pair_root_log(a: complex, b: complex, v: complex, sign: int) -> complex:
    """Principal log of the selected root of a*U^2 - e^v*U + b = 0.

    sign +1 selects the large root (right tract), -1 the small one; the
    roots' product is b/a, so the small root comes from the large one
    without cancellation.
    """
    if v.real > _PAIR_ASYM:
        # far field: large root ~ e^v / a, small root ~ b e^-v
        if sign > 0:
            w = v - cmath.log(a)
        else:
            w = cmath.log(b) - v
        k, y = _reduce(w.imag)
        return complex(w.real, y)
    E = cmath.exp(v)
    disc = cmath.sqrt(E * E - 4 * a * b)
    if (E.real * disc.real + E.imag * disc.imag) >= 0.0:
        big = (E + disc) / (2 * a)
    else:
        big = (E - disc) / (2 * a)
    if big == 0:
        raise BranchCutError("degenerate root")
    if sign > 0:
        return cmath.log(big)
    return cmath.log((b / a) / big)


def _outer_log(Z: complex, sign: int) -> complex:
    """Branch of log matched to the tract side: principal on the right
    (cut on the negative reals, clear of right-tract arguments), argument in
    [0, 2*pi) on the left (cut on the positive reals)."""
    if Z == 0:
        raise BranchCutError("zero argument in outer log")
    if sign > 0:
        return cmath.log(Z)
    w = cmath.log(Z)
    if w.imag < 0:
        w += TWO_PI * 1j
    return w


def virtual_inverse(F: LogTransform, tid: TractId, u_image: complex) -> complex:
    """Inverse branch applied to a point known only through the log of its
    core argument: the image is core(exp(u_image)), possibly far beyond
    double range.  Only valid when tid is the band-matched tract of the
    conceptual preimage; used for orbit points too deep to represent."""
    if F.kind == "exp":
        _, y = _reduce(u_image.imag)
        return complex(u_image.real, y) + TWO_PI * 1j * tid - F.delta
    if not isinstance(tid, PairTract):
        raise DomainError("(sign, m, k) tract id expected")
    if tid.sign > 0:
        _, y = _reduce(u_image.imag)
        red = complex(u_image.real, y)
    else:
        y = u_image.imag % TWO_PI
        red = complex(u_image.real, y)
    return red + TWO_PI * 1j * tid.k - F.delta


# ---------------------------------------------------------------------------
# expansion estimate

def expansion_lower_bound(F: LogTransform, w: complex) -> tuple[float, float]:
    """(bound, actual) with bound = (Re F(w) - log L) / (4*pi) and actual
    = |F'(w)|; callers rely on actual >= bound, which is asserted here."""
    v, _ = forward_map(F, w)
    bound = (v.real - F.logL) / (4.0 * math.pi)
    actual = abs(derivative_on_tract(F, w))
    if actual < bound * (1.0 - 8.0 * _EPS):
        raise DomainError(
            f"expansion estimate violated at {w}: |F'|={actual} < bound={bound}")
    return bound, actual


# ---------------------------------------------------------------------------
# tract boundary sampling and the contraction-regime margin

def _pair_boundary_x(F: LogTransform, y: float, sign: int) -> float:
    """Solve |core(x + i y)| = L for x on the requested side, by bisection."""
    a, b = F.params
    L2 = F.logL
    aa, bb = abs(a), abs(b)
    cross = 2.0 * (a * b.conjugate() * cmath.exp(2j * y)).real

    def g(x: float) -> float:
        return 0.5 * math.log(aa * aa * math.exp(2 * x) + bb * bb * math.exp(-2 * x) + cross) - L2

    xstar = 0.5 * math.log(bb / aa)
    if sign > 0:
        lo, hi = xstar, xstar + 1.0
        while g(hi) < 0:
            hi += 1.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if g(mid) < 0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)
    lo, hi = xstar - 1.0, xstar
    while g(lo) < 0:
        lo -= 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def boundary_samples(F: LogTransform, n: int) -> list[complex]:
    """Points on the tract boundary (principal band representatives)."""
    pts: list[complex] = []
    if F.kind == "exp":
        mu = F.params[0]
        q = F.logL - math.log(abs(mu))
        half = math.pi / 2.0
        for j in range(n):
            y = -half + (j + 0.5) * (2.0 * half) / n
            x = math.log(q) - math.log(math.cos(y))
            pts.append(complex(x, y) - F.delta)
        return pts
    for j in range(n):
        y = (j + 0.5) * TWO_PI / n
        for sign in (1, -1):
            x = _pair_boundary_x(F, y, sign)
            Z = complex(x, y)
            pts.append(_outer_log(Z, sign) - F.delta)
    return pts


@functools.lru_cache(maxsize=128)
def _pair_distortion(F: LogTransform) -> float:
    """sup of |rho * e^(-2Z)| (right) and |sigma * e^(2Z)| (left) over the
    tracts: controls how far the two-sided core strays from its one-term
    asymptotics.  Strictly below 1 whenever L > |a| + |b|.

    The boundary extremum is sampled (64 heights per period); the factor
    e^0.2 covers a 0.1 abscissa slack between samples, which dominates the
    boundary curve's drift at this resolution.
    """
    a, b = F.params
    r = 0.0
    for y in [j * TWO_PI / 64 for j in range(64)]:
        xr = _pair_boundary_x(F, y, 1)
        xl = _pair_boundary_x(F, y, -1)
        r = max(r, abs(b / a) * math.exp(-2 * xr), abs(a / b) * math.exp(2 * xl))
    return min(r * math.exp(0.2), 1.0)


def inverse_contraction_bound(F: LogTransform, re_min: float) -> float:
    """Certified sup of |(F_T^-1)'| over {Re v >= re_min}, by the closed-form
    derivative: 1/|v - c| for the exponential core, |Z|-based for the
    two-sided one.  Returns inf when the closed form gives nothing there."""
    if F.kind == "exp":
        d = re_min - abs(F.c)
        return 1.0 / d if d > 0 else math.inf
    a, b = F.params
    r0 = _pair_distortion(F)
    if r0 >= 0.99:
        return math.inf
    pad = max(abs(cmath.log(a)), abs(cmath.log(b))) - math.log1p(-r0)
    d = re_min - pad
    if d <= 0:
        return math.inf
    return (1.0 + r0) / ((1.0 - r0) * d)


@functools.lru_cache(maxsize=128)
def normalized_margin(F: LogTransform, n_samples: int = 256) -> float:
    """inf over sampled tract-boundary points of Re w - (log L + 8*pi).

    Nonnegative margin certifies that every tract sits deep enough for the
    expansion estimate to force |F'| >= 2, hence half-speed pullbacks.
    """
    if n_samples < 1:
        raise DomainError("need at least one boundary sample")
    lo = min(p.real for p in boundary_samples(F, n_samples))
    return lo - (F.logL + EIGHT_PI)


# ---------------------------------------------------------------------------
# itineraries (symbol sequences over tract ids)

@dataclass(frozen=True)
class Itinerary:
    """Eventually periodic tract itinerary: finite prefix, repeating period.

    Normalised so the prefix never ends with a full copy of the period.
    """

    prefix: tuple[TractId, ...]
    period: tuple[TractId, ...]

    def __post_init__(self):
        if not self.period:
            raise DomainError("period must be nonempty")
        prefix, period = tuple(self.prefix), tuple(self.period)
        n = len(period)
        while len(prefix) >= n and prefix[-n:] == period:
            prefix = prefix[:-n]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def entry(self, n: int) -> TractId:
        if n < len(self.prefix):
            return self.prefix[n]
        return self.period[(n - len(self.prefix)) % len(self.period)]

    def shifted(self) -> "Itinerary":
        if self.prefix:
            return Itinerary(self.prefix[1:], self.period)
        return Itinerary((), self.period[1:] + self.period[:1])

    def entries(self, n: int) -> list[TractId]:
        return [self.entry(i) for i in range(n)]

    def max_band(self) -> int:
        ids = list(self.prefix) + list(self.period)
        return max(abs(t.k if isinstance(t, PairTract) else t) for t in ids)

    def to_json(self) -> dict:
        return {
            "prefix": [tract_id_to_json(t) for t in self.prefix],
            "period": [tract_id_to_json(t) for t in self.period],
        }

    @staticmethod
    def from_json(d: dict) -> "Itinerary":
        return Itinerary(
            tuple(tract_id_from_json(t) for t in d.get("prefix", [])),
            tuple(tract_id_from_json(t) for t in d["period"]),
        )

    @staticmethod
    def constant(tid: TractId) -> "Itinerary":
        return Itinerary((), (tid,))


def _is_band_translate(t1: TractId, t2: TractId) -> bool:
    if isinstance(t1, PairTract) != isinstance(t2, PairTract):
        return False
    if isinstance(t1, PairTract):
        return t1.sign == t2.sign and t1.m == t2.m
    return True


def itinerary_equivalent(s1: Itinerary, s2: Itinerary, depth: int = 64) -> bool:
    """Whether the itineraries agree up to a 2*pi*i translate of the first
    entry (the identification that collapses log-plane itineraries to
    plane ones)."""
    if not _is_band_translate(s1.entry(0), s2.entry(0)):
        return False
    horizon = max(depth, len(s1.prefix) + len(s1.period) + len(s2.prefix) + len(s2.period))
    return all(s1.entry(i) == s2.entry(i) for i in range(1, horizon))


def vertical_order(F: LogTransform, s1: Itinerary, s2: Itinerary,
                   seed_offset: float = 2.0, max_depth: int = 300) -> int:
    """-1, 0, +1 ordering of two itineraries by the height of their pullback
    limits.

    Equal itineraries short-circuit to 0; otherwise depth is escalated until
    the imaginary separation exceeds both certified tail bounds.
    """
    if s1 == s2:
        return 0
    seed = complex(F.logL + EIGHT_PI + seed_offset, 0.0)
    lad1 = _OrderLadder(F, s1, seed)
    lad2 = _OrderLadder(F, s2, seed)
    for _ in range(max_depth):
        lad1.step()
        lad2.step()
        sep = lad1.value.imag - lad2.value.imag
        if abs(sep) > lad1.bound + lad2.bound + 64.0 * _EPS * max(1.0, abs(lad1.value)):
            return 1 if sep > 0 else -1
    raise DomainError("vertical order not resolved within depth budget")


class _OrderLadder:
    """Depth-escalating pullback along one itinerary with a measured
    geometric tail bound."""

    def __init__(self, F: LogTransform, s: Itinerary, seed: complex):
        self.F = F
        self.s = s
        self.seed = seed
        self.depth = 0
        self.value = seed
        self.prev_gap = math.inf
        self.bound = math.inf

    def step(self) -> None:
        self.depth += 1
        w = self.seed
        for i in range(self.depth - 1, -1, -1):
            w = inverse_branch(self.F, self.s.entry(i), w)
        gap = abs(w - self.value)
        if self.depth >= 2 and gap > 0 and self.prev_gap > 0 and math.isfinite(self.prev_gap):
            rho = min(gap / self.prev_gap, 0.95)
            self.bound = gap * rho / (1.0 - rho)
        elif gap == 0.0:
            self.bound = 0.0
        self.prev_gap = gap
        self.value = w
