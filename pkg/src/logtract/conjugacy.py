"""Conjugacy near infinity between a lift F and the lift G of its
disjoint-type rescaling, computed as a pullback fixed point.

The map sends w to the limit of chains F^-1 o ... o F^-1 applied to the
forward G-orbit of w, matching tracts through the translation structure
(the rescaled tracts are the originals shifted by -log lam, index for
index).  Each extra orbit step multiplies the error by the inverse-branch
contraction at that depth, which decays so fast that float-range loss of
deep orbit points costs nothing: once an orbit value leaves double range
its pullback collapses to an exact translation (see virtual_inverse).
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass

from .errors import DomainError, OrbitLeftHalfPlane
from .families import FunctionFamily
from .logspace import (
    Itinerary,
    LogOverflow,
    LogTransform,
    NotInTract,
    forward_on_tract,
    inverse_branch,
    inverse_contraction_bound,
    tract_of,
    virtual_inverse,
)
from .regions import ErrorBudget

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class ConjugacyMap:
    F: LogTransform      # lift of the original map
    G: LogTransform      # lift of the disjoint-type domain rescaling
    lam: complex
    Q: float             # working half-plane for orbit membership
    depth: int = 12

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("rescale factor must be nonzero")
        if self.lam != 1 and not self.Q > 2.0 * abs(cmath.log(self.lam)) + 1.0:
            raise DomainError(
                f"Q={self.Q} must exceed 2|log lam| + 1 = {2*abs(cmath.log(self.lam))+1}")
        if self.depth < 1:
            raise DomainError("depth must be at least 1")

    @property
    def tract_shift(self) -> complex:
        """Translation carrying the rescaled tracts onto the originals."""
        return -cmath.log(self.lam) if self.lam != 1 else 0j

    @property
    def displacement_bound(self) -> float:
        return 2.0 * abs(cmath.log(self.lam)) if self.lam != 1 else 0.0


def make_conjugacy(f: FunctionFamily, Q: float | None = None,
                   depth: int = 12) -> tuple[ConjugacyMap, FunctionFamily]:
    """Build the conjugacy data for f and its domain rescaling."""
    from .families import disjoint_type_rescale
    from .logspace import log_transform

    lam, g = disjoint_type_rescale(f, "domain")
    F = log_transform(f)
    G = log_transform(g)
    if Q is None:
        Q = 2.0 * abs(math.log(lam)) + 2.0
    return ConjugacyMap(F, G, lam, Q, depth), g


def _orbit(source: LogTransform, w: complex, Q: float, depth: int):
    """Forward orbit w, s(w), ..., with tract ids, stopped at `depth`, at
    float-range loss (flagged), or at a drop below the working half-plane
    (raises)."""
    pts = [w]
    tracts = []
    overflowed = False
    for j in range(depth):
        tid = tract_of(source, pts[-1])
        if isinstance(tid, NotInTract):
            raise OrbitLeftHalfPlane(j, f"orbit point {pts[-1]} is not inside a tract")
        tracts.append(tid)
        try:
            v = forward_on_tract(source, pts[-1])
        except LogOverflow:
            overflowed = True
            break
        if v.real < Q:
            raise OrbitLeftHalfPlane(j + 1, f"orbit dropped to Re={v.real} < Q={Q}")
        pts.append(v)
    return pts, tracts, overflowed


def _pullback_conjugate(source: LogTransform, target: LogTransform,
                        disp_bound: float, w: complex, Q: float,
                        depth: int) -> tuple[complex, ErrorBudget, list[float]]:
    """Fixed-point iterate of the conjugacy from `source` dynamics to
    `target` inverse branches; returns the deepest estimate, its budget,
    and the measured per-step displacements."""
    pts, tracts, overflowed = _orbit(source, w, Q, depth)
    m_max = len(pts) - 1 + (1 if overflowed else 0)
    if m_max < 1:
        raise OrbitLeftHalfPlane(0, "no forward step available for the pullback")

    def estimate(m: int) -> complex:
        if overflowed and m == len(pts):
            u_image = pts[-1] + source.delta
            x = virtual_inverse(target, tracts[len(pts) - 1], u_image)
            start = len(pts) - 2
        else:
            x = pts[m]
            start = m - 1
        for j in range(start, -1, -1):
            x = inverse_branch(target, tracts[j], x)
        return x

    ests = [w] + [estimate(m) for m in range(1, m_max + 1)]
    disps = [abs(b - a) for a, b in zip(ests, ests[1:])]
    ratios = [d2 / d1 for d1, d2 in zip(disps, disps[1:]) if d1 > 0 and d2 > 0]
    rho = min(max(ratios, default=0.5), 0.75)
    measured = disps[-1] / (1.0 - rho) if disps else 0.0
    analytic = disp_bound
    for j in range(len(tracts)):
        re_next = pts[j + 1].real if j + 1 < len(pts) else math.inf
        analytic *= min(0.5, inverse_contraction_bound(target, re_next - disp_bound))
    if overflowed:
        analytic = 0.0
    floor = 8.0 * _EPS * (1.0 + abs(ests[-1])) * max(1, m_max)
    budget = max(min(measured, analytic) if disps else analytic, floor)
    return ests[-1], ErrorBudget(budget, 6 * m_max), disps


def conjugate_log(C: ConjugacyMap, w: complex) -> tuple[complex, ErrorBudget]:
    """Image of w under the conjugacy in logarithmic coordinates.

    Requires the forward orbit of w under the rescaled lift to stay in the
    working half-plane for the configured depth (or until float range is
    exhausted, which only tightens the estimate).
    """
    if C.lam == 1:
        return w, ErrorBudget(0.0, 0)
    x, budget, _ = _pullback_conjugate(C.G, C.F, C.displacement_bound, w, C.Q, C.depth)
    return x, budget


def conjugate_log_inverse(C: ConjugacyMap, w: complex) -> tuple[complex, ErrorBudget]:
    """Mirror iteration: carries a point of the original lift's escaping
    region back to the rescaled side (same engine, roles swapped)."""
    if C.lam == 1:
        return w, ErrorBudget(0.0, 0)
    q = max(C.F.logL + 1.0, C.Q - C.displacement_bound)
    x, budget, _ = _pullback_conjugate(C.F, C.G, C.displacement_bound, w, q, C.depth)
    return x, budget


def conjugate_plane(C: ConjugacyMap, z: complex) -> complex:
    """Plane version: lift to the principal band, conjugate, exponentiate.

    Only defined while the image stays within double range; deep points
    should be handled in log coordinates.
    """
    if z == 0:
        raise DomainError("the plane conjugacy is defined away from the origin")
    w = cmath.log(z)
    x, _ = conjugate_log(C, w)
    if x.real > 709.0:
        raise LogOverflow("plane image exceeds double range; use conjugate_log")
    return cmath.exp(x)


def correspond_itinerary(C: ConjugacyMap, s_g: Itinerary) -> Itinerary:
    """Itinerary correspondence induced by the tract translation.

    The rescaled tracts are the originals shifted by -log lam; with the
    principal branch the index structure is carried over entry by entry
    (identity on indices for a positive real factor).
    """
    if abs(C.tract_shift.imag) >= math.pi:
        raise DomainError("tract shift outside the principal band")
    return s_g


# ---------------------------------------------------------------------------
# verification report

@dataclass
class ConjugacyReport:
    samples: int
    converged: int
    max_residual: float              # relative, log form
    plane_samples: int
    max_plane_residual: float        # relative, plane form (subset)
    max_displacement: float
    displacement_bound: float
    displacement_violations: int
    annulus_violations: int
    equivariance_violations: int
    roundtrip_checked: int
    roundtrip_failures: int
    escape_transport_checked: int
    escape_transport_failures: int

    @property
    def valid(self) -> bool:
        return (self.displacement_violations == 0 and self.annulus_violations == 0
                and self.equivariance_violations == 0 and self.roundtrip_failures == 0
                and self.escape_transport_failures == 0)


def deep_hair_point(G: LogTransform, tid, re_target: float) -> complex:
    """A point on the constant-itinerary hair with Re ~ re_target, built by
    pulling a seed back from the deepest float-representable orbit level.

    The chain pulls through as many levels as the forward tower of
    re_target admits, so the certification shrinks by the product of the
    (enormous) orbit moduli: error is far below float resolution for any
    reachable target.  Exponential cores only.
    """
    from .logspace import seed_anchor, y_anchor

    if G.kind != "exp":
        raise DomainError("deep hair targeting is implemented for exponential cores")
    tower = [re_target]
    while True:
        nxt = tower[-1] + G.delta.real  # Re of core argument
        if nxt > 690.0:
            break
        val = math.exp(nxt) + G.c.real
        if val > 1e305 or val <= tower[-1]:
            break
        tower.append(val)
    w = complex(tower[-1], y_anchor(G, tid)) if len(tower) > 1 \
        else seed_anchor(G, tid, max(0.0, math.exp(min(re_target + G.delta.real, 700.0))))
    for _ in range(len(tower) - 1):
        w = inverse_branch(G, tid, w)
    return w


def verify_conjugacy(C: ConjugacyMap, n_samples: int, rng,
                     residual_slack: float = 100.0) -> ConjugacyReport:
    """Sample deep points of the rescaled lift's escaping region, run the
    conjugacy, and check every bound it promises.

    Failures are recorded, not raised.  Residuals are relative; the plane
    form is evaluated on the subset where all four plane values are
    representable.
    """
    if n_samples < 1:
        raise DomainError("need at least one sample")
    tpb = 2.0 * math.pi
    max_res = 0.0
    max_plane_res = 0.0
    plane_n = 0
    max_disp = 0.0
    disp_viol = 0
    ann_viol = 0
    eq_viol = 0
    converged = 0
    rt_checked = rt_failed = 0
    et_checked = et_failed = 0

    bands = [0, 1, -1, 2, -2, 3, -3]
    shift = -C.G.delta.real
    lo = max(math.log(max(C.Q, 1.0)) + shift, C.G.logL + 8.0 * math.pi) + 0.2
    hi = 650.0

    done = 0
    while done < n_samples:
        k = bands[rng.randrange(len(bands))] if C.G.kind == "exp" else _principal_pair_id()
        # mix a plane-representable zone (just above lo) with deep targets
        if rng.random() < 0.35:
            re_target = lo + 2.0 * rng.random()
        else:
            re_target = lo + (hi - lo) * rng.random()
        try:
            w = deep_hair_point(C.G, k, re_target)
            x, budget = conjugate_log(C, w)
        except (OrbitLeftHalfPlane, LogOverflow, DomainError):
            done += 1
            continue
        done += 1
        converged += 1
        tol = residual_slack * max(budget.total(abs(w)), 1e-15 * (1 + abs(w)))
        disp = abs(x - w)
        max_disp = max(max_disp, disp)
        if disp > C.displacement_bound + tol:
            disp_viol += 1
        if abs(x.real - w.real) > C.displacement_bound + tol:
            ann_viol += 1
        # functional equation, log form
        try:
            gw = forward_on_tract(C.G, w)
            x2, b2 = conjugate_log(C, gw)
            fx = forward_on_tract(C.F, x)
            res = abs(x2 - fx) / (1.0 + abs(fx))
            max_res = max(max_res, res)
        except (LogOverflow, OrbitLeftHalfPlane, DomainError):
            pass
        else:
            # plane form on the fully representable subset
            if max(w.real, gw.real, x.real, fx.real) < 700.0:
                plane_n += 1
                z = cmath.exp(w)
                theta_gz = cmath.exp(x2)
                f_theta_z = cmath.exp(fx)
                max_plane_res = max(max_plane_res,
                                    abs(theta_gz - f_theta_z) / abs(f_theta_z))
        # 2*pi*i equivariance
        try:
            xs, bs = conjugate_log(C, w + tpb * 1j)
            if abs(xs - (x + tpb * 1j)) > tol + residual_slack * bs.total(abs(w)):
                eq_viol += 1
        except (OrbitLeftHalfPlane, LogOverflow, DomainError):
            pass
        # mirror round trip from the original side
        try:
            wf = x
            wg, bg = conjugate_log_inverse(C, wf)
            rt_checked += 1
            if abs(wg - w) > tol + residual_slack * bg.total(abs(w)):
                rt_failed += 1
        except (OrbitLeftHalfPlane, LogOverflow, DomainError):
            pass
        # escaping points transport to escaping points
        if x.real < 700.0:
            from .rays import escape_test
            try:
                z_img = cmath.exp(x)
                et_checked += 1
                verdict = escape_test(C.F.family, z_img, max(C.F.family.L + 1.0, 10.0), 30)
                if verdict.kind == "reentered":
                    et_failed += 1
            except DomainError:
                et_checked -= 1
    return ConjugacyReport(
        samples=done, converged=converged, max_residual=max_res,
        plane_samples=plane_n, max_plane_residual=max_plane_res,
        max_displacement=max_disp, displacement_bound=C.displacement_bound,
        displacement_violations=disp_viol, annulus_violations=ann_viol,
        equivariance_violations=eq_viol,
        roundtrip_checked=rt_checked, roundtrip_failures=rt_failed,
        escape_transport_checked=et_checked, escape_transport_failures=et_failed,
    )


def _principal_pair_id():
    from .logspace import PairTract
    return PairTract(1, 0, 0)
