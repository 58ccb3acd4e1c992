"""Concrete entire-function models with bounded singular sets, their singular
data, and disjoint-type rescalings.

Supported shapes: z -> lam*e^z, z -> a*e^z + b*e^(-z), plus domain rescaling
f(lam*z) and range rescaling lam*f(z) of either.  Every model carries two
radii: K bounds the singular set, L >= K bounds the image of the K-disc, so
preimages of {|w| > L} stay clear of the singular values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

from .errors import DomainError

# exp overflows just above exp(709.78); stay conservative
MAX_LOG = 709.0

EIGHT_PI = 8.0 * math.pi

# multiplicative slack added above the exact singular radius
K_MARGIN = 1.25


@dataclass(frozen=True)
class Escaped:
    """Overflow sentinel: the modelled value left double range.

    Carries the (signed) real part of the argument whose exponential
    overflowed; escape classification treats this as definite escape.
    """

    real_part: float

    def __abs__(self) -> float:
        return math.inf


@dataclass(frozen=True)
class Exponential:
    """z -> lam * e^z."""

    lam: complex
    K: float = field(default=0.0)
    L: float = field(default=0.0)

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("scale of the exponential model must be nonzero")
        if self.K == 0.0:
            object.__setattr__(self, "K", 1.0)
        if self.L == 0.0:
            object.__setattr__(self, "L", max(3.0 * abs(self.lam), K_MARGIN * self.K))
        _check_radii(self)


@dataclass(frozen=True)
class ExpPair:
    """z -> a * e^z + b * e^(-z)."""

    a: complex
    b: complex
    K: float = field(default=0.0)
    L: float = field(default=0.0)

    def __post_init__(self):
        if self.a == 0 or self.b == 0:
            raise DomainError("both coefficients of the two-sided model must be nonzero")
        if self.K == 0.0:
            object.__setattr__(self, "K", K_MARGIN * 2.0 * abs(cmath.sqrt(self.a * self.b)))
        if self.L == 0.0:
            bound = (abs(self.a) + abs(self.b)) * math.exp(self.K)
            object.__setattr__(self, "L", K_MARGIN * bound)
        _check_radii(self)


@dataclass(frozen=True)
class DomainRescaled:
    """z -> base(lam * z)."""

    base: "FunctionFamily"
    lam: complex
    K: float = field(default=0.0)
    L: float = field(default=0.0)

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("domain rescale factor must be nonzero")
        if self.K == 0.0:
            object.__setattr__(self, "K", self.base.K)
        if self.L == 0.0:
            object.__setattr__(self, "L", self.base.L)
        _check_radii(self)


@dataclass(frozen=True)
class RangeRescaled:
    """z -> lam * base(z)."""

    base: "FunctionFamily"
    lam: complex
    K: float = field(default=0.0)
    L: float = field(default=0.0)

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("range rescale factor must be nonzero")
        if self.K == 0.0:
            object.__setattr__(self, "K", max(abs(self.lam) * self.base.K, 1e-300))
        if self.L == 0.0:
            fallback = K_MARGIN * _image_bound(self, self.K)
            object.__setattr__(self, "L", max(abs(self.lam) * self.base.L, min(fallback, 1e300)))
        _check_radii(self)


FunctionFamily = Exponential | ExpPair | DomainRescaled | RangeRescaled


def _check_radii(f) -> None:
    if not (f.K > 0 and f.L >= f.K):
        raise DomainError(f"radii must satisfy 0 < K <= L, got K={f.K}, L={f.L}")
    _, values = singular_bound(f)
    top = max((abs(v) for v in values), default=0.0)
    if f.K < top:
        raise DomainError(f"K={f.K} does not bound the singular values (max {top})")


def _image_bound(f, r: float) -> float:
    """Closed-form upper bound for |f| on the closed r-disc."""
    c = canonical_form(f)
    s = min(abs(c.nu) * r, MAX_LOG)
    if c.kind == "exp":
        return abs(c.params[0]) * math.exp(s)
    return (abs(c.params[0]) + abs(c.params[1])) * math.exp(s)


def evaluate(f: FunctionFamily, z: complex) -> complex | Escaped:
    """Value of the modelled function at z; Escaped on float overflow.

    Rescaled kinds evaluate by exact composition, so float semantics agree
    bit-for-bit with evaluating the base at the rescaled argument.
    """
    if isinstance(f, Exponential):
        if z.real + math.log(abs(f.lam)) > MAX_LOG:
            return Escaped(z.real)
        return f.lam * cmath.exp(z)
    if isinstance(f, ExpPair):
        if z.real > MAX_LOG - math.log1p(abs(f.a)):
            return Escaped(z.real)
        if -z.real > MAX_LOG - math.log1p(abs(f.b)):
            return Escaped(z.real)
        return f.a * cmath.exp(z) + f.b * cmath.exp(-z)
    if isinstance(f, DomainRescaled):
        return evaluate(f.base, f.lam * z)
    if isinstance(f, RangeRescaled):
        v = evaluate(f.base, z)
        if isinstance(v, Escaped):
            return v
        w = f.lam * v
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            return Escaped(z.real)
        return w
    raise DomainError(f"unknown family {f!r}")


def derivative(f: FunctionFamily, z: complex) -> complex | Escaped:
    """Closed-form derivative of the modelled function at z."""
    if isinstance(f, Exponential):
        if z.real + math.log(abs(f.lam)) > MAX_LOG:
            return Escaped(z.real)
        return f.lam * cmath.exp(z)
    if isinstance(f, ExpPair):
        if z.real > MAX_LOG - math.log1p(abs(f.a)):
            return Escaped(z.real)
        if -z.real > MAX_LOG - math.log1p(abs(f.b)):
            return Escaped(z.real)
        return f.a * cmath.exp(z) - f.b * cmath.exp(-z)
    if isinstance(f, DomainRescaled):
        d = derivative(f.base, f.lam * z)
        return d if isinstance(d, Escaped) else f.lam * d
    if isinstance(f, RangeRescaled):
        d = derivative(f.base, z)
        return d if isinstance(d, Escaped) else f.lam * d
    raise DomainError(f"unknown family {f!r}")


def singular_bound(f: FunctionFamily) -> tuple[float, list[complex]]:
    """Radius bounding the singular values, together with the values.

    The exponential model has the single asymptotic value it omits; the
    two-sided model has the two critical values +-2*sqrt(a*b); domain
    rescaling leaves the singular set unchanged and range rescaling scales it.
    """
    if isinstance(f, Exponential):
        return 1.0, [0j]
    if isinstance(f, ExpPair):
        cv = 2.0 * cmath.sqrt(f.a * f.b)
        return K_MARGIN * abs(cv), [cv, -cv]
    if isinstance(f, DomainRescaled):
        k, values = singular_bound(f.base)
        return k, values
    if isinstance(f, RangeRescaled):
        _, values = singular_bound(f.base)
        scaled = [f.lam * v for v in values]
        top = max((abs(v) for v in scaled), default=0.0)
        if top == 0.0:
            return singular_bound(f.base)[0], scaled
        return K_MARGIN * top, scaled
    raise DomainError(f"unknown family {f!r}")


@dataclass(frozen=True)
class DisjointTypeCertificate:
    """Sampled evidence that the closed K-disc maps strictly inside itself.

    Sampling is evidence, not proof; the margin is reported so callers can
    judge how robustly the check binds.
    """

    checked_radius: float
    boundary_samples: int
    max_image_modulus: float
    singular_moduli: list[float]

    @property
    def valid(self) -> bool:
        return self.max_image_modulus < self.checked_radius and all(
            m < self.checked_radius for m in self.singular_moduli
        )


def verify_disjoint_type(f: FunctionFamily, n_samples: int = 1024) -> DisjointTypeCertificate:
    """Sample |f| on the boundary of the K-disc and record the worst case."""
    if n_samples < 8:
        raise DomainError("need at least 8 boundary samples")
    radius = f.K
    worst = 0.0
    for j in range(n_samples):
        z = radius * cmath.exp(2.0j * math.pi * j / n_samples)
        v = evaluate(f, z)
        worst = max(worst, math.inf if isinstance(v, Escaped) else abs(v))
    _, values = singular_bound(f)
    return DisjointTypeCertificate(
        checked_radius=radius,
        boundary_samples=n_samples,
        max_image_modulus=worst,
        singular_moduli=[abs(v) for v in values],
    )


def _certifiable_radius(f: FunctionFamily, start: float, n_samples: int = 256) -> float:
    """Smallest radius in {start * 2^i} at which the sampled image of the
    boundary circle and all singular values stay strictly inside."""
    _, values = singular_bound(f)
    sing_top = max((abs(v) for v in values), default=0.0)
    r = start
    for _ in range(80):
        worst = 0.0
        for j in range(n_samples):
            z = r * cmath.exp(2.0j * math.pi * j / n_samples)
            v = evaluate(f, z)
            worst = max(worst, math.inf if isinstance(v, Escaped) else abs(v))
        if worst < r and sing_top < r:
            return r
        r *= 2.0
    raise DomainError("no certifiable radius found by doubling; map is not disjoint type here")


def disjoint_type_rescale(f: FunctionFamily, mode: str = "domain") -> tuple[complex, FunctionFamily]:
    """Rescale f into the disjoint-type regime.

    The factor is K / (e^(8*pi) * L); with that much slack the rescaled map
    pulls {|w| > L} back outside {|w| <= e^(8*pi) * L}, which is what the
    half-speed contraction of pullbacks rests on.  mode 'domain' rescales
    the argument (g(z) = f(lam*z)), 'range' the value (lam * f(z)).
    """
    lam = f.K / (math.exp(EIGHT_PI) * f.L)
    if mode == "domain":
        g = DomainRescaled(f, lam, K=f.K, L=f.L)
        g = DomainRescaled(f, lam, K=_certifiable_radius(g, f.K), L=f.L)
        return lam, g
    if mode == "range":
        h = RangeRescaled(f, lam, K=abs(lam) * f.K, L=abs(lam) * f.L)
        h = RangeRescaled(f, lam, K=_certifiable_radius(h, abs(lam) * f.K), L=abs(lam) * f.L)
        return lam, h
    raise DomainError(f"unknown rescale mode {mode!r}")


# ---------------------------------------------------------------------------
# canonical form: every supported composition reduces to core(nu * z) with
# core either lam*e^u or a*e^u + b*e^(-u); the log-coordinate machinery only
# ever sees this shape.

@dataclass(frozen=True)
class CanonicalForm:
    kind: str                    # "exp" or "pair"
    params: tuple[complex, ...]  # (lam,) or (a, b)
    nu: complex                  # argument scale: modelled f(z) = core(nu * z)


def canonical_form(f: FunctionFamily) -> CanonicalForm:
    if isinstance(f, Exponential):
        return CanonicalForm("exp", (f.lam,), 1.0 + 0j)
    if isinstance(f, ExpPair):
        return CanonicalForm("pair", (f.a, f.b), 1.0 + 0j)
    if isinstance(f, DomainRescaled):
        c = canonical_form(f.base)
        return CanonicalForm(c.kind, c.params, c.nu * f.lam)
    if isinstance(f, RangeRescaled):
        c = canonical_form(f.base)
        if c.kind == "exp":
            return CanonicalForm("exp", (f.lam * c.params[0],), c.nu)
        return CanonicalForm("pair", (f.lam * c.params[0], f.lam * c.params[1]), c.nu)
    raise DomainError(f"unknown family {f!r}")


# ---------------------------------------------------------------------------
# JSON descriptors (CLI run configs)

def _c(pair) -> complex:
    return complex(pair[0], pair[1])


def _pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def family_to_dict(f: FunctionFamily) -> dict:
    if isinstance(f, Exponential):
        return {"kind": "exponential", "lambda": _pair(f.lam), "K": f.K, "L": f.L}
    if isinstance(f, ExpPair):
        return {"kind": "exp_pair", "a": _pair(f.a), "b": _pair(f.b), "K": f.K, "L": f.L}
    if isinstance(f, DomainRescaled):
        return {"kind": "domain_rescaled", "base": family_to_dict(f.base),
                "lambda": _pair(f.lam), "K": f.K, "L": f.L}
    if isinstance(f, RangeRescaled):
        return {"kind": "range_rescaled", "base": family_to_dict(f.base),
                "lambda": _pair(f.lam), "K": f.K, "L": f.L}
    raise DomainError(f"unknown family {f!r}")


def family_from_dict(d: dict) -> FunctionFamily:
    kind = d.get("kind")
    K = float(d.get("K", 0.0))
    L = float(d.get("L", 0.0))
    if kind == "exponential":
        return Exponential(_c(d["lambda"]), K=K, L=L)
    if kind == "exp_pair":
        return ExpPair(_c(d["a"]), _c(d["b"]), K=K, L=L)
    if kind == "domain_rescaled":
        return DomainRescaled(family_from_dict(d["base"]), _c(d["lambda"]), K=K, L=L)
    if kind == "range_rescaled":
        return RangeRescaled(family_from_dict(d["base"]), _c(d["lambda"]), K=K, L=L)
    raise DomainError(f"unknown family kind {kind!r}")
