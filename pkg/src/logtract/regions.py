"""Plane regions used throughout: discs, half-planes, annuli, strips and an
exact-rational open square, plus the error-budget carrier for certified
values.

The square stores its half-side as a `fractions.Fraction` and membership is
decided by exact rational comparison; floats are converted losslessly (every
finite float is a dyadic rational), so no rounding ever enters the square
test.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError

INF = math.inf

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"disc radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class HalfPlane:
    """Open right half-plane { Re z > q }."""

    q: float


@dataclass(frozen=True)
class Annulus:
    """Open annulus { a < |z| < b }; b = math.inf encodes a disc complement."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.a < self.b):
            raise DomainError(f"annulus radii must satisfy 0 < a < b, got {self.a}, {self.b}")


@dataclass(frozen=True)
class Strip:
    """Open vertical strip { a < Re z < b }."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise DomainError(f"strip bounds must satisfy a < b, got {self.a}, {self.b}")


@dataclass(frozen=True)
class Square:
    """Open square (-Q, Q)^2 with exact rational half-side Q."""

    Q: Fraction

    def __post_init__(self):
        if isinstance(self.Q, float):
            raise DomainError("square half-side must be an exact rational, not a float")
        object.__setattr__(self, "Q", Fraction(self.Q))
        if not self.Q > 0:
            raise DomainError(f"square half-side must be positive, got {self.Q}")


Region = Disc | HalfPlane | Annulus | Strip | Square


def contains(region: Region, z: complex) -> bool:
    """Whether z lies in the open region."""
    if isinstance(region, Disc):
        return abs(z - region.center) < region.radius
    if isinstance(region, HalfPlane):
        return z.real > region.q
    if isinstance(region, Annulus):
        r = abs(z)
        return region.a < r < region.b
    if isinstance(region, Strip):
        return region.a < z.real < region.b
    if isinstance(region, Square):
        # exact: finite floats convert to rationals without rounding
        re, im = Fraction(z.real), Fraction(z.imag)
        return -region.Q < re < region.Q and -region.Q < im < region.Q
    raise DomainError(f"unknown region {region!r}")


def exp_image(region: Region) -> Region:
    """Image of a strip or half-plane under exp, as a radial region.

    Strip(a, b) maps onto Annulus(e^a, e^b); HalfPlane(q) maps onto the
    complement of the closed disc of radius e^q, encoded Annulus(e^q, inf).
    """
    if isinstance(region, Strip):
        return Annulus(math.exp(region.a), math.exp(region.b))
    if isinstance(region, HalfPlane):
        return Annulus(math.exp(region.q), INF)
    raise DomainError(f"exp_image is defined for strips and half-planes, got {type(region).__name__}")


@dataclass(frozen=True)
class ErrorBudget:
    """Certified error split into an analytic part (from contraction
    estimates) and a count of ulp-scale float operations.

    total(scale) = analytic_bound + float_epsilon_count * eps * scale.
    """

    analytic_bound: float = 0.0
    float_epsilon_count: int = 0

    def __post_init__(self):
        if self.analytic_bound < 0:
            raise DomainError("analytic bound must be nonnegative")

    def total(self, scale: float = 1.0) -> float:
        return self.analytic_bound + self.float_epsilon_count * _EPS * abs(scale)

    def merged(self, other: "ErrorBudget") -> "ErrorBudget":
        return ErrorBudget(
            self.analytic_bound + other.analytic_bound,
            self.float_epsilon_count + other.float_epsilon_count,
        )
