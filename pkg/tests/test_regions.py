import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from logtract.errors import DomainError
from logtract.regions import (
    Annulus,
    Disc,
    ErrorBudget,
    HalfPlane,
    Square,
    Strip,
    contains,
    exp_image,
)


def test_containment_basics():
    assert contains(Annulus(1, 2), 1.5 + 0j)
    assert not contains(HalfPlane(0), -1 + 0j)
    # 10.5 >= 3: decided by direct comparison
    assert not contains(Square(Fraction(3)), complex(10.5, 0.707))
    assert contains(Disc(0j, 2.0), 1.9 + 0j)
    assert contains(Strip(-1, 1), 0.5 + 7j)


def test_exp_image_of_strips():
    img = exp_image(Strip(0.0, math.log(2)))
    assert isinstance(img, Annulus)
    assert img.a == pytest.approx(1.0) and img.b == pytest.approx(2.0)
    img2 = exp_image(Strip(-1.0, 0.0))
    assert img2.a == pytest.approx(math.exp(-1)) and img2.b == pytest.approx(1.0)


def test_exp_image_of_half_plane_is_disc_complement():
    img = exp_image(HalfPlane(math.log(3)))
    assert img.a == pytest.approx(3.0)
    assert img.b == math.inf
    assert contains(img, 10 + 0j) and not contains(img, 2 + 0j)


def test_exp_image_rejects_other_variants():
    with pytest.raises(DomainError):
        exp_image(Disc(0j, 1.0))


@given(st.floats(-2, 1), st.floats(0.1, 2), st.floats(-3, 3), st.floats(-3.1, 3.1))
def test_exp_commutes_with_containment(a, width, x, y):
    strip = Strip(a, a + width)
    # open regions: stay clear of the boundary, where rounding decides
    assume(min(abs(x - a), abs(x - a - width)) > 1e-9)
    z = complex(x, y)
    if abs(z.imag) < math.pi:
        assert contains(exp_image(strip), cmath.exp(z)) == contains(strip, z)


def test_square_requires_exact_rational():
    with pytest.raises(DomainError):
        Square(3.0)
    # exact decision: float 1/3 is strictly below the rational 1/3
    q = Square(Fraction(1, 3))
    assert contains(q, complex(1 / 3 - 1e-17, 0)) == (Fraction(1 / 3) < Fraction(1, 3))


def test_error_budget():
    b = ErrorBudget(1e-9, 12)
    assert b.total(10.0) > 1e-9
    merged = b.merged(ErrorBudget(1e-10, 3))
    assert merged.analytic_bound == pytest.approx(1.1e-9)
    assert merged.float_epsilon_count == 15
    with pytest.raises(DomainError):
        ErrorBudget(-1.0, 0)
