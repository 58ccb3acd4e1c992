import cmath
import math
import random

import pytest

from logtract.errors import DomainError
from logtract.families import (
    DomainRescaled,
    Escaped,
    ExpPair,
    Exponential,
    RangeRescaled,
    canonical_form,
    derivative,
    disjoint_type_rescale,
    evaluate,
    family_from_dict,
    family_to_dict,
    singular_bound,
    verify_disjoint_type,
)

EIGHT_PI = 8 * math.pi


def test_evaluate_basics(exp1, pair_half):
    assert evaluate(exp1, 0j) == 1
    assert evaluate(pair_half, 0j) == 1  # cosh(0)
    lam = 0.37
    g = DomainRescaled(exp1, lam)
    assert abs(evaluate(g, 1 / lam) - math.e) < 1e-12


def test_derivative_basics(exp1):
    assert derivative(exp1, 0j) == 1
    assert derivative(ExpPair(1, -1), 0j) == 2


def test_derivative_against_central_difference(exp1, pair_half):
    rng = random.Random(11)
    h = 1e-6
    for f in (exp1, pair_half, DomainRescaled(exp1, 0.7 + 0.1j),
              RangeRescaled(pair_half, 2.0)):
        for _ in range(100):
            z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
            fd = (evaluate(f, z + h) - evaluate(f, z - h)) / (2 * h)
            assert abs(fd - derivative(f, z)) < 1e-6


def _newton_critical_values(f, rng, n_starts=40):
    """Independent oracle: critical values via Newton on f' with a
    numerically differentiated f''."""
    found = []
    h = 1e-5
    for _ in range(n_starts):
        z = complex(rng.uniform(-2, 2), rng.uniform(-7, 7))
        for _ in range(60):
            d1 = derivative(f, z)
            d2 = (derivative(f, z + h) - derivative(f, z - h)) / (2 * h)
            if abs(d2) < 1e-14:
                break
            z = z - d1 / d2
        if abs(derivative(f, z)) < 1e-9:
            v = evaluate(f, z)
            if not any(abs(v - u) < 1e-6 for u in found):
                found.append(v)
    return found


def test_singular_values_exponential(exp1):
    k, values = singular_bound(exp1)
    assert values == [0j]
    assert k == 1.0


def test_singular_values_exp_pair_match_newton_oracle():
    rng = random.Random(5)
    for a, b in [(1, 1), (0.5, 0.5), (2, 0.5)]:
        p = ExpPair(a, b)
        k, values = singular_bound(p)
        expected = 2 * cmath.sqrt(complex(a) * b)
        assert {round(v.real, 6) for v in values} == \
            {round(expected.real, 6), round(-expected.real, 6)}
        assert k == pytest.approx(1.25 * abs(expected))
        oracle = _newton_critical_values(p, rng)
        for v in oracle:
            assert min(abs(v - u) for u in values) < 1e-6


def test_singular_values_rescaled(exp1):
    k, values = singular_bound(RangeRescaled(exp1, 2.0))
    assert values == [0j]
    assert k == 1.0  # zero scales to zero: bound unchanged
    k2, values2 = singular_bound(DomainRescaled(ExpPair(1, 1), 5.0))
    assert k2 == pytest.approx(2.5)


def test_rescale_factor_formula(exp1):
    lam, g = disjoint_type_rescale(exp1)
    # oracle: direct arithmetic on K / (e^(8 pi) L) with K=1, L=3
    assert lam == pytest.approx(1.0 / (3.0 * math.exp(EIGHT_PI)), rel=1e-12)
    assert lam == pytest.approx(4.0538522364697734e-12, rel=1e-12)
    assert lam > 0 and lam.imag == 0 if isinstance(lam, complex) else lam > 0


def test_rescale_passes_certificate(exp1, pair_half):
    for f in (exp1, pair_half):
        for mode in ("domain", "range"):
            _, g = disjoint_type_rescale(f, mode)
            assert verify_disjoint_type(g, 256).valid


def test_unrescaled_exponential_fails_certificate(exp1):
    cert = verify_disjoint_type(exp1, 64)
    assert not cert.valid
    assert cert.max_image_modulus == pytest.approx(math.e)  # attained at z = K


def test_certificate_refinement_stability(exp1):
    _, g = disjoint_type_rescale(exp1)
    assert verify_disjoint_type(g, 8).valid == verify_disjoint_type(g, 4096).valid


def test_overflow_sentinel(exp1):
    v = evaluate(exp1, complex(800.0, 1.0))
    assert isinstance(v, Escaped)
    assert v.real_part == 800.0
    assert abs(v) == math.inf
    p = ExpPair(1, 1)
    assert isinstance(evaluate(p, complex(-800.0, 0)), Escaped)


def test_domain_rescale_exact_composition(exp1, pair_half):
    rng = random.Random(3)
    for f in (exp1, pair_half):
        lam = complex(rng.uniform(0.2, 2), rng.uniform(-1, 1))
        g = DomainRescaled(f, lam)
        for _ in range(1000):
            z = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            assert evaluate(g, z) == evaluate(f, lam * z)


def test_canonical_form_flattens_compositions(exp1):
    f = RangeRescaled(DomainRescaled(exp1, 2.0), 3.0)
    c = canonical_form(f)
    assert c.kind == "exp" and c.params[0] == 3.0 and c.nu == 2.0
    z = 0.7 + 0.2j
    assert abs(evaluate(f, z) - c.params[0] * cmath.exp(c.nu * z)) < 1e-12


def test_serialization_roundtrip(exp1, pair_half):
    for f in (exp1, pair_half, DomainRescaled(exp1, 0.5),
              RangeRescaled(pair_half, 2 + 1j)):
        d = family_to_dict(f)
        assert family_from_dict(d) == f


def test_invalid_families():
    with pytest.raises(DomainError):
        Exponential(0)
    with pytest.raises(DomainError):
        ExpPair(1, 0)
    with pytest.raises(DomainError):
        ExpPair(1, 1, K=0.5)  # below the critical values
