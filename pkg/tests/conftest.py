import math

import pytest

from logtract.families import Exponential, ExpPair, disjoint_type_rescale
from logtract.logspace import Itinerary, log_transform


@pytest.fixture(scope="session")
def exp1():
    return Exponential(1)


@pytest.fixture(scope="session")
def pair_half():
    return ExpPair(0.5, 0.5)


@pytest.fixture(scope="session")
def rescaled_exp(exp1):
    lam, g = disjoint_type_rescale(exp1)
    return lam, g


@pytest.fixture(scope="session")
def G(rescaled_exp):
    return log_transform(rescaled_exp[1])


@pytest.fixture(scope="session")
def F(exp1):
    return log_transform(exp1)


@pytest.fixture(scope="session")
def zero_bar():
    return Itinerary.constant(0)
