"""Shared problem fixtures (session-scoped so transform caches persist)."""

import pytest

from utmcont.expr import parse
from utmcont.continuous import ProblemSpec

GAUSS_U0 = "exp(-(x-1)^2)"
GAUSS_F0 = "exp(-1/(4*t+1))/sqrt(4*t+1)"


@pytest.fixture(scope="session")
def heat_gaussian():
    return ProblemSpec("heat-dirichlet", u0=parse(GAUSS_U0),
                       f0=parse(GAUSS_F0))


@pytest.fixture(scope="session")
def heat_te():
    return ProblemSpec("heat-dirichlet", u0=parse(GAUSS_U0),
                       f0=parse("t*exp(-t)"))


@pytest.fixture(scope="session")
def neumann_spec():
    return ProblemSpec("heat-neumann", u0=parse("exp(-x)*cos(3*pi*x)"),
                       f1=parse("-sin(4*pi*t)/(4*pi)"))


@pytest.fixture(scope="session")
def advected_plus():
    return ProblemSpec("advected-heat", c=1.0, u0=parse("exp(-x^2)"),
                       f0=parse("exp(-t^2/(4*t+1))/sqrt(4*t+1)"))


@pytest.fixture(scope="session")
def advected_minus():
    return ProblemSpec("advected-heat", c=-1.0, u0=parse("exp(-x^2)"),
                       f0=parse("exp(-t^2/(4*t+1))/sqrt(4*t+1)"))


@pytest.fixture(scope="session")
def kdv1_cos():
    return ProblemSpec("kdv-one-bc", u0=parse("2*exp(-x)*cos(x)"),
                       f0=parse("2*exp(-2*t)*cos(2*t)"),
                       u0_decay=("exponential", 1.0))


@pytest.fixture(scope="session")
def kdv1_te():
    return ProblemSpec("kdv-one-bc", u0=parse("2*exp(-x)*cos(x)"),
                       f0=parse("t*exp(-t)"),
                       u0_decay=("exponential", 1.0))


@pytest.fixture(scope="session")
def kdv2_cos():
    return ProblemSpec("kdv-two-bc", u0=parse("2*exp(-sqrt(3)*x)*cos(x)"),
                       f0=parse("2*cos(8*t)"),
                       f1=parse("-2*sqrt(3)*cos(8*t) - 2*sin(8*t)"))


@pytest.fixture(scope="session")
def kdv2_zero_data():
    return ProblemSpec("kdv-two-bc", u0=parse("2*exp(-sqrt(3)*x)*cos(x)"),
                       f0=parse("0*t"), f1=parse("0*t"))


@pytest.fixture(scope="session")
def interval_gaussian():
    return ProblemSpec("heat-finite-interval", L=1.0, u0=parse(GAUSS_U0),
                       f0=parse(GAUSS_F0), g0=parse("1/sqrt(4*t+1)"))
