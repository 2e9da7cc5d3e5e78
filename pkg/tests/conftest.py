import math

import pytest

from lanemden.geometry import DomainSpec, build_grid


@pytest.fixture(scope="session")
def square64():
    return build_grid(DomainSpec.rectangle(1, 1), 64)


@pytest.fixture(scope="session")
def disc32():
    return build_grid(DomainSpec.disc(1), 32)


@pytest.fixture(scope="session")
def ball3():
    return build_grid(DomainSpec.ball(3), 400)


@pytest.fixture(scope="session")
def ball3_fine():
    return build_grid(DomainSpec.ball(3), 2000)


@pytest.fixture(scope="session")
def kite():
    return build_grid(DomainSpec.polygon([(0, 0), (1, 0), (1.2, 0.7), (0.2, 1.0)]), 24)


@pytest.fixture(scope="session")
def sqrt_pi_square():
    s = math.sqrt(math.pi)
    return DomainSpec.rectangle(s, s)
