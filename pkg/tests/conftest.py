from fractions import Fraction

import pytest

from qdensity import FixedReal, ShiftVector, parse_real


@pytest.fixture(scope="session")
def sqrt2():
    return FixedReal.sqrt_int(2)


@pytest.fixture(scope="session")
def sqrt3():
    return FixedReal.sqrt_int(3)


@pytest.fixture(scope="session")
def golden():
    return parse_real("surd:1,1,2,5")


@pytest.fixture(scope="session")
def zero():
    return FixedReal.zero()


@pytest.fixture(scope="session")
def xi_sqrt2(sqrt2):
    return ShiftVector.from_values(sqrt2, 0, 0)


@pytest.fixture(scope="session")
def xi_mixed(sqrt2, sqrt3):
    return ShiftVector.from_values(sqrt2, sqrt3, Fraction(1, 2))
