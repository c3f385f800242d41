import numpy as np
import pytest

from skewdyn.rational import MapFamily
from skewdyn.skew import PointX
from skewdyn.sphere import from_complex, SpherePoint
from skewdyn.symbolic import Word


def fam_of(*coeff_lists):
    return MapFamily.polynomials(*coeff_lists)


Z2 = [0, 0, 1]
Z3 = [0, 0, 0, 1]


def pt(word: str, z) -> PointX:
    zp = SpherePoint.infinity() if z == "inf" else from_complex(z)
    return PointX(Word.parse(word), zp)


@pytest.fixture
def z2():
    return fam_of(Z2)


@pytest.fixture
def z2z3():
    return fam_of(Z2, Z3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
