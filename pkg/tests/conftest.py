import pytest

from movoid.construct import ConstructionParams, build_candidate
from movoid.gf import build_field
from movoid.symplectic import make_space


@pytest.fixture(scope="session")
def gf81():
    return build_field(3, 4)


@pytest.fixture(scope="session")
def gf729():
    return build_field(3, 6)


@pytest.fixture(scope="session")
def w33():
    """W(3,3): GF(3^4) viewed as GF(3)^4."""
    return make_space(3, 1, 2)


@pytest.fixture(scope="session")
def smallest():
    """b = 1 candidate in W(5,9) over GF(3^12)."""
    return build_candidate(ConstructionParams.resolve(3, ell=3, t=2, r=3, b=1))
