import pytest

from artifact.lattice import Geometry, LatticeSpec, build_basis


@pytest.fixture(scope="session")
def spec():
    return LatticeSpec()


@pytest.fixture(scope="session")
def basis(spec):
    return build_basis(spec, shell_radius=5)


@pytest.fixture(scope="session")
def spec_1d():
    return LatticeSpec(geometry=Geometry.STANDING_WAVE_1D)


@pytest.fixture(scope="session")
def basis_1d(spec_1d):
    return build_basis(spec_1d, shell_radius=5)
