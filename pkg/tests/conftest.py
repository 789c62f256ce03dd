import pytest

from telefid.model import AcceptAll, MbNla, PriorSpec, SurrogateParams
from telefid.profile import Protocol
from telefid.quadrature import QuadConfig

# surrogate parameters used throughout: (V_n, V_eps, kappa) = (0.5, 0.1, 0.6)
# with a width-2 Gaussian input ensemble, and the three reference filter
# settings (1.2, 3.0), (1.4, 2.2), (1.6, 1.8)

REF_SETTINGS = [(1.2, 3.0), (1.4, 2.2), (1.6, 1.8)]


@pytest.fixture(scope="session")
def params():
    return SurrogateParams(0.5, 0.1, 0.6)


@pytest.fixture(scope="session")
def prior():
    return PriorSpec(2.0)


@pytest.fixture(scope="session")
def qcfg():
    return QuadConfig()


@pytest.fixture(scope="session")
def light_cfg():
    """Coarser tolerances for bulk property runs."""
    return QuadConfig(radial_order=16, angular_order=8, panels=2,
                      rel_tol=1e-6, abs_tol=1e-12)


@pytest.fixture(scope="session")
def proto_aa(params):
    return Protocol(params, AcceptAll())


@pytest.fixture(scope="session")
def proto_mild(params):
    return Protocol(params, MbNla(1.2, 3.0))


@pytest.fixture(scope="session")
def proto_tight(params):
    return Protocol(params, MbNla(1.6, 1.8))
