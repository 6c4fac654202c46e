import numpy as np
import pytest

from fraclayer.construction import (LayerParams, build_constants,
                                    build_profile, threshold_params)
from fraclayer.kernels import fractional_kernel


@pytest.fixture(scope="session")
def kernel_half():
    return fractional_kernel(0.5)


@pytest.fixture(scope="session")
def desk_params():
    """Oscillatory tuple with a gap exponent keeping cells 0 and 1 in range."""
    return LayerParams(s=0.5, alpha=5.8, beta=5.0, gamma=5.5, delta=5.0,
                       rho=2.1)


@pytest.fixture(scope="session")
def desk_profile(desk_params):
    return build_profile(desk_params)


@pytest.fixture(scope="session")
def threshold_profile_pack():
    """Parameters running exactly at their monotonicity sufficiency threshold."""
    p = threshold_params(0.5, rho_target=2.05)
    cx = build_constants(p)
    return p, cx, build_profile(p, cx)


@pytest.fixture(scope="session")
def paper_constants():
    p = LayerParams(s=0.5, alpha=5.8, beta=5.0, gamma=5.5, delta=5.0,
                    mode="paper")
    return build_constants(p)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240809)
