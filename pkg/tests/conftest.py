import numpy as np
import pytest

from esm2d import (
    DirectionGrid,
    DiscSpec,
    EsmConfig,
    RegConfig,
    SamplingGrid,
    ScattererSpec,
    synthesize_farfield,
)
from esm2d.sampling import indicator_field

# canonical noise seed for all noisy fixtures
SEED = 11

TRUE_CENTER = np.array([3.0, 5.0])


@pytest.fixture(scope="session")
def obs52():
    return DirectionGrid.uniform(52)


@pytest.fixture(scope="session")
def inc0():
    return DirectionGrid((0.0,))


@pytest.fixture(scope="session")
def paper_cfg():
    """Sampling disc R=1, k=1, grid [-10,10]^2 step 0.1, fixed alpha 1e-5."""
    return EsmConfig(
        disc=DiscSpec(radius=1.0, wavenumber=1.0),
        grid=SamplingGrid(-10.0, 10.0, -10.0, 10.0, 0.1),
        reg=RegConfig.fixed(1e-5),
    )


@pytest.fixture(scope="session")
def disc_exact_data(obs52, inc0):
    """Exact far field of a sound-soft disc, rho=0.8 at (3,5), k=1."""
    spec = ScattererSpec(kind="disc", center=(3.0, 5.0), radius=0.8)
    return synthesize_farfield(spec, 1.0, inc0, obs52)


@pytest.fixture(scope="session")
def disc_noisy_data(obs52, inc0):
    spec = ScattererSpec(kind="disc", center=(3.0, 5.0), radius=0.8)
    return synthesize_farfield(
        spec, 1.0, inc0, obs52, noise_level=0.03, seed=SEED
    )


@pytest.fixture(scope="session")
def tri_noisy_data(obs52, inc0):
    """Rounded-triangle obstacle, Dirichlet data, 3% noise."""
    spec = ScattererSpec(kind="triangle")
    return synthesize_farfield(
        spec, 1.0, inc0, obs52, m=128, noise_level=0.03, seed=SEED
    )


@pytest.fixture(scope="session")
def disc_exact_field(paper_cfg, disc_exact_data):
    return indicator_field(paper_cfg, disc_exact_data)


@pytest.fixture(scope="session")
def tri_noisy_field(paper_cfg, tri_noisy_data):
    return indicator_field(paper_cfg, tri_noisy_data)
