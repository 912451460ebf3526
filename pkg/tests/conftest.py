from pathlib import Path

import numpy as np
import pytest

from pmd_interferometry import DispersionRelation, DispersionUtils, Sample, SourceSpectrum

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
OMEGA0 = DispersionUtils.omega0_from_wavelength(1550.0)


def post_sample(length=100.0, alpha_h=3.0, alpha_v=3.05, k0_h=0.0, k0_v=0.0, beta_h=0.0, beta_v=0.0):
    return Sample(length=length,
                  h=DispersionRelation(k0=k0_h, alpha=alpha_h, beta=beta_h),
                  v=DispersionRelation(k0=k0_v, alpha=alpha_v, beta=beta_v))


@pytest.fixture
def spectrum():
    return SourceSpectrum(omega0=OMEGA0, tau_minus=1.0)


@pytest.fixture
def broadband():
    """200 nm at 1550 nm."""
    return SourceSpectrum(omega0=OMEGA0, tau_minus=DispersionUtils.tau_minus_from_bandwidth(1550.0, 200.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
