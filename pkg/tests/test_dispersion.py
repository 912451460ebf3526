import math

import numpy as np
import pytest

from pmd_interferometry import (DelayConfig, DispersionRelation, DispersionUtils, InputDomainError, Sample,
                                SourceSpectrum)


@pytest.mark.parametrize("rel, w, expected", [
    (DispersionRelation(k0=5.0), 0.3, 5.0),
    (DispersionRelation(alpha=2.0), -0.5, -1.0),
    (DispersionRelation(k0=1.0, alpha=1.0, beta=1.0, gamma=1.0), 2.0, 15.0),
])
def test_wavenumber(rel, w, expected):
    assert DispersionUtils.wavenumber(rel, w) == pytest.approx(expected)


def test_even_odd_split_examples():
    even, odd = DispersionUtils.even_odd_split(DispersionRelation(k0=1.0, alpha=1.0, beta=1.0), 2.0)
    assert (even, odd) == pytest.approx((5.0, 2.0))
    even, odd = DispersionUtils.even_odd_split(DispersionRelation(k0=0.7, alpha=3.0, beta=2.0, gamma=1.0), 0.0)
    assert (even, odd) == pytest.approx((0.7, 0.0))
    rel = DispersionRelation(alpha=3.0)
    assert DispersionUtils.even_odd_split(rel, 1.0) == pytest.approx((0.0, 3.0))
    assert DispersionUtils.even_odd_split(rel, -1.0) == pytest.approx((0.0, -3.0))


def test_even_odd_split_sums_and_parity(rng):
    for _ in range(50):
        rel = DispersionRelation(*rng.normal(size=4))
        w = rng.normal(size=16)
        even, odd = DispersionUtils.even_odd_split(rel, w)
        even_m, odd_m = DispersionUtils.even_odd_split(rel, -w)
        np.testing.assert_allclose(even + odd, DispersionUtils.wavenumber(rel, w), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(even - even_m, 0.0, atol=1e-12)
        np.testing.assert_allclose(odd + odd_m, 0.0, atol=1e-12)


def test_pmd_delta_lumps_over_length():
    sample = Sample(length=100.0, h=DispersionRelation(k0=0.1, alpha=3.0, beta=1e-4),
                    v=DispersionRelation(k0=0.3, alpha=3.05, beta=3e-4))
    delta = DispersionUtils.pmd_delta(sample)
    assert delta.dalpha == pytest.approx(0.05)
    assert delta.dA == pytest.approx(5.0)
    assert delta.dphi == pytest.approx(100.0 * delta.dk0)
    assert delta.dB == pytest.approx(100.0 * delta.dbeta)


def test_pmd_delta_identical_and_empty_samples():
    rel = DispersionRelation(k0=1.0, alpha=2.0, beta=3.0)
    same = DispersionUtils.pmd_delta(Sample(length=10.0, h=rel, v=rel))
    assert (same.dk0, same.dalpha, same.dbeta, same.dA) == (0.0, 0.0, 0.0, 0.0)
    empty = DispersionUtils.pmd_delta(Sample(length=0.0, h=DispersionRelation(alpha=1.0),
                                             v=DispersionRelation(alpha=1.5)))
    assert empty.dalpha == pytest.approx(0.5)
    assert (empty.dphi, empty.dA, empty.dB) == (0.0, 0.0, 0.0)


def test_pmd_delta_is_antisymmetric_in_h_and_v(rng):
    for _ in range(10):
        h, v = DispersionRelation(*rng.normal(size=4)), DispersionRelation(*rng.normal(size=4))
        length = float(rng.uniform(0.0, 200.0))
        forward = DispersionUtils.pmd_delta(Sample(length=length, h=h, v=v))
        backward = DispersionUtils.pmd_delta(Sample(length=length, h=v, v=h))
        for name in ("dk0", "dalpha", "dbeta", "dphi", "dA", "dB"):
            assert getattr(forward, name) == pytest.approx(-getattr(backward, name))


def test_unit_conversions():
    omega0 = DispersionUtils.omega0_from_wavelength(1550.0)
    assert omega0 == pytest.approx(2.0 * math.pi * 299.792458 / 1550.0)
    assert omega0 == pytest.approx(1.2153, abs=1e-4)
    assert omega0 / DispersionUtils.omega0_from_wavelength(3100.0) == pytest.approx(2.0)
    assert DispersionUtils.tau_minus_from_bandwidth(1550.0, 200.0) == pytest.approx(35.50, abs=0.01)
    assert DispersionUtils.coherence_length(1550.0, 200.0) == pytest.approx(12.0125)


@pytest.mark.parametrize("build", [
    lambda: DispersionUtils.omega0_from_wavelength(0.0),
    lambda: DispersionUtils.omega0_from_wavelength(-1550.0),
    lambda: DispersionUtils.tau_minus_from_bandwidth(1550.0, 0.0),
    lambda: DispersionRelation(alpha=float("nan")),
    lambda: Sample(length=-1.0),
    lambda: SourceSpectrum(omega0=1.0, tau_minus=0.0),
    lambda: SourceSpectrum(omega0=-1.0, tau_minus=1.0),
    lambda: DelayConfig(tau=-1.0),
    lambda: DelayConfig(tau1=float("inf")),
])
def test_invalid_inputs_are_rejected(build):
    with pytest.raises(InputDomainError):
        build()


def test_delay_config_axes():
    relaxed = DelayConfig(tau=-5.0, physical=False)
    assert relaxed.tau == -5.0
    moved = DelayConfig(tau1=1.0).with_axis("tau2", 3.0)
    assert (moved.tau1, moved.tau2) == (1.0, 3.0)
    with pytest.raises(InputDomainError):
        DelayConfig().with_axis("tau", -1.0)
    with pytest.raises(ValueError):
        DelayConfig().with_axis("omega", 1.0)


def test_spectrum_lobes():
    spectrum = SourceSpectrum(omega0=1.2, tau_minus=2.0)
    assert spectrum.lobe_width == pytest.approx(math.pi)
    assert spectrum.default_half_width(10) == pytest.approx(10.0 * math.pi)
