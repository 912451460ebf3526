import math

import pytest

from conftest import OMEGA0, post_sample
from pmd_interferometry import (ClosedFormInapplicableError, DelayConfig, DispersionRelation, ExtractionUtils,
                                InputDomainError, Sample, SourceSpectrum, TypeAConfig, TypeAInterferometer)


def simulator(spectrum, pre=None, post=None, **delays):
    config = TypeAConfig(spectrum=spectrum, sample_pre=pre or Sample(), sample_post=post or post_sample(),
                         delays=DelayConfig(**delays))
    return TypeAInterferometer(config)


def test_forms_agree_and_are_real(spectrum):
    pre = Sample(length=50.0, h=DispersionRelation(alpha=2.0),
                 v=DispersionRelation(k0=0.01, alpha=2.02, beta=1e-4))
    post = post_sample(k0_v=0.002, beta_v=2e-4)
    sim = simulator(spectrum, pre, post, tau1=-3.0, tau2=0.5)
    factorized = sim.modulation(form="factorized")
    cosine = sim.modulation(form="cosine")
    exponential = sim.modulation(form="exponential")
    assert cosine == pytest.approx(factorized, abs=1e-7)
    assert exponential.real == pytest.approx(factorized, abs=1e-7)
    assert abs(exponential.imag) < 1e-8
    with pytest.raises(InputDomainError):
        sim.modulation(form="polar")


def test_even_pre_sample_orders_cancel(spectrum, rng):
    post = post_sample(k0_v=0.002)
    for _ in range(3):
        even_pre = Sample(length=float(rng.uniform(20.0, 100.0)), h=DispersionRelation(),
                          v=DispersionRelation(k0=float(rng.uniform(0.02, 0.08)),
                                               beta=float(rng.uniform(1e-4, 5e-4))))
        delays = {"tau1": -2.5 + float(rng.uniform(-0.2, 0.2)), "tau2": 0.0}
        bare = simulator(spectrum, None, post, **delays).modulation()
        with_pre = simulator(spectrum, even_pre, post, **delays)
        assert with_pre.modulation() == pytest.approx(bare, abs=1e-7)
        # Frequency-correlated light keeps the even orders
        assert abs(with_pre.modulation_correlated() - bare) > 1e-6


def test_correlated_control_matches_for_odd_only_pre_sample(spectrum):
    odd_pre = Sample(length=40.0, h=DispersionRelation(alpha=2.0), v=DispersionRelation(alpha=2.03))
    sim = simulator(spectrum, odd_pre, post_sample(k0_v=0.002), tau1=-3.0)
    assert sim.modulation_correlated() == pytest.approx(sim.modulation(), abs=1e-7)


def test_numeric_matches_closed_form(spectrum, rng):
    peak = 2.0 * math.pi / spectrum.tau_minus
    for _ in range(15):
        pre = Sample(length=float(rng.uniform(0.0, 50.0)), h=DispersionRelation(alpha=2.0),
                     v=DispersionRelation(k0=float(rng.uniform(-0.01, 0.01)),
                                          alpha=2.0 + float(rng.uniform(-0.05, 0.05))))
        post = post_sample(length=float(rng.uniform(20.0, 100.0)), alpha_v=3.0 + float(rng.uniform(-0.05, 0.05)),
                           k0_v=float(rng.uniform(-0.01, 0.01)))
        tau2 = float(rng.uniform(-2.0, 2.0))
        sim = simulator(spectrum, pre, post, tau2=tau2)
        tau1 = sim.dip_center() + float(rng.uniform(-1.0, 1.0))
        delays = DelayConfig(tau1=tau1, tau2=tau2)
        numeric = sim.modulation(delays)
        closed = sim.modulation_linear(delays, half_width=sim.half_width)
        assert numeric == pytest.approx(closed, abs=1e-6 * peak)
        assert sim.rate(delays) == pytest.approx(sim.rate_linear(delays, half_width=sim.half_width), abs=1e-6)


def test_dip_location_law(rng):
    for _ in range(20):
        tau_minus = float(rng.uniform(0.5, 5.0))
        spectrum = SourceSpectrum(omega0=OMEGA0, tau_minus=tau_minus)
        l1, l2 = float(rng.uniform(0.0, 100.0)), float(rng.uniform(20.0, 200.0))
        dalpha = float(rng.uniform(-0.05, 0.05))
        pre = Sample(length=l1, h=DispersionRelation(alpha=3.0), v=DispersionRelation(alpha=3.0 + dalpha))
        post = post_sample(length=l2, alpha_v=3.0 + dalpha, k0_v=float(rng.uniform(-1.0, 1.0)) / l2)
        sim = simulator(spectrum, pre, post)
        expected = -0.5 * dalpha * (2.0 * l1 + l2)
        assert sim.dip_center() == pytest.approx(expected)
        grid = [expected + tau_minus * (-2.0 + 0.005 * i) for i in range(801)]
        features = ExtractionUtils.find_dips(sim.scan("tau1", grid, engine="analytic"), 0.05)
        assert len(features) == 1
        assert features[0].center == pytest.approx(expected, abs=tau_minus / 100.0)
        assert abs(features[0].excursion) == pytest.approx(sim.visibility(), rel=1e-3)


def test_readouts(spectrum):
    sim = simulator(spectrum, post=post_sample(k0_v=0.05), tau1=1.0, tau2=0.3)
    assert sim.total_group_delay == pytest.approx(5.0)
    assert sim.dip_center() == pytest.approx(-2.65)
    assert sim.envelope_center() == pytest.approx(-7.0)
    assert sim.fringe_phase() == pytest.approx(5.0 - 2.0 * math.pi)
    assert sim.visibility() == pytest.approx(abs(math.cos(5.0 + OMEGA0 * 0.3)))


def test_rate_closed_form_values(spectrum):
    sim = simulator(spectrum, post=post_sample(k0_v=0.002))
    at_tip = DelayConfig(tau1=sim.dip_center())
    assert sim.rate_linear(at_tip) == pytest.approx(1.0 + math.cos(0.2))
    assert sim.rate_linear(DelayConfig(tau1=sim.dip_center() + 0.25)) == pytest.approx(1.0 + 0.5 * math.cos(0.2))
    assert sim.rate_linear(DelayConfig(tau1=20.0)) == pytest.approx(1.0)


def test_zero_length_post_sample_is_no_sample(spectrum):
    empty = simulator(spectrum, post=Sample(), tau1=0.2)
    zero = simulator(spectrum, post=post_sample(length=0.0), tau1=0.2)
    assert zero.modulation() == pytest.approx(empty.modulation(), abs=1e-12)
    assert zero.rate_linear() == pytest.approx(empty.rate_linear())


def test_engine_selection(spectrum):
    quadratic = simulator(spectrum, post=post_sample(beta_v=2e-4))
    assert quadratic.resolve_engine("auto") == "numeric"
    with pytest.raises(ClosedFormInapplicableError):
        quadratic.rate(engine="analytic")
    with pytest.raises(ClosedFormInapplicableError):
        quadratic.modulation_linear()
    linear = simulator(spectrum)
    assert linear.resolve_engine("auto") == "analytic"
    with pytest.raises(InputDomainError):
        linear.resolve_engine("fast")


def test_scan_records_settings(spectrum):
    sim = simulator(spectrum, tau2=1.5)
    scan = sim.scan("tau1", [-3.0, -2.0, -1.0], engine="auto")
    metadata = scan.get_metadata()
    assert metadata["mode"] == "type_a"
    assert metadata["engine"] == "analytic"
    assert metadata["delays"]["tau2"] == 1.5
    assert metadata["sample_post"]["v"]["alpha"] == 3.05
    with pytest.raises(InputDomainError):
        sim.scan("tau", [0.0, 1.0])
    with pytest.raises(InputDomainError):
        TypeAConfig(spectrum=spectrum, r0=0.0)
