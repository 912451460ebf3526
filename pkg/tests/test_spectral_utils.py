import math

import numpy as np
import pytest

from pmd_interferometry import InputDomainError, IntegralSpec, QuadratureConvergenceError, SpectralUtils


def test_phi_values():
    assert SpectralUtils.phi(0.0, 1.0) == pytest.approx(1.0)
    assert SpectralUtils.phi(2.0 * math.pi, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert SpectralUtils.phi(1.0, 2.0) == pytest.approx(math.sin(1.0))
    w = np.linspace(-20.0, 20.0, 101)
    np.testing.assert_allclose(SpectralUtils.phi(w, 1.3), SpectralUtils.phi(-w, 1.3))
    assert np.all(np.abs(SpectralUtils.phi(w, 1.3)) <= 1.0)
    with pytest.raises(InputDomainError):
        SpectralUtils.phi(1.0, 0.0)


@pytest.mark.parametrize("x, expected", [(0.0, 1.0), (0.5, 0.5), (-0.5, 0.5), (1.0, 0.0), (1.5, 0.0)])
def test_triangle(x, expected):
    assert SpectralUtils.triangle(x) == pytest.approx(expected)


def test_sinc2_cos_integral_on_the_whole_line():
    assert SpectralUtils.sinc2_cos_integral(1.0, 0.0) == pytest.approx(math.pi)
    assert SpectralUtils.sinc2_cos_integral(1.0, 2.0) == pytest.approx(0.0)
    assert SpectralUtils.sinc2_cos_integral(1.0, 1.0) == pytest.approx(0.5 * math.pi)
    assert SpectralUtils.spectrum_norm(0.5) == pytest.approx(4.0 * math.pi)
    with pytest.raises(InputDomainError):
        SpectralUtils.sinc2_cos_integral(0.0, 1.0)


@pytest.mark.parametrize("shift", [0.0, 0.3, 1.7, 5.0, -2.2])
def test_truncated_kernel_matches_quadrature(shift):
    tau_minus = 1.0
    half_width = 10 * 2.0 * math.pi / tau_minus
    result = SpectralUtils.integrate(IntegralSpec(
        integrand=lambda w: SpectralUtils.phi_squared(w, tau_minus) * np.cos(w * shift),
        half_width=half_width, tau_minus=tau_minus))
    truncated = SpectralUtils.kernel(shift, tau_minus, half_width)
    assert result.value == pytest.approx(truncated, abs=1e-8)
    full = SpectralUtils.kernel(shift, tau_minus)
    assert abs(full - truncated) <= result.tail_bound


def test_norm_is_full_line_value_less_the_tail():
    tau_minus = 2.0
    half_width = 5 * 2.0 * math.pi / tau_minus
    tail = SpectralUtils.sinc2_cos_tail(0.5 * tau_minus, 0.0, half_width)
    assert tail > 0
    assert SpectralUtils.spectrum_norm(tau_minus, half_width) == pytest.approx(2.0 * math.pi / tau_minus - tail)
    assert tail <= SpectralUtils.sinc2_tail_bound(tau_minus, half_width)


def test_complex_integrand_has_vanishing_imaginary_part():
    tau_minus, shift = 1.0, 0.8
    half_width = 8 * 2.0 * math.pi
    result = SpectralUtils.integrate(IntegralSpec(
        integrand=lambda w: SpectralUtils.phi_squared(w, tau_minus) * np.exp(1j * w * shift),
        half_width=half_width, tau_minus=tau_minus))
    assert isinstance(result.value, complex)
    assert result.value.real == pytest.approx(SpectralUtils.kernel(shift, tau_minus, half_width), abs=1e-8)
    assert abs(result.value.imag) < 1e-10


def test_fixed_rule_agrees_with_adaptive_rule():
    tau_minus = 1.0
    half_width = 10 * 2.0 * math.pi
    value = SpectralUtils.fixed_rule(lambda w: SpectralUtils.phi_squared(w, tau_minus), half_width, tau_minus)
    assert value == pytest.approx(SpectralUtils.spectrum_norm(tau_minus, half_width), rel=1e-8)


def test_budget_exhaustion_reports_best_estimate():
    spec = IntegralSpec(integrand=lambda w: SpectralUtils.phi_squared(w, 1.0) * np.cos(500.0 * w),
                        half_width=20 * math.pi, tau_minus=1.0, max_evaluations=100)
    with pytest.raises(QuadratureConvergenceError) as excinfo:
        SpectralUtils.integrate(spec)
    assert excinfo.value.evaluations > 0
    assert excinfo.value.error_bound >= 0
    assert excinfo.value.scan_point is None


@pytest.mark.parametrize("kwargs", [
    {"half_width": 0.0},
    {"half_width": 1.0, "abs_tol": 0.0},
    {"half_width": 1.0, "tau_minus": -1.0},
    {"half_width": 1.0, "max_evaluations": 0},
])
def test_integral_spec_validation(kwargs):
    with pytest.raises(InputDomainError):
        IntegralSpec(integrand=lambda w: w, **kwargs)


def test_initial_panels_are_symmetric_and_lobe_aligned():
    edges = SpectralUtils.initial_panels(10 * 2.0 * math.pi, 1.0)
    np.testing.assert_allclose(edges, -edges[::-1])
    assert len(edges) - 1 == 20
