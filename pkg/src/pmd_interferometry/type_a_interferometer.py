# Standard imports
import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Any, Optional, Union
# Local imports
from .dispersion import SourceSpectrum, Sample, DelayConfig, DispersionUtils
from .errors import InputDomainError
from .interferometer import Interferometer, QuadratureSettings
from .spectral_utils import SpectralUtils, QuadratureResult
# Third-party imports
import numpy as np

MODULATION_FORMS = ("factorized", "cosine", "exponential")


@dataclass(frozen=True)
class TypeAConfig:
    """
    Type A coincidence setup: sample_pre (length l1) before the beam splitter,
    sample_post (length l2) after it, polarizers at 45 degrees.
    """
    spectrum: SourceSpectrum
    sample_pre: Sample = field(default_factory=Sample)
    sample_post: Sample = field(default_factory=Sample)
    delays: DelayConfig = field(default_factory=DelayConfig)
    r0: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.r0) and self.r0 > 0):
            raise InputDomainError(f"r0 must be > 0, got {self.r0}.")


class TypeAInterferometer(Interferometer):
    """
    Coincidence rate R = R0 (1 + C M(tau1, tau2)) of the Type A setup, C = tau_minus / 2 pi.

    The modulation M can be evaluated in three equivalent numerical forms:
    the complex two-exponential form, the single cosine form, and the form
    factorized into an odd-order and an even-order cosine. In the factorized
    form, even orders of the pre-splitter sample drop out.
    """
    MODE = "type_a"
    TAG = "TYPE A"
    AXES = ("tau1", "tau2")

    def __init__(self, config: TypeAConfig, quadrature: Optional[QuadratureSettings] = None,
                 logger: Optional[logging.Logger] = None):
        super().__init__(config, quadrature, logger)
        self._pre = DispersionUtils.difference(config.sample_pre)
        self._post = DispersionUtils.difference(config.sample_post)

    @property
    def is_linear(self) -> bool:
        return self.config.sample_pre.is_linear and self.config.sample_post.is_linear

    @property
    def normalization(self) -> float:
        """C = tau_minus / (2 pi), the inverse of the full-line integral of |Phi|^2."""
        return self.spectrum.tau_minus / (2.0 * math.pi)

    def _delays(self, delays: Optional[DelayConfig]) -> DelayConfig:
        return delays if delays is not None else self.config.delays

    @property
    def total_group_delay(self) -> float:
        """2 l1 dalpha_pre + l2 dalpha_post (fs)."""
        return (2.0 * DispersionUtils.pmd_delta(self.config.sample_pre).dA
                + DispersionUtils.pmd_delta(self.config.sample_post).dA)

    def integrand(self, delays: Optional[DelayConfig] = None, form: str = "factorized") -> Callable[[np.ndarray], np.ndarray]:
        """Integrand of M in the requested form."""
        d = self._delays(delays)
        omega0 = self.spectrum.omega0
        l1, l2 = self.config.sample_pre.length, self.config.sample_post.length
        pre, post = self._pre, self._post
        k = DispersionUtils.wavenumber

        if form == "factorized":
            def f(w):
                _, odd_pre = DispersionUtils.even_odd_split(pre, w)
                even_post, odd_post = DispersionUtils.even_odd_split(post, w)
                odd = 2.0 * odd_pre * l1 + odd_post * l2 + w * (2.0 * d.tau1 + d.tau2)
                even = even_post * l2 + omega0 * d.tau2
                return self.phi_squared(w) * np.cos(odd) * np.cos(even)
        elif form == "cosine":
            def f(w):
                phase = (k(pre, w) - k(pre, -w)) * l1 + k(post, w) * l2 + 2.0 * w * d.tau1 + (omega0 + w) * d.tau2
                return self.phi_squared(w) * np.cos(phase)
        elif form == "exponential":
            def f(w):
                pre_phase = (k(pre, w) - k(pre, -w)) * l1 + 2.0 * w * d.tau1
                first = np.exp(1j * (k(post, -w) * l2 + (omega0 - w) * d.tau2))
                second = np.exp(-1j * (k(post, w) * l2 + (omega0 + w) * d.tau2))
                return 0.5 * self.phi_squared(w) * np.exp(-1j * pre_phase) * (first + second)
        else:
            raise InputDomainError(f"Unknown modulation form '{form}', expected one of {MODULATION_FORMS}.")
        return f

    def modulation_result(self, delays: Optional[DelayConfig] = None, form: str = "factorized") -> QuadratureResult:
        return self.integrate(self.integrand(delays, form))

    def modulation(self, delays: Optional[DelayConfig] = None, form: str = "factorized") -> Union[float, complex]:
        """
        M(tau1, tau2) by quadrature; any dispersion order is allowed.

        Args:
            delays: Delays to use instead of the configured ones.
            form: 'factorized' (default), 'cosine', or 'exponential'. The last
                  returns the complex value whose imaginary part vanishes.

        Raises:
            QuadratureConvergenceError: If the integral does not converge.
        """
        return self.modulation_result(delays, form).value

    def modulation_correlated(self, delays: Optional[DelayConfig] = None) -> float:
        """
        Negative control with both photons at Omega0 + w (frequency-correlated light).

        The pre-splitter phase becomes 2 dk_pre(w) l1, so even orders of the
        pre-splitter sample no longer cancel.
        """
        d = self._delays(delays)
        omega0 = self.spectrum.omega0
        l1, l2 = self.config.sample_pre.length, self.config.sample_post.length
        pre, post = self._pre, self._post
        k = DispersionUtils.wavenumber

        def f(w):
            phase = 2.0 * k(pre, w) * l1 + k(post, w) * l2 + 2.0 * w * d.tau1 + (omega0 + w) * d.tau2
            return self.phi_squared(w) * np.cos(phase)
        return self.integrate(f).value

    def modulation_linear(self, delays: Optional[DelayConfig] = None, half_width: Optional[float] = None) -> float:
        """
        Closed form of M for linear samples.

        M = cos(dk0_post l2 + Omega0 tau2) K(dA_total + 2 tau1 + tau2), with K
        the |Phi|^2 cosine kernel, (2 pi / tau_minus) triangle(s / tau_minus) on
        the full line or its truncated value when `half_width` is given.

        Raises:
            ClosedFormInapplicableError: If any beta or gamma is nonzero.
        """
        self.require_linear()
        d = self._delays(delays)
        l2 = self.config.sample_post.length
        shift = self.total_group_delay + 2.0 * d.tau1 + d.tau2
        kernel = SpectralUtils.kernel(shift, self.spectrum.tau_minus, half_width)
        return math.cos(self._post.k0 * l2 + self.spectrum.omega0 * d.tau2) * kernel

    def rate(self, delays: Optional[DelayConfig] = None, engine: str = "numeric") -> float:
        """Coincidence rate R / R0 scaled by r0, by quadrature or closed form."""
        engine = self.resolve_engine(engine)
        if engine == "analytic":
            return self.rate_linear(delays)
        return self.config.r0 * (1.0 + self.normalization * self.modulation(delays))

    def rate_linear(self, delays: Optional[DelayConfig] = None, half_width: Optional[float] = None) -> float:
        """
        R0 {1 + cos(dk0 l2 + Omega0 tau2) triangle((dA_total + 2 tau1 + tau2) / tau_minus)}.

        Raises:
            ClosedFormInapplicableError: If any beta or gamma is nonzero.
        """
        return self.config.r0 * (1.0 + self.normalization * self.modulation_linear(delays, half_width))

    def rate_correlated(self, delays: Optional[DelayConfig] = None) -> float:
        return self.config.r0 * (1.0 + self.normalization * self.modulation_correlated(delays))

    def dip_center(self, tau2: Optional[float] = None) -> float:
        """tau1 at the bottom (or top) of the triangle: -(dA_total + tau2) / 2."""
        tau2 = self.config.delays.tau2 if tau2 is None else tau2
        return -0.5 * (self.total_group_delay + tau2)

    def envelope_center(self, tau1: Optional[float] = None) -> float:
        """tau2 at the center of the fringe envelope: -(dA_total + 2 tau1)."""
        tau1 = self.config.delays.tau1 if tau1 is None else tau1
        return -(self.total_group_delay + 2.0 * tau1)

    def fringe_phase(self) -> float:
        """Phase offset dk0_post l2 of the tau2 fringes, wrapped to (-pi, pi]."""
        phase = self._post.k0 * self.config.sample_post.length
        return float(math.pi - (math.pi - phase) % (2.0 * math.pi))

    def visibility(self, tau2: Optional[float] = None) -> float:
        """|cos(dk0 l2 + Omega0 tau2)|, the depth of the tau1 dip in the linear regime."""
        tau2 = self.config.delays.tau2 if tau2 is None else tau2
        return abs(math.cos(self._post.k0 * self.config.sample_post.length + self.spectrum.omega0 * tau2))

    def _point_function(self, axis: str, engine: str) -> Callable[[float], float]:
        base = self.config.delays
        if engine == "analytic":
            return lambda x: self.rate_linear(base.with_axis(axis, x))
        return lambda x: self.rate(base.with_axis(axis, x), engine="numeric")

    def metadata(self) -> Dict[str, Any]:
        return {
            "mode": self.MODE,
            "r0": self.config.r0,
            "spectrum": self.spectrum.to_dict(),
            "sample_pre": self.config.sample_pre.to_dict(),
            "sample_post": self.config.sample_post.to_dict(),
            "delays": self.config.delays.to_dict(),
        }


if __name__ == "__main__":
    # Example usage
    from .dispersion import DispersionRelation
    spectrum = SourceSpectrum(omega0=DispersionUtils.omega0_from_wavelength(1550.0), tau_minus=1.0)
    post = Sample(length=100.0, h=DispersionRelation(alpha=3.0), v=DispersionRelation(alpha=3.05, k0=0.002))
    simulator = TypeAInterferometer(TypeAConfig(spectrum=spectrum, sample_post=post))
    print(simulator.dip_center(), simulator.rate(), simulator.rate_linear())
