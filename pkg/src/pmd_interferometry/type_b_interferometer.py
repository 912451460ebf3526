# Standard imports
import math
import logging
from dataclasses import dataclass, field, asdict
from typing import Callable, Dict, Any, List, Optional, Tuple, Union
# Local imports
from .dispersion import SourceSpectrum, Sample, DelayConfig, DispersionUtils
from .errors import InputDomainError, ConfigurationError, QuadratureConvergenceError
from .interferometer import Interferometer, QuadratureSettings
from .spectral_utils import SpectralUtils, QuadratureResult
# Third-party imports
import numpy as np

# Terms of the linearized modulation, in order, with their sign
TERMS = ("origin", "exchange", "v_delay", "h_delay", "pmd")
TERM_SIGNS = (1.0, None, -1.0, -1.0, 1.0)
# d(argument)/d(axis) of each triangle argument
TERM_SLOPES = {
    "tau1": (2.0, 2.0, 2.0, 2.0, 2.0),
    "tau2": (0.0, 1.0, 2.0, 0.0, 2.0),
    "tau": (0.0, 0.0, 2.0, -2.0, 0.0),
}
# Post-beam-splitter delay cases and the triangle term each one produces
TABLE_CASES = {"c": "origin", "a": "v_delay", "b": "h_delay", "d": "pmd", "exchange": "exchange"}
# Bound on the imaginary residual of the modulation relative to the full-line peak
IMAGINARY_RESIDUAL_LIMIT = 1e-6


@dataclass(frozen=True)
class TypeBConfig:
    """
    Type B setup: a second beam splitter after sample_post, polarizers at 45
    degrees in front of both detectors.
    """
    spectrum: SourceSpectrum
    sample_pre: Sample = field(default_factory=Sample)
    sample_post: Sample = field(default_factory=Sample)
    delays: DelayConfig = field(default_factory=DelayConfig)
    r0: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.r0) and self.r0 > 0):
            raise InputDomainError(f"r0 must be > 0, got {self.r0}.")


@dataclass(frozen=True)
class DipPrediction:
    """
    Expected location of one triangular feature along a scan axis.

    Attributes:
        term: Which triangle of the linearized modulation ("origin", "exchange",
              "v_delay", "h_delay", "pmd").
        axis: Scan axis the center refers to.
        center: Axis value at the triangle tip, None if the term does not move with the axis.
        kind: "modulated" for the exchange term, "plain" otherwise.
        amplitude: Signed excursion from the background at the tip, in units of r0.
        half_width: Half support of the triangle along the axis (fs).
        phase_terms: The two sine arguments of the modulated term at the tip.
        table_case: Post-beam-splitter delay case producing the term.
        overlapping: Another prediction lies closer than 2 tau_minus.
        in_window: Center inside the requested window (True when no window was given).
    """
    term: str
    axis: str
    center: Optional[float]
    kind: str
    amplitude: float
    half_width: Optional[float]
    phase_terms: Dict[str, float] = field(default_factory=dict)
    table_case: str = ""
    overlapping: bool = False
    in_window: bool = True

    @property
    def is_dip(self) -> bool:
        return self.amplitude < 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class DelayTableRow:
    """
    One row of the post-beam-splitter delay bookkeeping.

    tau_v and tau_h are the delays picked up after the beam splitter by the V
    and H photons; the row's feature sits where the pre-splitter delay
    compensates their difference.
    """
    case: str
    description: str
    tau_v: float
    tau_h: float
    delta_tau_pre: float

    @property
    def delta_tau_post(self) -> float:
        return self.tau_v - self.tau_h

    @property
    def mismatch(self) -> float:
        """Zero at the feature: dtau_pre + dtau_post, or 2 dtau_pre + dtau_post for the exchange row."""
        if self.case == "exchange":
            return 2.0 * self.delta_tau_pre + self.delta_tau_post
        return self.delta_tau_pre + self.delta_tau_post


class TypeBInterferometer(Interferometer):
    """
    Coincidence rate R = R0 (1 + C M) of the Type B setup, C = tau_minus / 2 pi.

    M holds five triangular features in the linear regime. Four are plain
    dips or peaks of fixed depth; the exchange term is weighted by
    4 sin(kV0 l2 + Omega0 (tau + tau2)) sin(kH0 l2 + Omega0 tau) and so
    oscillates with the nonbirefringent delay tau.
    """
    MODE = "type_b"
    TAG = "TYPE B"
    AXES = ("tau1", "tau2", "tau")

    def __init__(self, config: TypeBConfig, quadrature: Optional[QuadratureSettings] = None,
                 logger: Optional[logging.Logger] = None):
        super().__init__(config, quadrature, logger)
        self._pre = DispersionUtils.difference(config.sample_pre)

    @property
    def is_linear(self) -> bool:
        return self.config.sample_pre.is_linear and self.config.sample_post.is_linear

    @property
    def normalization(self) -> float:
        return self.spectrum.tau_minus / (2.0 * math.pi)

    def _delays(self, delays: Optional[DelayConfig]) -> DelayConfig:
        return delays if delays is not None else self.config.delays

    def integrand(self, delays: Optional[DelayConfig] = None) -> Callable[[np.ndarray], np.ndarray]:
        """Complex eight-term integrand of M."""
        d = self._delays(delays)
        omega0 = self.spectrum.omega0
        l1, l2 = self.config.sample_pre.length, self.config.sample_post.length
        h, v = self.config.sample_post.h, self.config.sample_post.v
        pre = self._pre
        k = DispersionUtils.wavenumber
        tau, tau2 = d.tau, d.tau2

        def f(w):
            _, odd_pre = DispersionUtils.even_odd_split(pre, w)
            k_hp, k_hm = k(h, w), k(h, -w)
            k_vp, k_vm = k(v, w), k(v, -w)
            prefactor = np.exp(-2j * (w * d.tau1 + odd_pre * l1))
            braces = (1.0
                      - np.exp(-1j * ((k_vp - k_vm) * l2 + 2.0 * w * (tau + tau2)))
                      + np.exp(1j * ((k_hp - k_vp) * l2 - (omega0 + w) * tau2))
                      + np.exp(1j * ((k_vm - k_hm) * l2 + (omega0 - w) * tau2))
                      - np.exp(1j * ((k_hp - k_hm) * l2 + 2.0 * w * tau))
                      - np.exp(1j * ((k_hp + k_vm) * l2 + 2.0 * omega0 * tau + (omega0 - w) * tau2))
                      - np.exp(-1j * ((k_hm + k_vp) * l2 + 2.0 * omega0 * tau + (omega0 + w) * tau2))
                      + np.exp(1j * ((k_hp - k_hm - k_vp + k_vm) * l2 - 2.0 * w * tau2)))
            return self.phi_squared(w) * prefactor * braces
        return f

    def modulation_result(self, delays: Optional[DelayConfig] = None) -> QuadratureResult:
        # Eight unit-modulus terms
        return self.integrate(self.integrand(delays), weight=8.0)

    def modulation_complex(self, delays: Optional[DelayConfig] = None) -> complex:
        """M before taking the real part; its imaginary part vanishes up to quadrature error."""
        return complex(self.modulation_result(delays).value)

    def modulation(self, delays: Optional[DelayConfig] = None) -> float:
        """
        M by quadrature for any dispersion order.

        Raises:
            QuadratureConvergenceError: If the integral does not converge or
                leaves an imaginary part above the residual limit.
        """
        result = self.modulation_result(delays)
        value = complex(result.value)
        limit = max(IMAGINARY_RESIDUAL_LIMIT * 2.0 * math.pi / self.spectrum.tau_minus, 10.0 * result.error)
        if abs(value.imag) > limit:
            self.logger.error(f"[TYPE B] Imaginary residual {value.imag:.3e} above {limit:.1e}")
            raise QuadratureConvergenceError(f"Imaginary residual {value.imag:.3e} of M exceeds {limit:.1e}.",
                                             value, result.error, result.evaluations)
        return value.real

    def _linear_arguments(self, delays: DelayConfig) -> Tuple[Tuple[float, ...], float, Dict[str, float]]:
        """Triangle arguments s1..s5 (fs), the exchange weight and its two sine phases."""
        l2 = self.config.sample_post.length
        h, v = self.config.sample_post.h, self.config.sample_post.v
        omega0 = self.spectrum.omega0
        t = delays.tau1 + DispersionUtils.pmd_delta(self.config.sample_pre).dA
        post_da = DispersionUtils.pmd_delta(self.config.sample_post).dA
        shifts = (
            2.0 * t,
            2.0 * t + post_da + delays.tau2,
            2.0 * (t + v.alpha * l2 + delays.tau + delays.tau2),
            2.0 * (t - h.alpha * l2 - delays.tau),
            2.0 * (t + post_da + delays.tau2),
        )
        phases = {
            "v_phase": v.k0 * l2 + omega0 * (delays.tau + delays.tau2),
            "h_phase": h.k0 * l2 + omega0 * delays.tau,
        }
        weight = 4.0 * math.sin(phases["v_phase"]) * math.sin(phases["h_phase"])
        return shifts, weight, phases

    def modulation_linear(self, delays: Optional[DelayConfig] = None, half_width: Optional[float] = None) -> float:
        """
        Closed form of M for linear samples, five cosine kernels.

        Raises:
            ClosedFormInapplicableError: If any beta or gamma is nonzero.
        """
        self.require_linear()
        shifts, weight, _ = self._linear_arguments(self._delays(delays))
        kernels = [SpectralUtils.kernel(s, self.spectrum.tau_minus, half_width) for s in shifts]
        return kernels[0] + weight * kernels[1] - kernels[2] - kernels[3] + kernels[4]

    def rate(self, delays: Optional[DelayConfig] = None, engine: str = "numeric") -> float:
        engine = self.resolve_engine(engine)
        if engine == "analytic":
            return self.rate_linear(delays)
        return self.config.r0 * (1.0 + self.normalization * self.modulation(delays))

    def rate_linear(self, delays: Optional[DelayConfig] = None, half_width: Optional[float] = None) -> float:
        """
        R0 {1 + L(s1) + w L(s2) - L(s3) - L(s4) + L(s5)}, L(s) = triangle(s / tau_minus).

        Raises:
            ClosedFormInapplicableError: If any beta or gamma is nonzero.
        """
        return self.config.r0 * (1.0 + self.normalization * self.modulation_linear(delays, half_width))

    def postponed_delay_rate(self, delays: Optional[DelayConfig] = None) -> float:
        """
        Rate with nothing before the first beam splitter (l1 = 0, tau1 = 0).

        R0 {2 + w L((dA + tau2)/tau_minus) - L(2(alphaV l2 + tau + tau2)/tau_minus)
            - L(2(alphaH l2 + tau)/tau_minus) + L(2(dA + tau2)/tau_minus)}

        Raises:
            ConfigurationError: If sample_pre has nonzero length or tau1 != 0.
            ClosedFormInapplicableError: If any beta or gamma is nonzero.
        """
        d = self._delays(delays)
        if self.config.sample_pre.length != 0.0:
            raise ConfigurationError("Postponed-delay form needs no sample before the first beam splitter.",
                                     "sample_pre.length")
        if d.tau1 != 0.0:
            raise ConfigurationError("Postponed-delay form needs tau1 = 0.", "delays.tau1")
        self.require_linear()
        tau_minus = self.spectrum.tau_minus
        l2 = self.config.sample_post.length
        h, v = self.config.sample_post.h, self.config.sample_post.v
        da = DispersionUtils.pmd_delta(self.config.sample_post).dA
        _, weight, _ = self._linear_arguments(d)
        tri = SpectralUtils.triangle
        return self.config.r0 * (2.0
                                 + weight * tri((da + d.tau2) / tau_minus)
                                 - tri(2.0 * (v.alpha * l2 + d.tau + d.tau2) / tau_minus)
                                 - tri(2.0 * (h.alpha * l2 + d.tau) / tau_minus)
                                 + tri(2.0 * (da + d.tau2) / tau_minus))

    def modulated_fringe(self, tau_grid: Union[List[float], np.ndarray]) -> np.ndarray:
        """
        Contribution of the exchange term to R / R0 along tau, other delays fixed.

        At tau2 = -dalpha l2 (l1 = tau1 = 0) the triangle is at its tip and the
        curve is the bare 4 sin sin fringe, from which kH0 and kV0 can be fitted.
        """
        values = []
        for tau in np.asarray(tau_grid, dtype=float):
            d = self.config.delays.with_axis("tau", tau)
            shifts, weight, _ = self._linear_arguments(d)
            values.append(weight * SpectralUtils.triangle(shifts[1] / self.spectrum.tau_minus))
        return np.asarray(values) * self.config.r0

    def predict_dips(self, axis: str = "tau1", window: Optional[Tuple[float, float]] = None,
                     delays: Optional[DelayConfig] = None) -> List[DipPrediction]:
        """
        Centers of the five features along `axis`, solving each triangle argument for zero.

        The other delays are held at their configured values. Only the k0 and
        alpha coefficients enter; higher orders broaden but do not move features.

        Args:
            axis: "tau1", "tau2" or "tau".
            window: Optional (low, high) axis range for the in_window flag.
            delays: Delays to use instead of the configured ones.

        Returns:
            Five predictions in term order.
        """
        if axis not in TERM_SLOPES:
            raise InputDomainError(f"Unknown axis '{axis}', expected one of {tuple(TERM_SLOPES)}.")
        d = self._delays(delays)
        tau_minus = self.spectrum.tau_minus
        current = getattr(d, axis)
        shifts, _, _ = self._linear_arguments(d)
        case_of = {term: case for case, term in TABLE_CASES.items()}

        centers: List[Optional[float]] = []
        for shift, slope in zip(shifts, TERM_SLOPES[axis]):
            centers.append(None if slope == 0.0 else current - shift / slope)

        predictions = []
        for i, term in enumerate(TERMS):
            center, slope = centers[i], TERM_SLOPES[axis][i]
            phases: Dict[str, float] = {}
            if term == "exchange":
                at_tip = d if center is None else DelayConfig(**{**asdict(d), axis: center, "physical": False})
                _, amplitude, phases = self._linear_arguments(at_tip)
            else:
                amplitude = TERM_SIGNS[i]
            overlapping = center is not None and any(
                other is not None and j != i and abs(other - center) < 2.0 * tau_minus
                for j, other in enumerate(centers)
            )
            in_window = True
            if window is not None:
                in_window = center is not None and window[0] <= center <= window[1]
            predictions.append(DipPrediction(
                term=term, axis=axis, center=center,
                kind="modulated" if term == "exchange" else "plain",
                amplitude=float(amplitude) * self.config.r0,
                half_width=None if slope == 0.0 else tau_minus / abs(slope),
                phase_terms=phases, table_case=case_of[term],
                overlapping=overlapping, in_window=in_window,
            ))
        for p in predictions:
            if p.overlapping and p.in_window:
                self.logger.warning(f"[TYPE B] Predicted {p.term} feature at {p.center:.4g} fs overlaps another feature")
        return predictions

    def delay_table(self, delays: Optional[DelayConfig] = None) -> List[DelayTableRow]:
        """
        Delays after the beam splitter for the four ways a pair can reach the detectors.

        (a) V photon delayed, (b) H photon delayed, (c) neither, (d) both; the
        exchange row pairs (c) with (d) and carries the interference fringe.
        """
        d = self._delays(delays)
        l2 = self.config.sample_post.length
        h, v = self.config.sample_post.h, self.config.sample_post.v
        delta_pre = DispersionUtils.pmd_delta(self.config.sample_pre).dA + d.tau1
        v_delay = v.alpha * l2 + d.tau + d.tau2
        h_delay = h.alpha * l2 + d.tau
        return [
            DelayTableRow("a", "V photon delayed after the beam splitter", v_delay, 0.0, delta_pre),
            DelayTableRow("b", "H photon delayed after the beam splitter", 0.0, h_delay, delta_pre),
            DelayTableRow("c", "neither photon delayed", 0.0, 0.0, delta_pre),
            DelayTableRow("d", "both photons delayed", v_delay, h_delay, delta_pre),
            DelayTableRow("exchange", "interference of (c) with (d)", v_delay, h_delay, delta_pre),
        ]

    def predict_dips_from_table(self, axis: str = "tau1", delays: Optional[DelayConfig] = None) -> Dict[str, Optional[float]]:
        """
        Feature centers from the delay table, solved on `axis` by finite differences.

        Returns:
            Mapping of term name to center, None where the mismatch does not depend on the axis.
        """
        if axis not in TERM_SLOPES:
            raise InputDomainError(f"Unknown axis '{axis}', expected one of {tuple(TERM_SLOPES)}.")
        d = self._delays(delays)
        x0 = getattr(d, axis)
        moved = DelayConfig(**{**asdict(d), axis: x0 + 1.0, "physical": False})
        rows0 = {row.case: row.mismatch for row in self.delay_table(d)}
        rows1 = {row.case: row.mismatch for row in self.delay_table(moved)}
        centers: Dict[str, Optional[float]] = {}
        for case, term in TABLE_CASES.items():
            slope = rows1[case] - rows0[case]
            centers[term] = None if abs(slope) < 1e-12 else x0 - rows0[case] / slope
        return centers

    def _check_axis_grid(self, axis: str, grid: np.ndarray) -> None:
        if axis == "tau" and self.config.delays.physical and np.any(grid < 0):
            raise InputDomainError("tau scans must stay >= 0 in physical mode; set delays.physical = false "
                                   "to scan negative tau.")

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


class PostponedDelayInterferometer(TypeBInterferometer):
    """
    Type B with nothing before the first beam splitter, scanned along tau.

    Raises ConfigurationError at construction if l1 or tau1 is nonzero.
    """
    MODE = "type_b_postponed"
    AXES = ("tau2", "tau")

    def __init__(self, config: TypeBConfig, quadrature: Optional[QuadratureSettings] = None,
                 logger: Optional[logging.Logger] = None):
        if config.sample_pre.length != 0.0:
            raise ConfigurationError("Postponed-delay mode needs sample_pre.length = 0.", "sample_pre.length")
        if config.delays.tau1 != 0.0:
            raise ConfigurationError("Postponed-delay mode needs tau1 = 0.", "delays.tau1")
        super().__init__(config, quadrature, logger)

    def _point_function(self, axis: str, engine: str) -> Callable[[float], float]:
        base = self.config.delays
        if engine == "analytic":
            return lambda x: self.postponed_delay_rate(base.with_axis(axis, x))
        return super()._point_function(axis, engine)


if __name__ == "__main__":
    # Example usage
    from .dispersion import DispersionRelation
    spectrum = SourceSpectrum(omega0=DispersionUtils.omega0_from_wavelength(1550.0), tau_minus=1.0)
    post = Sample(length=100.0, h=DispersionRelation(alpha=3.0), v=DispersionRelation(alpha=3.05))
    simulator = TypeBInterferometer(TypeBConfig(spectrum=spectrum, sample_post=post,
                                                delays=DelayConfig(tau2=1000.0)))
    for prediction in simulator.predict_dips("tau1", window=(-400.0, 400.0)):
        print(prediction)
