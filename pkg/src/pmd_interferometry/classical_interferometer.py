# Standard imports
import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Any, Optional, Tuple
# Local imports
from .dispersion import (SourceSpectrum, Sample, DispersionUtils, SPEED_OF_LIGHT_UM_PER_FS,
                         _check_finite)
from .errors import InputDomainError
from .interferometer import Interferometer, QuadratureSettings
from .scan_result import ScanResult
from .scan_utils import ScanUtils
from .spectral_utils import SpectralUtils
# Third-party imports
import numpy as np


@dataclass(frozen=True)
class ClassicalConfig:
    """
    White-light interferometer with a 45 degree analyzer.

    Attributes:
        spectrum: Source spectrum; |A_H(w)| is taken proportional to Phi(w).
        sample: Sample after the second beam splitter.
        path_diff: Arm length difference d1 - d2 (um).
        scan: Path delays delta (um) to sweep; strictly monotone when given.
    """
    spectrum: SourceSpectrum
    sample: Sample = field(default_factory=Sample)
    path_diff: float = 0.0
    scan: Tuple[float, ...] = ()

    def __post_init__(self):
        _check_finite("ClassicalConfig", {"path_diff": self.path_diff})
        object.__setattr__(self, "scan", tuple(float(x) for x in self.scan))
        if self.scan:
            ScanUtils.validate_grid(self.scan)


class ClassicalInterferometer(Interferometer):
    """
    Single-detector interferogram I(delta) over a birefringent sample.

    I(delta) = 1 + [integral of |Phi|^2 cos((Omega0 + w)(d - delta)/c - dk(w) l)] / [integral of |Phi|^2]

    where both integrals run over the same truncated domain, so the
    no-sample fringe at delta = d peaks at exactly 2.
    """
    MODE = "classical"
    TAG = "CLASSICAL"
    AXES = ("delta",)

    def __init__(self, config: ClassicalConfig, quadrature: Optional[QuadratureSettings] = None,
                 logger: Optional[logging.Logger] = None):
        super().__init__(config, quadrature, logger)
        self._difference = DispersionUtils.difference(config.sample)
        self._norm: Optional[float] = None

    @property
    def is_linear(self) -> bool:
        return self.config.sample.is_linear

    @property
    def norm(self) -> float:
        """Numerically integrated |Phi|^2 on the truncated domain."""
        if self._norm is None:
            self._norm = self.integrate(self.phi_squared).value
        return self._norm

    def integrand(self, delta: float) -> Callable[[np.ndarray], np.ndarray]:
        omega0 = self.spectrum.omega0
        y = (self.config.path_diff - delta) / SPEED_OF_LIGHT_UM_PER_FS
        length = self.config.sample.length
        diff = self._difference

        def f(w: np.ndarray) -> np.ndarray:
            phase = (omega0 + w) * y - DispersionUtils.wavenumber(diff, w) * length
            return self.phi_squared(w) * np.cos(phase)
        return f

    def intensity(self, delta: float) -> float:
        """
        Detector intensity at path delay `delta` (um) by quadrature.

        Raises:
            QuadratureConvergenceError: If the integral does not converge.
        """
        result = self.integrate(self.integrand(delta))
        return 1.0 + result.value / self.norm

    def intensity_linear(self, delta: float, half_width: Optional[float] = None) -> float:
        """
        Closed form for a linear sample: 1 + cos(Omega0 y/c - dk0 l) K(y/c - dA) / K(0).

        K is the |Phi|^2 cosine kernel, truncated at `half_width` when given,
        otherwise on the whole line.
        """
        self.require_linear()
        tau_minus = self.spectrum.tau_minus
        delta_pmd = DispersionUtils.pmd_delta(self.config.sample)
        y = (self.config.path_diff - delta) / SPEED_OF_LIGHT_UM_PER_FS
        kernel = SpectralUtils.kernel(y - delta_pmd.dA, tau_minus, half_width)
        norm = SpectralUtils.spectrum_norm(tau_minus, half_width)
        return 1.0 + math.cos(self.spectrum.omega0 * y - delta_pmd.dphi) * kernel / norm

    def envelope_center(self) -> float:
        """Delay delta - d (um) at which the fringe envelope peaks: -c dalpha l."""
        return -SPEED_OF_LIGHT_UM_PER_FS * DispersionUtils.pmd_delta(self.config.sample).dA

    def fringe_period(self) -> float:
        """Fringe period in delta (um): 2 pi c / Omega0."""
        return 2.0 * math.pi * SPEED_OF_LIGHT_UM_PER_FS / self.spectrum.omega0

    def _point_function(self, axis: str, engine: str) -> Callable[[float], float]:
        if engine == "analytic":
            return self.intensity_linear
        # norm is filled before worker threads start
        _ = self.norm
        return self.intensity

    def metadata(self) -> Dict[str, Any]:
        return {
            "mode": self.MODE,
            "spectrum": self.spectrum.to_dict(),
            "sample_post": self.config.sample.to_dict(),
            "classical": {"path_diff": self.config.path_diff},
        }

    def scan(self, axis: str = "delta", grid=None, engine: str = "numeric", threads: int = 1) -> ScanResult:
        """
        Interferogram over `grid`, defaulting to the configured delta values.

        Raises:
            InputDomainError: If no grid is given and the config has none.
        """
        if grid is None:
            if not self.config.scan:
                raise InputDomainError("ClassicalConfig.scan is empty and no grid was given.")
            grid = self.config.scan
        return super().scan(axis, grid, engine, threads)


if __name__ == "__main__":
    # Example usage
    spectrum = SourceSpectrum(omega0=DispersionUtils.omega0_from_wavelength(1550.0),
                              tau_minus=DispersionUtils.tau_minus_from_bandwidth(1550.0, 200.0))
    simulator = ClassicalInterferometer(ClassicalConfig(spectrum=spectrum))
    print(simulator.intensity(0.0), simulator.intensity_linear(0.0))
