# Standard imports
import math
import logging
from dataclasses import dataclass, asdict
from typing import Callable, Dict, Any, Optional, Union, List
# Local imports
from .errors import InputDomainError, ClosedFormInapplicableError
from .logger_utils import LoggerUtils
from .scan_result import ScanResult
from .scan_utils import ScanUtils
from .spectral_utils import (SpectralUtils, IntegralSpec, QuadratureResult, DEFAULT_ABS_TOL,
                             DEFAULT_REL_TOL, DEFAULT_MAX_EVALUATIONS, DEFAULT_LOBES)
# Third-party imports
import numpy as np

ENGINES = ("analytic", "numeric", "auto")


@dataclass(frozen=True)
class QuadratureSettings:
    """Truncation and tolerances used by the numerical engine."""
    half_width_lobes: float = DEFAULT_LOBES
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS

    def __post_init__(self):
        if self.half_width_lobes <= 0:
            raise InputDomainError(f"half_width_lobes must be > 0, got {self.half_width_lobes}.")

    def half_width(self, tau_minus: float) -> float:
        return self.half_width_lobes * 2.0 * math.pi / tau_minus

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class Interferometer:
    """
    Shared plumbing of the three simulators: engine choice, quadrature and scans.

    Subclasses set MODE, TAG and AXES and implement `is_linear`,
    `_point_function` and `metadata`.
    """
    MODE = ""
    TAG = ""
    AXES: tuple = ()

    def __init__(self, config: Any, quadrature: Optional[QuadratureSettings] = None,
                 logger: Optional[logging.Logger] = None):
        self.logger = logger if logger else LoggerUtils.get_logger()
        self.config = config
        self.quadrature = quadrature if quadrature else QuadratureSettings()

    @property
    def spectrum(self):
        return self.config.spectrum

    @property
    def half_width(self) -> float:
        return self.quadrature.half_width(self.spectrum.tau_minus)

    @property
    def is_linear(self) -> bool:
        raise NotImplementedError

    def require_linear(self) -> None:
        """Raises ClosedFormInapplicableError unless every beta and gamma vanishes."""
        if not self.is_linear:
            raise ClosedFormInapplicableError(
                f"{self.MODE}: closed form needs beta = gamma = 0 for every polarization of every sample."
            )

    def resolve_engine(self, engine: str) -> str:
        """
        Maps 'auto' to 'analytic' when the closed form applies and to 'numeric' otherwise.

        Raises:
            InputDomainError: On an unknown engine name.
            ClosedFormInapplicableError: If 'analytic' is requested for a non-linear configuration.
        """
        if engine not in ENGINES:
            raise InputDomainError(f"Unknown engine '{engine}', expected one of {ENGINES}.")
        if engine == "auto":
            return "analytic" if self.is_linear else "numeric"
        if engine == "analytic":
            self.require_linear()
        return engine

    def integrate(self, integrand: Callable[[np.ndarray], np.ndarray], weight: float = 1.0) -> QuadratureResult:
        """Integrates over the configured truncated detuning domain."""
        spec = IntegralSpec(
            integrand=integrand,
            half_width=self.half_width,
            abs_tol=self.quadrature.abs_tol,
            rel_tol=self.quadrature.rel_tol,
            tau_minus=self.spectrum.tau_minus,
            tail_weight=weight,
            max_evaluations=self.quadrature.max_evaluations,
        )
        return SpectralUtils.integrate(spec, self.logger)

    def phi_squared(self, detuning: np.ndarray) -> np.ndarray:
        return SpectralUtils.phi_squared(detuning, self.spectrum.tau_minus)

    def _point_function(self, axis: str, engine: str) -> Callable[[float], float]:
        raise NotImplementedError

    def metadata(self) -> Dict[str, Any]:
        raise NotImplementedError

    def _check_axis_grid(self, axis: str, grid: np.ndarray) -> None:
        """Hook for axis-specific grid checks."""

    def scan(self, axis: str, grid: Union[List[float], np.ndarray], engine: str = "numeric",
             threads: int = 1) -> ScanResult:
        """
        Sweeps one delay with every other setting fixed.

        Args:
            axis: Delay to sweep, one of the simulator's AXES.
            grid: Strictly monotone delay values.
            engine: 'numeric', 'analytic' or 'auto'.
            threads: Worker threads for the per-point evaluation.

        Returns:
            ScanResult with the fixed settings recorded as metadata.
        """
        if axis not in self.AXES:
            raise InputDomainError(f"{self.MODE} scans support axes {self.AXES}, got '{axis}'.")
        grid = ScanUtils.validate_grid(grid)
        self._check_axis_grid(axis, grid)
        engine = self.resolve_engine(engine)
        self.logger.info(f"[{self.TAG}] Scanning {axis} over {grid.size} points "
                         f"[{grid.min():.6g}, {grid.max():.6g}] with the {engine} engine")
        values = ScanUtils.map_points(self._point_function(axis, engine), grid, threads, self.logger)
        metadata = self.metadata()
        metadata["engine"] = engine
        metadata["quadrature"] = self.quadrature.to_dict()
        return ScanResult(axis, grid, values, metadata, self.logger)
