# Standard imports
import math
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Union
# Local imports
from .errors import InputDomainError, QuadratureConvergenceError
from .logger_utils import LoggerUtils
# Third-party imports
import numpy as np
from scipy import special

ArrayLike = Union[float, np.ndarray]

GAUSS_LEGENDRE_ORDER = 24
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_LEGENDRE_ORDER)
DEFAULT_ABS_TOL = 1e-10
DEFAULT_REL_TOL = 1e-8
DEFAULT_MAX_EVALUATIONS = 200_000
DEFAULT_LOBES = 10


@dataclass(frozen=True)
class IntegralSpec:
    """
    An integral over the detuning on the symmetric domain [-half_width, half_width].

    Attributes:
        integrand: Vectorized callable mapping a 1-D array of detunings (rad/fs)
                   to real or complex values of the same shape.
        half_width: Truncation bound X (rad/fs).
        abs_tol: Absolute tolerance of the quadrature.
        rel_tol: Relative tolerance of the quadrature.
        tau_minus: If given, initial panels are aligned to sinc^2 lobes of width
                   2*pi/tau_minus and a truncation tail bound is reported.
        tail_weight: Bound on |integrand / |Phi|^2| used for the tail bound.
        max_evaluations: Integrand evaluation budget.
    """
    integrand: Callable[[np.ndarray], np.ndarray]
    half_width: float
    abs_tol: float = DEFAULT_ABS_TOL
    rel_tol: float = DEFAULT_REL_TOL
    tau_minus: Optional[float] = None
    tail_weight: float = 1.0
    max_evaluations: int = DEFAULT_MAX_EVALUATIONS

    def __post_init__(self):
        if not math.isfinite(self.half_width) or self.half_width <= 0:
            raise InputDomainError(f"half_width must be > 0, got {self.half_width}.")
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise InputDomainError(f"Tolerances must be > 0, got abs_tol={self.abs_tol}, rel_tol={self.rel_tol}.")
        if self.tau_minus is not None and self.tau_minus <= 0:
            raise InputDomainError(f"tau_minus must be > 0, got {self.tau_minus}.")
        if self.max_evaluations <= 0:
            raise InputDomainError(f"max_evaluations must be > 0, got {self.max_evaluations}.")


@dataclass(frozen=True)
class QuadratureResult:
    """
    Outcome of an adaptive quadrature.

    `error` bounds the quadrature error on the truncated domain; `tail_bound`
    bounds what the truncation leaves out and is kept separate.
    """
    value: Union[float, complex]
    error: float
    tail_bound: float
    evaluations: int
    panels: int

    @property
    def total_bound(self) -> float:
        return self.error + self.tail_bound


class SpectralUtils:
    """
    Downconversion spectral function, triangle kernels and the quadrature engine.
    """

    @staticmethod
    def phi(detuning: ArrayLike, tau_minus: float) -> ArrayLike:
        """
        Spectral amplitude Phi(w) = sinc(tau_minus * w / 2) with sinc(x) = sin(x)/x.

        Args:
            detuning: Detuning w (rad/fs).
            tau_minus: Downconversion time (fs).

        Returns:
            Phi(w), even in w with |Phi| <= 1.
        """
        if tau_minus <= 0:
            raise InputDomainError(f"tau_minus must be > 0, got {tau_minus}.")
        # np.sinc is the normalized sinc sin(pi x)/(pi x)
        return np.sinc(0.5 * tau_minus * np.asarray(detuning) / np.pi)

    @staticmethod
    def phi_squared(detuning: ArrayLike, tau_minus: float) -> ArrayLike:
        p = SpectralUtils.phi(detuning, tau_minus)
        return p * p

    @staticmethod
    def triangle(x: ArrayLike) -> ArrayLike:
        """Unit triangle: 1 - |x| for |x| <= 1, else 0."""
        return np.maximum(0.0, 1.0 - np.abs(x))

    @staticmethod
    def _tail_cosine_integral(sigma: ArrayLike, half_width: float) -> ArrayLike:
        """I(sigma) = integral from X to infinity of cos(sigma w)/w^2 dw."""
        s = np.abs(np.asarray(sigma, dtype=float))
        si, _ = special.sici(s * half_width)
        return np.cos(s * half_width) / half_width - s * (0.5 * np.pi - si)

    @staticmethod
    def sinc2_cos_tail(a: float, shift: ArrayLike, half_width: float) -> ArrayLike:
        """
        Exact contribution of |w| > half_width to the integral of sinc^2(a w) cos(w shift).

        Args:
            a: Kernel scale (fs), a > 0.
            shift: Delay (fs), scalar or array.
            half_width: Truncation bound X (rad/fs).

        Returns:
            The two-sided tail integral.
        """
        if a <= 0:
            raise InputDomainError(f"Kernel scale a must be > 0, got {a}.")
        if half_width <= 0:
            raise InputDomainError(f"half_width must be > 0, got {half_width}.")
        s = np.asarray(shift, dtype=float)
        tail_i = SpectralUtils._tail_cosine_integral
        value = (tail_i(s, half_width)
                 - 0.5 * tail_i(2.0 * a + s, half_width)
                 - 0.5 * tail_i(2.0 * a - s, half_width)) / (a * a)
        return value if value.ndim else float(value)

    @staticmethod
    def sinc2_cos_integral(a: float, shift: ArrayLike, half_width: Optional[float] = None) -> ArrayLike:
        """
        Integral of sinc^2(a w) cos(w shift) over w.

        Over the whole real line this is (pi/a) * triangle(shift / (2a)). When
        `half_width` is given the exact value over [-half_width, half_width] is
        returned instead, so closed forms can match truncated quadrature.

        Args:
            a: Kernel scale (fs).
            shift: Delay (fs), scalar or array.
            half_width: Optional truncation bound (rad/fs).

        Raises:
            InputDomainError: If a <= 0.
        """
        if a <= 0:
            raise InputDomainError(f"Kernel scale a must be > 0, got {a}.")
        s = np.asarray(shift, dtype=float)
        value = (np.pi / a) * SpectralUtils.triangle(s / (2.0 * a))
        if half_width is not None:
            value = value - SpectralUtils.sinc2_cos_tail(a, s, half_width)
        value = np.asarray(value)
        return value if value.ndim else float(value)

    @staticmethod
    def kernel(shift: ArrayLike, tau_minus: float, half_width: Optional[float] = None) -> ArrayLike:
        """Integral of |Phi(w)|^2 cos(w shift), i.e. sinc2_cos_integral with a = tau_minus/2."""
        return SpectralUtils.sinc2_cos_integral(0.5 * tau_minus, shift, half_width)

    @staticmethod
    def spectrum_norm(tau_minus: float, half_width: Optional[float] = None) -> float:
        """Integral of |Phi|^2: 2*pi/tau_minus on the real line, less the tail when truncated."""
        return float(SpectralUtils.kernel(0.0, tau_minus, half_width))

    @staticmethod
    def sinc2_tail_bound(tau_minus: float, half_width: float, weight: float = 1.0) -> float:
        """
        Bound on |integral over |w| > X of |Phi|^2 g| for |g| <= weight.

        Uses sinc^2(a w) <= 1/(a w)^2 with a = tau_minus/2.
        """
        if tau_minus <= 0 or half_width <= 0:
            raise InputDomainError("tau_minus and half_width must be > 0.")
        return weight * 8.0 / (tau_minus * tau_minus * half_width)

    @staticmethod
    def initial_panels(half_width: float, tau_minus: Optional[float] = None, panels_per_lobe: int = 1) -> np.ndarray:
        """Panel edges symmetric about zero, aligned to sinc^2 zeros when tau_minus is known."""
        if tau_minus is not None:
            lobes = max(1, int(math.ceil(2.0 * half_width * tau_minus / (2.0 * np.pi) - 1e-9)))
            count = 2 * int(math.ceil(lobes / 2.0)) * panels_per_lobe
        else:
            count = 16 * panels_per_lobe
        return np.linspace(-half_width, half_width, count + 1)

    @staticmethod
    def _panel_sums(integrand: Callable[[np.ndarray], np.ndarray], lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
        values = np.asarray(integrand(nodes.ravel()))
        if values.shape != (nodes.size,):
            values = np.broadcast_to(values, (nodes.size,))
        return half * (values.reshape(nodes.shape) @ _GL_WEIGHTS)

    @staticmethod
    def integrate(spec: IntegralSpec, logger: Optional[logging.Logger] = None) -> QuadratureResult:
        """
        Adaptive Gauss-Legendre quadrature on [-X, X].

        Each active panel is compared against the sum of its two halves; a panel
        is accepted once the difference is below its share of
        max(abs_tol, rel_tol * |estimate|), otherwise its halves become panels.

        Args:
            spec: The integral to evaluate.
            logger: Optional logger instance.

        Returns:
            QuadratureResult with value, quadrature error bound and truncation tail bound.

        Raises:
            QuadratureConvergenceError: If the evaluation budget is exhausted.
        """
        logger = logger or LoggerUtils.get_logger()
        f = spec.integrand
        x_max = spec.half_width
        length = 2.0 * x_max
        n = GAUSS_LEGENDRE_ORDER

        edges = SpectralUtils.initial_panels(x_max, spec.tau_minus)
        lo, hi = edges[:-1], edges[1:]
        whole = SpectralUtils._panel_sums(f, lo, hi)
        evaluations = n * lo.size
        accepted = 0.0 + 0.0j if np.iscomplexobj(whole) else 0.0
        accepted_error = 0.0
        accepted_panels = 0

        while lo.size:
            mid = 0.5 * (lo + hi)
            left = SpectralUtils._panel_sums(f, lo, mid)
            right = SpectralUtils._panel_sums(f, mid, hi)
            evaluations += 2 * n * lo.size
            halves = left + right
            error = np.abs(whole - halves)
            estimate = accepted + halves.sum()
            tolerance = max(spec.abs_tol, spec.rel_tol * abs(estimate))
            ok = error <= tolerance * (hi - lo) / length
            accepted = accepted + halves[ok].sum()
            accepted_error += float(error[ok].sum())
            accepted_panels += int(ok.sum())
            if ok.all():
                break
            pending = ~ok
            if evaluations + 4 * n * int(pending.sum()) > spec.max_evaluations:
                best = accepted + halves[pending].sum()
                bound = accepted_error + float(error[pending].sum())
                logger.error(f"[QUADRATURE] Budget of {spec.max_evaluations} evaluations exhausted, "
                             f"estimate {best:.6g} +/- {bound:.2e}")
                raise QuadratureConvergenceError(
                    f"Quadrature did not converge within {spec.max_evaluations} evaluations",
                    estimate=best, error_bound=bound, evaluations=evaluations
                )
            lo = np.concatenate((lo[pending], mid[pending]))
            hi = np.concatenate((mid[pending], hi[pending]))
            whole = np.concatenate((left[pending], right[pending]))

        value = accepted
        if isinstance(value, complex) or np.iscomplexobj(value):
            value = complex(value)
        else:
            value = float(value)
        tail = 0.0
        if spec.tau_minus is not None:
            tail = SpectralUtils.sinc2_tail_bound(spec.tau_minus, x_max, spec.tail_weight)
        logger.debug(f"[QUADRATURE] {evaluations} evaluations, {accepted_panels} panels, error {accepted_error:.2e}")
        return QuadratureResult(value=value, error=accepted_error, tail_bound=tail,
                                evaluations=evaluations, panels=accepted_panels)

    @staticmethod
    def fixed_rule(integrand: Callable[[np.ndarray], np.ndarray], half_width: float,
                   tau_minus: Optional[float] = None, panels_per_lobe: int = 2) -> Union[float, complex]:
        """
        Composite Gauss-Legendre rule on fixed lobe-aligned panels.

        The node set does not depend on the integrand, so the result is a smooth
        function of any parameter the integrand depends on; fits rely on this.
        """
        edges = SpectralUtils.initial_panels(half_width, tau_minus, panels_per_lobe)
        total = SpectralUtils._panel_sums(integrand, edges[:-1], edges[1:]).sum()
        return complex(total) if np.iscomplexobj(total) else float(total)


if __name__ == "__main__":
    # Example usage
    tau_minus = 1.0
    x_max = DEFAULT_LOBES * 2 * np.pi / tau_minus
    result = SpectralUtils.integrate(IntegralSpec(
        integrand=lambda w: SpectralUtils.phi_squared(w, tau_minus),
        half_width=x_max, tau_minus=tau_minus))
    print(result, 2 * np.pi / tau_minus, SpectralUtils.spectrum_norm(tau_minus, x_max))
