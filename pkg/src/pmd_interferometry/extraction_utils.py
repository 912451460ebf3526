# Standard imports
import math
import logging
from dataclasses import dataclass, asdict
from typing import Dict, Any, List, Optional, Tuple
# Local imports
from .dispersion import SPEED_OF_LIGHT_UM_PER_FS
from .errors import InputDomainError, FitDivergenceError
from .logger_utils import LoggerUtils
from .scan_result import ScanResult
from .scan_utils import ScanUtils
from .spectral_utils import SpectralUtils
# Third-party imports
import numpy as np
from scipy import optimize, signal

FLANK_BAND = (0.15, 0.85)
MIN_FLANK_POINTS = 4
MIN_POINTS_PER_FRINGE = 8
ENVELOPE_THRESHOLD = 0.1


@dataclass(frozen=True)
class DipFeature:
    """
    A triangular dip or peak found in a scan.

    Attributes:
        center: Tip position along the scan axis.
        half_width: Half width at half the height of the highest sample.
        excursion: Tip value minus background; negative for dips.
        background: Median of the scan.
        visibility: |excursion| / background when that is at most 1, else None.
        overlapping: Another feature lies closer than 2 tau_minus.
        center_uncertainty: One-sigma error of the center from the flank fits.
        method: "flanks" (line intersection) or "parabola".
    """
    center: float
    half_width: float
    excursion: float
    background: float
    visibility: Optional[float] = None
    overlapping: bool = False
    center_uncertainty: float = 0.0
    method: str = "flanks"

    @property
    def is_dip(self) -> bool:
        return self.excursion < 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class EnvelopeFringeFit:
    """
    Result of fitting offset + amplitude * triangle((x - center)/width) * cos(carrier x + phase).

    Uncertainties are one-sigma values from the fit Jacobian.
    """
    center: float
    width: float
    phase: float
    amplitude: float
    offset: float
    carrier: float
    residual: float
    center_uncertainty: float = 0.0
    phase_uncertainty: float = 0.0

    @property
    def phase_delay(self) -> float:
        """Phase expressed as an axis shift, phase / carrier."""
        return self.phase / self.carrier

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class ExtractionUtils:
    """
    Turns sampled scans into feature positions, widths and fringe phases.
    """

    @staticmethod
    def wrap_phase(phase: float) -> float:
        """Wraps to (-pi, pi]."""
        return float(math.pi - (math.pi - phase) % (2.0 * math.pi))

    @staticmethod
    def _sorted_arrays(scan: ScanResult) -> Tuple[np.ndarray, np.ndarray]:
        x = ScanUtils.validate_grid(scan.delays)
        y = scan.values
        if x.size > 1 and x[1] < x[0]:
            x, y = x[::-1], y[::-1]
        return x, y

    @staticmethod
    def _flank(x: np.ndarray, d: np.ndarray, tip: int, step: int, peak: float) -> np.ndarray:
        """Indices on one side of the tip inside the flank band, d already sign-corrected."""
        lo, hi = FLANK_BAND[0] * peak, FLANK_BAND[1] * peak
        indices = []
        j = tip + step
        while 0 <= j < x.size and d[j] > lo:
            if d[j] <= hi:
                indices.append(j)
            j += step
        return np.asarray(indices, dtype=int)

    @staticmethod
    def _refine_tip(x: np.ndarray, y: np.ndarray, tip: int, sign: float, background: float) -> Tuple[float, float, float, str]:
        """Returns (center, tip value, center uncertainty, method)."""
        d = sign * (y - background)
        peak = d[tip]
        left = ExtractionUtils._flank(x, d, tip, -1, peak)
        right = ExtractionUtils._flank(x, d, tip, 1, peak)
        if left.size >= MIN_FLANK_POINTS and right.size >= MIN_FLANK_POINTS:
            (m1, c1), cov1 = np.polyfit(x[left], y[left], 1, cov=True)
            (m2, c2), cov2 = np.polyfit(x[right], y[right], 1, cov=True)
            if m1 != m2:
                dm = m1 - m2
                center = (c2 - c1) / dm
                # d(center)/d(m1, c1) and d(center)/d(m2, c2)
                g1 = np.array([-(c2 - c1) / dm ** 2, -1.0 / dm])
                g2 = np.array([(c2 - c1) / dm ** 2, 1.0 / dm])
                variance = float(g1 @ cov1 @ g1 + g2 @ cov2 @ g2)
                return float(center), float(m1 * center + c1), math.sqrt(max(variance, 0.0)), "flanks"
        if 0 < tip < x.size - 1:
            a, b, c = np.polyfit(x[tip - 1:tip + 2], y[tip - 1:tip + 2], 2)
            if a != 0:
                center = -b / (2.0 * a)
                if x[tip - 1] <= center <= x[tip + 1]:
                    step = 0.5 * (x[tip + 1] - x[tip - 1])
                    return float(center), float(c - b * b / (4.0 * a)), step / 2.0, "parabola"
        return float(x[tip]), float(y[tip]), float(np.median(np.diff(x))) / 2.0, "parabola"

    @staticmethod
    def _half_width(x: np.ndarray, d: np.ndarray, tip: int, center: float, half: float) -> float:
        """Half width at `half` by linear interpolation on both sides of the tip."""
        sides = []
        for step in (-1, 1):
            j = tip
            while 0 <= j + step < x.size and d[j + step] > half:
                j += step
            k = j + step
            if 0 <= k < x.size and d[j] != d[k]:
                crossing = x[j] + (half - d[j]) * (x[k] - x[j]) / (d[k] - d[j])
                sides.append(abs(crossing - center))
        if not sides:
            return float(np.median(np.abs(np.diff(x))))
        return float(np.mean(sides))

    @staticmethod
    def find_dips(scan: ScanResult, min_prominence: float, tau_minus: Optional[float] = None,
                  logger: Optional[logging.Logger] = None) -> List[DipFeature]:
        """
        Locates dips and peaks standing out from the scan background.

        Candidates are extrema of +/-(y - median) with at least `min_prominence`
        height and prominence. Each tip is refined by intersecting straight
        lines through its two flanks (15-85 % of the excursion, at least four
        points per flank), or by a three-point parabola otherwise. The half
        width is measured at half the height of the highest sample.

        Args:
            scan: Scan to analyze.
            min_prominence: Minimum |y - background| and prominence of a feature.
            tau_minus: Downconversion time for overlap flags; read from the scan metadata if omitted.
            logger: Optional logger instance.

        Returns:
            Features sorted by center; an empty list when none qualifies.

        Raises:
            InputDomainError: If the grid is not strictly monotone or min_prominence <= 0.
        """
        logger = logger or LoggerUtils.get_logger()
        if not min_prominence > 0:
            raise InputDomainError(f"min_prominence must be > 0, got {min_prominence}.")
        x, y = ExtractionUtils._sorted_arrays(scan)
        background = float(np.median(y))
        tau_minus = tau_minus if tau_minus is not None else scan.tau_minus

        features = []
        for sign in (1.0, -1.0):
            d = sign * (y - background)
            tips, _ = signal.find_peaks(d, height=min_prominence, prominence=min_prominence)
            for tip in tips:
                center, tip_value, sigma, method = ExtractionUtils._refine_tip(x, y, int(tip), sign, background)
                excursion = tip_value - background
                # half level from the highest sample
                half_width = ExtractionUtils._half_width(x, d, int(tip), center, 0.5 * float(d[tip]))
                visibility = None
                if background > 0 and abs(excursion) <= background:
                    visibility = abs(excursion) / background
                features.append(DipFeature(center=center, half_width=half_width, excursion=excursion,
                                           background=background, visibility=visibility,
                                           center_uncertainty=sigma, method=method))
        features.sort(key=lambda f: f.center)

        if tau_minus is not None and len(features) > 1:
            flagged = []
            for i, f in enumerate(features):
                close = any(abs(f.center - g.center) < 2.0 * tau_minus for j, g in enumerate(features) if j != i)
                flagged.append(DipFeature(**{**f.to_dict(), "overlapping": close}))
            features = flagged
        for f in features:
            kind = "dip" if f.is_dip else "peak"
            logger.debug(f"[EXTRACTION] {kind} at {f.center:.6g} ({f.method}), excursion {f.excursion:.4g}")
            if f.overlapping:
                logger.warning(f"[EXTRACTION] Feature at {f.center:.6g} overlaps a neighbour")
        logger.info(f"[EXTRACTION] Found {len(features)} features in {scan.axis} scan")
        return features

    @staticmethod
    def carrier_for(scan: ScanResult, omega0: Optional[float] = None) -> float:
        """Fringe carrier along the scan axis: omega0 on delay axes, omega0 / c on the path axis."""
        omega0 = omega0 if omega0 is not None else scan.omega0
        if omega0 is None:
            raise InputDomainError("omega0 is neither given nor recorded in the scan metadata.")
        return omega0 / SPEED_OF_LIGHT_UM_PER_FS if scan.axis == "delta" else omega0

    @staticmethod
    def _design(x: np.ndarray, center: float, width: float, carrier: float) -> np.ndarray:
        envelope = SpectralUtils.triangle((x - center) / width)
        return np.column_stack((np.ones_like(x), envelope * np.cos(carrier * x), envelope * np.sin(carrier * x)))

    @staticmethod
    def _projected_rss(params: np.ndarray, x: np.ndarray, y: np.ndarray, carrier: float) -> float:
        center, width = params
        if width <= 0:
            return float(np.inf)
        design = ExtractionUtils._design(x, center, width, carrier)
        coefs, _, _, _ = np.linalg.lstsq(design, y, rcond=None)
        r = y - design @ coefs
        return float(r @ r)

    @staticmethod
    def fit_envelope_and_fringe(scan: ScanResult, omega0: Optional[float] = None,
                                initial_width: Optional[float] = None, max_relative_residual: float = 0.2,
                                logger: Optional[logging.Logger] = None) -> EnvelopeFringeFit:
        """
        Fits offset + triangle((x - x0)/w) * [A cos(carrier x) + B sin(carrier x)].

        (x0, w) are optimized by Nelder-Mead from the best point of a coarse
        grid; for each trial the linear amplitudes are solved exactly. The
        phase is atan2(-B, A), so the fringe reads cos(carrier x + phase).
        The optimum is polished by least squares over all five parameters
        (offset, amplitude, x0, w, phase), whose Jacobian gives the
        uncertainties.

        Args:
            scan: Scan holding at least one fringe envelope.
            omega0: Center frequency; read from the scan metadata if omitted.
            initial_width: Starting envelope half support; defaults to the measured FWHM.
            max_relative_residual: Largest accepted RMS residual relative to the fringe amplitude.
            logger: Optional logger instance.

        Raises:
            FitDivergenceError: If the optimizer fails, the residual is too large, or the
                center or phase is left unconstrained.
        """
        logger = logger or LoggerUtils.get_logger()
        x, y = ExtractionUtils._sorted_arrays(scan)
        carrier = ExtractionUtils.carrier_for(scan, omega0)
        period = 2.0 * math.pi / carrier
        step = float(np.median(np.diff(x)))
        if period / step < MIN_POINTS_PER_FRINGE:
            logger.warning(f"[EXTRACTION] Only {period / step:.1f} points per fringe; the phase may alias")

        background = float(np.median(y))
        d = np.abs(y - background)
        guess_center = float(x[int(np.argmax(d))])
        if initial_width is None:
            try:
                initial_width = ExtractionUtils.envelope_fwhm(scan)
            except InputDomainError:
                initial_width = 10.0 * period
        initial_width = max(initial_width, 2.0 * step)

        grid = [(c, w) for c in guess_center + period * np.linspace(-1.0, 1.0, 9)
                for w in initial_width * np.array([0.5, 0.75, 1.0, 1.5, 2.0])]
        start = min(grid, key=lambda p: ExtractionUtils._projected_rss(np.array(p), x, y, carrier))
        result = optimize.minimize(ExtractionUtils._projected_rss, np.array(start), args=(x, y, carrier),
                                   method="Nelder-Mead",
                                   options={"xatol": 1e-10 * max(1.0, abs(start[1])), "fatol": 1e-18,
                                            "maxiter": 8000, "maxfev": 16000})
        center, width = (float(v) for v in result.x)
        if not (math.isfinite(center) and math.isfinite(width) and width > 0):
            raise FitDivergenceError("Envelope fit left the valid parameter range.", float(result.fun))

        design = ExtractionUtils._design(x, center, width, carrier)
        (offset, a, b), _, _, _ = np.linalg.lstsq(design, y, rcond=None)
        start = np.array([offset, math.hypot(a, b), center, max(width, step), math.atan2(-b, a)])
        if start[1] == 0:
            raise FitDivergenceError("Envelope fit found no fringe amplitude.", float(result.fun))
        polished = optimize.least_squares(ExtractionUtils._fringe_residuals, start, args=(x, y, carrier),
                                          bounds=([-np.inf, 0.0, -np.inf, 0.5 * step, -np.inf], np.inf),
                                          xtol=1e-14, ftol=1e-14, gtol=1e-14)
        offset, amplitude, center, width, phase = (float(v) for v in polished.x)
        rms = math.sqrt(2.0 * polished.cost / x.size)
        if amplitude == 0 or rms > max_relative_residual * amplitude:
            logger.error(f"[EXTRACTION] Envelope fit residual {rms:.3g} against amplitude {amplitude:.3g}")
            raise FitDivergenceError(f"Envelope fit residual {rms:.3g} exceeds {max_relative_residual} "
                                     f"of the fringe amplitude {amplitude:.3g}.", rms)
        sigma = ExtractionUtils.least_squares_sigma(polished)
        if not (math.isfinite(sigma[2]) and math.isfinite(sigma[4])):
            logger.error("[EXTRACTION] Envelope fit leaves the center or phase unconstrained")
            raise FitDivergenceError("Envelope fit covariance is singular; center or phase is unconstrained.", rms)
        phase = ExtractionUtils.wrap_phase(phase)
        fit = EnvelopeFringeFit(center=center, width=width, phase=phase, amplitude=amplitude, offset=offset,
                                carrier=carrier, residual=rms, center_uncertainty=float(sigma[2]),
                                phase_uncertainty=float(sigma[4]))
        logger.info(f"[EXTRACTION] Envelope at {center:.6g}, width {width:.4g}, phase {phase:.6f} rad")
        return fit

    @staticmethod
    def _fringe_residuals(p: np.ndarray, x: np.ndarray, y: np.ndarray, carrier: float) -> np.ndarray:
        offset, amplitude, center, width, phase = p
        return offset + amplitude * SpectralUtils.triangle((x - center) / width) * np.cos(carrier * x + phase) - y

    @staticmethod
    def least_squares_sigma(result: optimize.OptimizeResult) -> np.ndarray:
        """
        One-sigma parameter errors of a `scipy.optimize.least_squares` result.

        The covariance is s^2 (J^T J)^-1 with s^2 the residual variance. Parameters
        the Jacobian does not constrain (rank deficiency, singular or non-finite
        covariance) get an infinite error.
        """
        jac = np.asarray(result.jac, dtype=float)
        n = jac.shape[1]
        sigma = np.full(n, np.inf)
        if not np.all(np.isfinite(jac)) or np.linalg.matrix_rank(jac) < n:
            return sigma
        dof = max(jac.shape[0] - n, 1)
        try:
            cov = np.linalg.inv(jac.T @ jac) * (2.0 * float(result.cost) / dof)
        except np.linalg.LinAlgError:
            return sigma
        diag = np.diag(cov)
        ok = np.isfinite(diag) & (diag >= 0)
        sigma[ok] = np.sqrt(diag[ok])
        return sigma

    @staticmethod
    def fringe_period(scan: ScanResult, threshold: float = ENVELOPE_THRESHOLD) -> float:
        """
        Fringe period from the zero crossings of y - median inside the envelope.

        Only the stretch where |y - median| exceeds `threshold` of its maximum
        is used; crossing positions are regressed on their index and the
        period is twice the slope.

        Raises:
            InputDomainError: If fewer than three crossings are found.
        """
        x, y = ExtractionUtils._sorted_arrays(scan)
        d = y - np.median(y)
        strong = np.flatnonzero(np.abs(d) >= threshold * np.max(np.abs(d)))
        if strong.size < 2:
            raise InputDomainError("No fringes above the envelope threshold.")
        lo, hi = strong[0], strong[-1]
        xs, ds = x[lo:hi + 1], d[lo:hi + 1]
        crossings = []
        for i in np.flatnonzero(np.signbit(ds[:-1]) != np.signbit(ds[1:])):
            crossings.append(xs[i] - ds[i] * (xs[i + 1] - xs[i]) / (ds[i + 1] - ds[i]))
        if len(crossings) < 3:
            raise InputDomainError(f"Need at least 3 zero crossings to measure a period, found {len(crossings)}.")
        slope, _ = np.polyfit(np.arange(len(crossings)), np.asarray(crossings), 1)
        return float(2.0 * abs(slope))

    @staticmethod
    def envelope_fwhm(scan: ScanResult) -> float:
        """
        Full width at half maximum of the fringe envelope.

        The envelope is sampled at the local maxima of |y - median| and
        interpolated linearly to its half-maximum crossings.

        Raises:
            InputDomainError: If the envelope has fewer than three samples or no half-maximum crossing.
        """
        x, y = ExtractionUtils._sorted_arrays(scan)
        d = np.abs(y - np.median(y))
        tips, _ = signal.find_peaks(d)
        if tips.size < 3:
            raise InputDomainError("Too few fringe maxima to trace an envelope.")
        ex, ey = x[tips], d[tips]
        top = int(np.argmax(ey))
        half = 0.5 * ey[top]
        edges = []
        for step in (-1, 1):
            j = top
            while 0 <= j + step < ex.size and ey[j + step] > half:
                j += step
            k = j + step
            if not 0 <= k < ex.size:
                raise InputDomainError("Envelope does not fall to half maximum inside the scan.")
            edges.append(ex[j] + (half - ey[j]) * (ex[k] - ex[j]) / (ey[k] - ey[j]))
        return float(edges[1] - edges[0])


if __name__ == "__main__":
    # Example usage
    grid = np.linspace(-5.0, 5.0, 201)
    values = 1.0 - SpectralUtils.triangle(grid / 1.0)
    scan = ScanResult("tau1", grid, values, {"spectrum": {"omega0": 1.2153, "tau_minus": 2.0}})
    print(ExtractionUtils.find_dips(scan, 0.1))
