# Standard imports
import math
import logging
from dataclasses import dataclass, fields, replace
from typing import List, Optional, Sequence, Tuple, Union
# Local imports
from .dispersion import DispersionRelation
from .errors import ConfigurationError, ConsistencyError, FitDivergenceError, PairingError, ProtocolError
from .extraction_utils import DipFeature, ExtractionUtils
from .logger_utils import LoggerUtils
from .recovery_report import BranchSet, RecoveryReport
from .scan_result import ScanResult
from .spectral_utils import SpectralUtils
from .type_a_interferometer import TypeAInterferometer
from .type_b_interferometer import TypeBInterferometer
# Third-party imports
import numpy as np
from scipy import optimize

VISIBILITY_FLOOR = 1e-3
PAIRING_TOLERANCE = 0.01  # in units of tau_minus
QUADRATIC_MAX_RELATIVE_RESIDUAL = 0.05

Simulator = Union[TypeAInterferometer, TypeBInterferometer]


@dataclass(frozen=True)
class ScanGeometry:
    """Fixed quantities a set of scans must share to be inverted together."""
    tau_minus: float
    omega0: float
    l1: float = 0.0
    l2: float = 0.0
    r0: float = 1.0

    @classmethod
    def from_scan(cls, scan: ScanResult) -> "ScanGeometry":
        """
        Reads the geometry from a scan's metadata.

        Raises:
            ProtocolError: If the spectrum is not recorded.
        """
        metadata = scan.get_metadata()
        if scan.tau_minus is None or scan.omega0 is None:
            raise ProtocolError("Scan metadata does not record the source spectrum (tau_minus, omega0).")

        def length(section: str) -> float:
            table = metadata.get(section, {})
            return float(table.get("length", 0.0)) if isinstance(table, dict) else 0.0

        return cls(tau_minus=scan.tau_minus, omega0=scan.omega0, l1=length("sample_pre"),
                   l2=length("sample_post"), r0=float(metadata.get("r0", 1.0)))

    def check_same(self, other: "ScanGeometry", rel_tol: float = 1e-9) -> None:
        """
        Raises:
            ConsistencyError: Naming the first field that differs.
        """
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if not math.isclose(a, b, rel_tol=rel_tol, abs_tol=1e-12):
                raise ConsistencyError(f"Scans disagree on {f.name}: {a} vs {b}.")

    @classmethod
    def common(cls, scans: Sequence[ScanResult], geometry: Optional["ScanGeometry"] = None) -> "ScanGeometry":
        """Geometry shared by every scan, checked against `geometry` when given."""
        reference = geometry if geometry is not None else cls.from_scan(scans[0])
        for scan in scans:
            reference.check_same(cls.from_scan(scan))
        return reference


class RecoveryUtils:
    """
    Inversion protocols: from simulated or measured scans back to PMD parameters.
    """

    @staticmethod
    def _require_axis(scan: ScanResult, axis: str, role: str) -> None:
        if scan.axis != axis:
            raise ProtocolError(f"{role} must be a {axis} scan, got a {scan.axis} scan.")

    @staticmethod
    def _strongest(features: List[DipFeature]) -> Optional[DipFeature]:
        return max(features, key=lambda f: abs(f.excursion)) if features else None

    @staticmethod
    def recover_type_a(tau1_scan: Optional[ScanResult], tau2_scan: Optional[ScanResult] = None,
                       geometry: Optional[ScanGeometry] = None, min_prominence: float = 0.05,
                       logger: Optional[logging.Logger] = None) -> RecoveryReport:
        """
        Type A readouts from a tau1 scan and/or a tau2 scan.

        - tau1 dip center c: dA_total = -2c - tau2 and dalpha = dA_total / (2 l1 + l2).
        - tau1 dip visibility: cos(dk0 l2 + Omega0 tau2) = excursion / background,
          reported as the full branch set of dk0.
        - tau2 scan: envelope center x0 gives dA_total = -x0 - 2 tau1; the fringe
          phase gives dk0 = phase / l2, unique within one fringe.

        Raises:
            ProtocolError: If neither scan yields a usable feature.
            ConsistencyError: If the scans disagree on the setup.
        """
        logger = logger or LoggerUtils.get_logger()
        scans = [s for s in (tau1_scan, tau2_scan) if s is not None]
        if not scans:
            raise ProtocolError("recover_type_a needs a tau1 scan, a tau2 scan, or both.")
        geo = ScanGeometry.common(scans, geometry)
        path_length = 2.0 * geo.l1 + geo.l2
        report = RecoveryReport("type_a", logger)
        da_values = []

        if tau1_scan is not None:
            RecoveryUtils._require_axis(tau1_scan, "tau1", "tau1_scan")
            tau2 = tau1_scan.fixed_delay("tau2")
            dip = RecoveryUtils._strongest(ExtractionUtils.find_dips(tau1_scan, min_prominence, geo.tau_minus, logger))
            if dip is None:
                report.add_branch_set("dk0_visibility", BranchSet([], 2.0 * math.pi / geo.l2 if geo.l2 else 0.0,
                                                                  "rad/um", "tau1 dip visibility", indeterminate=True))
                report.add_note("No tau1 dip above the prominence threshold.")
            else:
                da = -2.0 * dip.center - tau2
                da_values.append(da)
                report.add_estimate("dA_total", da, 2.0 * dip.center_uncertainty, "fs", "tau1 dip center")
                RecoveryUtils._visibility_branches(report, dip, geo, tau2)

        if tau2_scan is not None:
            RecoveryUtils._require_axis(tau2_scan, "tau2", "tau2_scan")
            tau1 = tau2_scan.fixed_delay("tau1")
            fit = ExtractionUtils.fit_envelope_and_fringe(tau2_scan, geo.omega0, initial_width=geo.tau_minus,
                                                          logger=logger)
            da = -fit.center - 2.0 * tau1
            if da_values:
                report.add_residual("dA_total_dip_vs_envelope", da - da_values[0])
            else:
                report.add_estimate("dA_total", da, fit.center_uncertainty, "fs", "tau2 envelope center")
            da_values.append(da)
            report.add_estimate("fringe_phase", fit.phase, fit.phase_uncertainty, "rad", "tau2 fringe phase")
            report.add_estimate("phase_delay", fit.phase / geo.omega0, fit.phase_uncertainty / geo.omega0, "fs",
                                "tau2 fringe phase")
            if geo.l2 > 0:
                dk0 = fit.phase / geo.l2
                report.add_estimate("dk0", dk0, fit.phase_uncertainty / geo.l2, "rad/um", "tau2 fringe phase")
                branches = report.branches.get("dk0_visibility")
                if branches is not None and not branches.indeterminate:
                    nearest = min(branches.solutions(dk0 - branches.period, dk0 + branches.period),
                                  key=lambda v: abs(v - dk0))
                    report.add_residual("dk0_visibility_vs_fringe", dk0 - nearest)
            report.add_note("Fringe phase is taken within one fringe of zero delay.")

        if not da_values:
            raise ProtocolError("No Type A feature found: the tau1 scan has no dip and no tau2 scan was given.")
        if path_length > 0:
            da = report.value("dA_total")
            report.add_estimate("dalpha", da / path_length, report["dA_total"].uncertainty / path_length,
                                "fs/um", report["dA_total"].method)
        return report

    @staticmethod
    def _visibility_branches(report: RecoveryReport, dip: DipFeature, geo: ScanGeometry, tau2: float) -> None:
        method = "tau1 dip visibility"
        period = 2.0 * math.pi / geo.l2 if geo.l2 > 0 else 0.0
        if dip.overlapping:
            report.logger.warning("[RECOVERY] tau1 dip overlaps another feature; visibility readout refused")
            report.add_note("Visibility readout refused: the tau1 dip overlaps another feature.")
            return
        ratio = dip.excursion / dip.background if dip.background else 0.0
        if geo.l2 <= 0 or abs(ratio) < VISIBILITY_FLOOR:
            report.add_branch_set("dk0_visibility", BranchSet([], period, "rad/um", method, indeterminate=True))
            return
        angle = math.acos(max(-1.0, min(1.0, ratio)))
        offset = geo.omega0 * tau2
        report.add_estimate("visibility", abs(ratio), 0.0, "", method)
        report.add_branch_set("dk0_visibility", BranchSet(
            [(angle - offset) / geo.l2, (-angle - offset) / geo.l2], period, "rad/um", method))

    @staticmethod
    def _non_origin(features: List[DipFeature], tau_minus: float) -> List[DipFeature]:
        return [f for f in features if abs(f.center) > tau_minus]

    @staticmethod
    def _single(features: List[DipFeature], term: str, procedure: str) -> DipFeature:
        if not features:
            raise ProtocolError(f"Procedure {procedure}: the {term} feature is not in the scan window.")
        if len(features) > 1:
            centers = ", ".join(f"{f.center:.4g}" for f in features)
            raise ProtocolError(f"Procedure {procedure}: several candidates for the {term} feature ({centers}).")
        return features[0]

    @staticmethod
    def recover_type_b_three_scan(scan_i: ScanResult, scan_ii: ScanResult, scan_iii: ScanResult,
                                  geometry: Optional[ScanGeometry] = None, min_prominence: float = 0.3,
                                  logger: Optional[logging.Logger] = None) -> RecoveryReport:
        """
        Type B tau1 scans with nothing before the first beam splitter.

        (i) |tau2| large, tau = 0: the H-delay dip sits at c = alphaH l2 + tau.
        (ii) |tau|, |tau2| large, |tau + tau2| small: the V-delay dip sits at
             c = -(alphaV l2 + tau + tau2).
        (iii) |tau| large, tau2 = 0: the farthest feature from the origin sits at
              c = -(dalpha l2 + tau2); the exchange feature halfway is a cross-check.

        Raises:
            ProtocolError: If an expected feature is missing, ambiguous, or l1 != 0.
        """
        logger = logger or LoggerUtils.get_logger()
        geo = ScanGeometry.common([scan_i, scan_ii, scan_iii], geometry)
        for name, scan in (("scan_i", scan_i), ("scan_ii", scan_ii), ("scan_iii", scan_iii)):
            RecoveryUtils._require_axis(scan, "tau1", name)
        if geo.l1 != 0.0:
            raise ProtocolError("The three-scan procedure needs l1 = 0.")
        if geo.l2 <= 0:
            raise ProtocolError("The three-scan procedure needs l2 > 0.")
        tm, l2 = geo.tau_minus, geo.l2
        report = RecoveryReport("type_b_three_scan", logger)

        found = RecoveryUtils._non_origin(ExtractionUtils.find_dips(scan_i, min_prominence, tm, logger), tm)
        h_dip = RecoveryUtils._single([f for f in found if f.is_dip], "H-delay", "(i)")
        alpha_h = (h_dip.center - scan_i.fixed_delay("tau")) / l2
        report.add_estimate("alpha_h", alpha_h, h_dip.center_uncertainty / l2, "fs/um", "procedure (i)")

        found = RecoveryUtils._non_origin(ExtractionUtils.find_dips(scan_ii, min_prominence, tm, logger), tm)
        v_dip = RecoveryUtils._single([f for f in found if f.is_dip], "V-delay", "(ii)")
        alpha_v = -(v_dip.center + scan_ii.fixed_delay("tau") + scan_ii.fixed_delay("tau2")) / l2
        report.add_estimate("alpha_v", alpha_v, v_dip.center_uncertainty / l2, "fs/um", "procedure (ii)")

        tau2 = scan_iii.fixed_delay("tau2")
        found = RecoveryUtils._non_origin(ExtractionUtils.find_dips(scan_iii, min_prominence, tm, logger), tm)
        if found:
            far = max(found, key=lambda f: abs(f.center))
            dalpha = -(far.center + tau2) / l2
            report.add_estimate("dalpha", dalpha, far.center_uncertainty / l2, "fs/um", "procedure (iii)")
            halfway = [f for f in found if f is not far]
            if halfway:
                exchange = min(halfway, key=lambda f: abs(f.center - 0.5 * far.center))
                report.add_residual("exchange_position", exchange.center + 0.5 * (dalpha * l2 + tau2))
        else:
            report.add_estimate("dalpha", -tau2 / l2, 0.5 * tm / l2, "fs/um", "procedure (iii)")
            report.add_note("Procedure (iii): all features coincide at the origin.")

        report.add_residual("alpha_difference", (alpha_v - alpha_h) - report.value("dalpha"))
        return report

    @staticmethod
    def recover_type_b_two_scan(scan_a: ScanResult, scan_b: ScanResult, geometry: Optional[ScanGeometry] = None,
                                min_prominence: float = 0.3, logger: Optional[logging.Logger] = None) -> RecoveryReport:
        """
        Postponed-delay protocol: two tau scans at different tau2.

        The dip at -alphaH l2 does not move with tau2; the dip at
        -(alphaV l2 + tau2) does. Dips closer than tau_minus / 100 across the
        scans are paired as stationary.

        Raises:
            ConfigurationError: If both scans share the same tau2.
            PairingError: Unless exactly one stationary pair and at least one moving dip are found.
        """
        logger = logger or LoggerUtils.get_logger()
        geo = ScanGeometry.common([scan_a, scan_b], geometry)
        RecoveryUtils._require_axis(scan_a, "tau", "scan_a")
        RecoveryUtils._require_axis(scan_b, "tau", "scan_b")
        if geo.l1 != 0.0 or scan_a.fixed_delay("tau1") != 0.0 or scan_b.fixed_delay("tau1") != 0.0:
            raise ProtocolError("The two-scan procedure needs l1 = 0 and tau1 = 0.")
        if geo.l2 <= 0:
            raise ProtocolError("The two-scan procedure needs l2 > 0.")
        tau2_a, tau2_b = scan_a.fixed_delay("tau2"), scan_b.fixed_delay("tau2")
        if tau2_a == tau2_b:
            raise ConfigurationError(f"Both scans use tau2 = {tau2_a}; the protocol needs two different values.",
                                     "delays.tau2")
        tolerance = PAIRING_TOLERANCE * geo.tau_minus
        dips_a = [f for f in ExtractionUtils.find_dips(scan_a, min_prominence, geo.tau_minus, logger) if f.is_dip]
        dips_b = [f for f in ExtractionUtils.find_dips(scan_b, min_prominence, geo.tau_minus, logger) if f.is_dip]

        pairs = [(a, b) for a in dips_a for b in dips_b if abs(a.center - b.center) <= tolerance]
        if len(pairs) != 1:
            raise PairingError(f"Expected one stationary dip across the scans, found {len(pairs)} "
                               f"(tolerance {tolerance:.3g} fs).")
        stat_a, stat_b = pairs[0]
        center = 0.5 * (stat_a.center + stat_b.center)
        sigma = 0.5 * math.hypot(stat_a.center_uncertainty, stat_b.center_uncertainty)
        alpha_h = -center / geo.l2
        report = RecoveryReport("type_b_two_scan", logger)
        report.add_estimate("alpha_h", alpha_h, sigma / geo.l2, "fs/um", "stationary dip")

        moving: List[Tuple[DipFeature, float]] = []
        for dips, stationary, tau2 in ((dips_a, stat_a, tau2_a), (dips_b, stat_b, tau2_b)):
            rest = [f for f in dips if f is not stationary]
            if len(rest) > 1:
                raise PairingError(f"Scan at tau2 = {tau2} has {len(rest)} moving dip candidates; "
                                   f"exchange fringes appear when tau2 is close to -dalpha l2.")
            moving.extend((f, tau2) for f in rest)
        if not moving:
            raise PairingError("No moving dip found in either scan.")
        estimates = [-(f.center + tau2) / geo.l2 for f, tau2 in moving]
        alpha_v = float(np.mean(estimates))
        sigma_v = math.sqrt(sum(f.center_uncertainty ** 2 for f, _ in moving)) / (len(moving) * geo.l2)
        report.add_estimate("alpha_v", alpha_v, sigma_v, "fs/um", "moving dip")
        report.add_estimate("dalpha", alpha_v - alpha_h, math.hypot(sigma_v, sigma / geo.l2), "fs/um",
                            "moving minus stationary dip")
        if len(moving) == 2:
            report.add_residual("alpha_v_spread", estimates[1] - estimates[0])
        else:
            report.add_note("The moving dip merged with the stationary one in one scan.")
        return report

    @staticmethod
    def _with_quadratic(simulator: Simulator, phase: float, psi: float) -> Simulator:
        """Copy of the simulator whose post-sample V polarization carries the trial dk0 and dbeta."""
        config = simulator.config
        l2 = config.sample_post.length
        curvature = l2 * (2.0 * math.pi / simulator.spectrum.tau_minus) ** 2
        h, v = config.sample_post.h, config.sample_post.v
        trial_v = DispersionRelation(k0=h.k0 + phase / l2, alpha=v.alpha, beta=h.beta + psi / curvature, gamma=v.gamma)
        post = replace(config.sample_post, v=trial_v)
        return type(simulator)(replace(config, sample_post=post), simulator.quadrature, simulator.logger)

    @staticmethod
    def _model_rates(simulator: Simulator, axis: str, x: np.ndarray) -> np.ndarray:
        base = simulator.config.delays
        base = replace(base, physical=False)
        rates = np.empty_like(x)
        for i, xi in enumerate(x):
            delays = base.with_axis(axis, xi)
            integrand = (simulator.integrand(delays) if isinstance(simulator, TypeBInterferometer)
                         else simulator.integrand(delays, "factorized"))
            value = SpectralUtils.fixed_rule(integrand, simulator.half_width, simulator.spectrum.tau_minus)
            rates[i] = 1.0 + simulator.normalization * complex(value).real
        return rates

    @staticmethod
    def _predicted_centers(simulator: Simulator, axis: str) -> List[float]:
        if isinstance(simulator, TypeBInterferometer):
            return [p.center for p in simulator.predict_dips(axis) if p.center is not None]
        if axis == "tau1":
            return [simulator.dip_center()]
        return [simulator.envelope_center()]

    @staticmethod
    def fit_quadratic(scan: ScanResult, simulator: Simulator, initial_dk0: float = 0.0, initial_dbeta: float = 0.0,
                      min_prominence: float = 0.05, logger: Optional[logging.Logger] = None) -> RecoveryReport:
        """
        Fits dk0 and dbeta of the post-beam-splitter sample to one feature of a scan.

        Free parameters: phase = dk0 l2, psi = dbeta l2 (2 pi / tau_minus)^2,
        a shift of the feature along the scan axis, and the rate scale r0. The
        forward model is the numeric simulator evaluated with a fixed
        Gauss-Legendre rule so it is smooth in the parameters.

        Args:
            scan: Scan around one feature.
            simulator: Type A or Type B simulator describing everything but the fitted parameters.
            initial_dk0: Starting dk0 (rad/um), e.g. from a fringe fit.
            initial_dbeta: Starting dbeta (fs^2/um).
            min_prominence: Prominence used to locate the feature for the starting shift.
            logger: Optional logger instance.

        Raises:
            FitDivergenceError: If the optimizer fails or the residual is too large.
        """
        logger = logger or LoggerUtils.get_logger()
        if scan.axis not in simulator.AXES:
            raise ProtocolError(f"{simulator.MODE} fits support axes {simulator.AXES}, got {scan.axis}.")
        l2 = simulator.config.sample_post.length
        if l2 <= 0:
            raise ProtocolError("fit_quadratic needs a post-beam-splitter sample (l2 > 0).")
        tau_minus = simulator.spectrum.tau_minus
        curvature = l2 * (2.0 * math.pi / tau_minus) ** 2
        x, y = scan.delays, scan.values

        shift0 = 0.0
        feature = RecoveryUtils._strongest(ExtractionUtils.find_dips(scan, min_prominence, tau_minus, logger))
        predicted = RecoveryUtils._predicted_centers(simulator, scan.axis)
        if feature is not None and predicted:
            shift0 = feature.center - min(predicted, key=lambda c: abs(c - feature.center))
        scale0 = float(np.median(y))

        def residuals(p: np.ndarray) -> np.ndarray:
            phase, psi, shift, scale = p
            trial = RecoveryUtils._with_quadratic(simulator, phase, psi)
            return scale * RecoveryUtils._model_rates(trial, scan.axis, x - shift) - y

        start = np.array([initial_dk0 * l2, initial_dbeta * curvature, shift0, scale0])
        logger.info(f"[RECOVERY] Quadratic fit from phase {start[0]:.4g}, psi {start[1]:.4g}, shift {shift0:.4g}")
        result = optimize.least_squares(residuals, start, x_scale=np.array([0.1, 0.1, 0.1 * tau_minus, 0.01 * scale0]),
                                        xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=400)
        rms = math.sqrt(2.0 * result.cost / x.size)
        excursion = float(np.max(np.abs(y - np.median(y)))) or 1.0
        if not result.success or rms > QUADRATIC_MAX_RELATIVE_RESIDUAL * excursion:
            logger.error(f"[RECOVERY] Quadratic fit failed: {result.message}, rms {rms:.3g}")
            raise FitDivergenceError(f"Quadratic fit did not converge ({result.message}); rms residual {rms:.3g}.", rms)

        phase, psi, shift, scale = result.x
        sigma = ExtractionUtils.least_squares_sigma(result)

        report = RecoveryReport("quadratic", logger)
        report.add_estimate("dk0", phase / l2, sigma[0] / l2, "rad/um", "quadratic model fit")
        report.add_estimate("dbeta", psi / curvature, sigma[1] / curvature, "fs^2/um", "quadratic model fit")
        report.add_estimate("shift", shift, sigma[2], "fs", "quadratic model fit")
        report.add_estimate("r0", scale, sigma[3], "", "quadratic model fit")
        report.add_residual("rms", rms)
        if not np.all(np.isfinite(sigma)):
            logger.warning("[RECOVERY] Quadratic fit covariance is singular; some uncertainties are unbounded")
            report.add_note("The fit Jacobian leaves some parameters unconstrained; their uncertainty is reported as inf.")
        if isinstance(simulator, TypeAInterferometer) and scan.axis == "tau1":
            report.add_note("Type A tau1 scans do not distinguish (dk0, dbeta) from (-dk0, -dbeta); "
                            "the fit keeps the sign of its starting dk0.")
        return report
