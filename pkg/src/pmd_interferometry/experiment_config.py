# Standard imports
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Any, List, Optional, Union
# Local imports
from .classical_interferometer import ClassicalConfig, ClassicalInterferometer
from .config_utils import ConfigUtils, Schema
from .dispersion import DispersionRelation, Sample, SourceSpectrum, DelayConfig, DispersionUtils
from .errors import ConfigurationError, InputDomainError
from .interferometer import ENGINES, Interferometer, QuadratureSettings
from .logger_utils import LoggerUtils
from .scan_utils import ScanUtils
from .spectral_utils import DEFAULT_ABS_TOL, DEFAULT_REL_TOL, DEFAULT_MAX_EVALUATIONS, DEFAULT_LOBES
from .type_a_interferometer import TypeAConfig, TypeAInterferometer
from .type_b_interferometer import TypeBConfig, TypeBInterferometer, PostponedDelayInterferometer
# Third-party imports
import numpy as np

FORMAT_VERSION = "1.0"
MODES = ("classical", "type_a", "type_b", "type_b_postponed")
PROTOCOLS = ("type_a", "type_b_three_scan", "type_b_two_scan", "quadratic")
MODE_AXES = {"classical": ("delta",), "type_a": ("tau1", "tau2"), "type_b": ("tau1", "tau2", "tau"),
             "type_b_postponed": ("tau2", "tau")}

_NUMBER = ((float,), False)
_RELATION: Schema = {"k0": _NUMBER, "alpha": _NUMBER, "beta": _NUMBER, "gamma": _NUMBER}
_SAMPLE: Schema = {"length": _NUMBER, "label": ((str,), False), "h": _RELATION, "v": _RELATION}
SCHEMA: Schema = {
    "format_version": ((str,), False),
    "mode": ((str,), True),
    "engine": ((str,), False),
    "seed": ((int,), False),
    "noise": _NUMBER,
    "threads": ((int,), False),
    "r0": _NUMBER,
    "spectrum": {"wavelength_nm": _NUMBER, "omega0": _NUMBER, "tau_minus": _NUMBER, "bandwidth_nm": _NUMBER,
                 "description": ((str,), False)},
    "sample_pre": _SAMPLE,
    "sample_post": _SAMPLE,
    "delays": {"tau1": _NUMBER, "tau2": _NUMBER, "tau": _NUMBER, "physical": ((bool,), False)},
    "classical": {"path_diff": _NUMBER},
    "scan": {"axis": ((str,), True), "start": ((float,), True), "stop": ((float,), True), "points": ((int,), True)},
    "quadrature": {"half_width_lobes": _NUMBER, "abs_tol": _NUMBER, "rel_tol": _NUMBER,
                   "max_evaluations": ((int,), False)},
    "output": {"path": ((str,), False), "format": ((str,), False)},
    "recovery": {"protocol": ((str,), True), "min_prominence": _NUMBER, "initial_dk0": _NUMBER,
                 "initial_dbeta": _NUMBER},
}

TEMPLATE: List[Dict[str, Any]] = [
    {"parameter": "format_version", "default_value": FORMAT_VERSION, "description": "Configuration schema version."},
    {"parameter": "mode", "default_value": "type_a", "description": "classical | type_a | type_b | type_b_postponed"},
    {"parameter": "engine", "default_value": "auto", "description": "analytic | numeric | auto"},
    {"parameter": "seed", "default_value": 0, "description": "Seed of the noise generator."},
    {"parameter": "noise", "default_value": 0.0, "description": "Relative sigma of multiplicative Gaussian noise."},
    {"parameter": "threads", "default_value": 1, "description": "Worker threads per scan."},
    {"parameter": "spectrum.wavelength_nm", "default_value": 1550.0, "description": "Center wavelength (nm); or give omega0 (rad/fs)."},
    {"parameter": "spectrum.bandwidth_nm", "default_value": 200.0, "description": "FWHM bandwidth (nm); or give tau_minus (fs)."},
    {"parameter": "sample_pre.length", "default_value": 0.0, "description": "Sample before the beam splitter, l1 (um)."},
    {"parameter": "sample_post.length", "default_value": 100.0, "description": "Sample after the beam splitter, l2 (um)."},
    {"parameter": "sample_post.h.alpha", "default_value": 3.0, "description": "H inverse group velocity (fs/um)."},
    {"parameter": "sample_post.v.alpha", "default_value": 3.05, "description": "V inverse group velocity (fs/um)."},
    {"parameter": "delays.tau1", "default_value": 0.0, "description": "Birefringent delay before the beam splitter (fs)."},
    {"parameter": "delays.tau2", "default_value": 0.0, "description": "Birefringent delay after the beam splitter (fs)."},
    {"parameter": "delays.tau", "default_value": 0.0, "description": "Nonbirefringent delay (fs), >= 0 unless physical = false."},
    {"parameter": "scan.axis", "default_value": "tau1", "description": "tau1 | tau2 | tau | delta"},
    {"parameter": "scan.start", "default_value": -300.0, "description": "First scan value."},
    {"parameter": "scan.stop", "default_value": 0.0, "description": "Last scan value."},
    {"parameter": "scan.points", "default_value": 601, "description": "Number of scan points, at least 2."},
    {"parameter": "output.path", "default_value": "scan.tsv", "description": "Scan file, relative to this file."},
]


def _relation(table: Dict[str, Any]) -> DispersionRelation:
    return DispersionRelation(**{k: float(v) for k, v in table.items()})


def _sample(table: Dict[str, Any]) -> Sample:
    return Sample(length=float(table.get("length", 0.0)), label=table.get("label", ""),
                  h=_relation(table.get("h", {})), v=_relation(table.get("v", {})))


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated view of one experiment configuration file."""
    mode: str
    spectrum: SourceSpectrum
    sample_pre: Sample = field(default_factory=Sample)
    sample_post: Sample = field(default_factory=Sample)
    delays: DelayConfig = field(default_factory=DelayConfig)
    engine: str = "auto"
    r0: float = 1.0
    path_diff: float = 0.0
    scan_axis: Optional[str] = None
    scan_start: float = 0.0
    scan_stop: float = 0.0
    scan_points: int = 0
    quadrature: QuadratureSettings = field(default_factory=QuadratureSettings)
    output_path: Optional[str] = None
    seed: Optional[int] = None
    noise: float = 0.0
    threads: int = 1
    recovery_protocol: Optional[str] = None
    min_prominence: float = 0.05
    initial_dk0: float = 0.0
    initial_dbeta: float = 0.0
    base_dir: str = "."

    @staticmethod
    def _spectrum(table: Dict[str, Any]) -> SourceSpectrum:
        has_wavelength, has_omega = "wavelength_nm" in table, "omega0" in table
        if has_wavelength == has_omega:
            raise ConfigurationError("Give exactly one of wavelength_nm and omega0.", "spectrum")
        omega0 = (DispersionUtils.omega0_from_wavelength(float(table["wavelength_nm"])) if has_wavelength
                  else float(table["omega0"]))
        has_tau, has_bandwidth = "tau_minus" in table, "bandwidth_nm" in table
        if has_tau == has_bandwidth:
            raise ConfigurationError("Give exactly one of tau_minus and bandwidth_nm.", "spectrum")
        if has_bandwidth:
            if not has_wavelength:
                raise ConfigurationError("bandwidth_nm needs wavelength_nm.", "spectrum.bandwidth_nm")
            tau_minus = DispersionUtils.tau_minus_from_bandwidth(float(table["wavelength_nm"]),
                                                                 float(table["bandwidth_nm"]))
        else:
            tau_minus = float(table["tau_minus"])
        return SourceSpectrum(omega0=omega0, tau_minus=tau_minus, description=table.get("description", ""))

    @classmethod
    def from_document(cls, document: Dict[str, Any], base_dir: Union[str, Path] = ".",
                      logger: Optional[logging.Logger] = None) -> "ExperimentConfig":
        """
        Validates a parsed configuration and builds the typed view.

        Raises:
            ConfigurationError: With the dotted path of the first offending field.
        """
        logger = logger or LoggerUtils.get_logger()
        doc = document.unwrap() if hasattr(document, "unwrap") else dict(document)
        ConfigUtils.validate(doc, SCHEMA)
        version = doc.get("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            logger.warning(f"[CONFIG] format_version {version}, expected {FORMAT_VERSION}")

        mode = doc["mode"]
        if mode not in MODES:
            raise ConfigurationError(f"Unknown mode '{mode}', expected one of {MODES}.", "mode")
        engine = doc.get("engine", "auto")
        if engine not in ENGINES:
            raise ConfigurationError(f"Unknown engine '{engine}', expected one of {ENGINES}.", "engine")
        if "spectrum" not in doc:
            raise ConfigurationError("Missing required table.", "spectrum")
        if mode.startswith("type_b") and "tau" not in doc.get("delays", {}):
            raise ConfigurationError(f"Mode {mode} needs the nonbirefringent delay.", "delays.tau")
        output = doc.get("output", {})
        if output.get("format", "tsv") != "tsv":
            raise ConfigurationError("Only the 'tsv' scan format is supported.", "output.format")
        recovery = doc.get("recovery", {})
        if recovery and recovery["protocol"] not in PROTOCOLS:
            raise ConfigurationError(f"Unknown protocol, expected one of {PROTOCOLS}.", "recovery.protocol")

        values: Dict[str, Any] = {"mode": mode, "engine": engine, "base_dir": str(base_dir)}
        section = "spectrum"
        try:
            values["spectrum"] = cls._spectrum(doc["spectrum"])
            section = "sample_pre"
            values["sample_pre"] = _sample(doc.get("sample_pre", {}))
            section = "sample_post"
            values["sample_post"] = _sample(doc.get("sample_post", {}))
            section = "delays"
            delays = doc.get("delays", {})
            values["delays"] = DelayConfig(tau1=float(delays.get("tau1", 0.0)), tau2=float(delays.get("tau2", 0.0)),
                                           tau=float(delays.get("tau", 0.0)), physical=delays.get("physical", True))
            section = "quadrature"
            quad = doc.get("quadrature", {})
            values["quadrature"] = QuadratureSettings(
                half_width_lobes=float(quad.get("half_width_lobes", DEFAULT_LOBES)),
                abs_tol=float(quad.get("abs_tol", DEFAULT_ABS_TOL)),
                rel_tol=float(quad.get("rel_tol", DEFAULT_REL_TOL)),
                max_evaluations=int(quad.get("max_evaluations", DEFAULT_MAX_EVALUATIONS)))
        except InputDomainError as e:
            raise ConfigurationError(str(e), section) from e

        values["r0"] = float(doc.get("r0", 1.0))
        if values["r0"] <= 0:
            raise ConfigurationError("r0 must be > 0.", "r0")
        values["path_diff"] = float(doc.get("classical", {}).get("path_diff", 0.0))
        if "scan" in doc:
            scan = doc["scan"]
            if scan["axis"] not in MODE_AXES[mode]:
                raise ConfigurationError(f"Mode {mode} scans {MODE_AXES[mode]}, got '{scan['axis']}'.", "scan.axis")
            if scan["points"] < 2:
                raise ConfigurationError("A scan needs at least 2 points.", "scan.points")
            if not float(scan["start"]) < float(scan["stop"]):
                raise ConfigurationError("scan.start must be < scan.stop.", "scan.start")
            values.update(scan_axis=scan["axis"], scan_start=float(scan["start"]), scan_stop=float(scan["stop"]),
                          scan_points=int(scan["points"]))
        if doc.get("noise", 0.0) < 0:
            raise ConfigurationError("noise must be >= 0.", "noise")
        if doc.get("threads", 1) < 1:
            raise ConfigurationError("threads must be >= 1.", "threads")
        values.update(noise=float(doc.get("noise", 0.0)), threads=int(doc.get("threads", 1)),
                      seed=doc.get("seed"), output_path=output.get("path"))
        if recovery:
            values.update(recovery_protocol=recovery["protocol"],
                          min_prominence=float(recovery.get("min_prominence", 0.05)),
                          initial_dk0=float(recovery.get("initial_dk0", 0.0)),
                          initial_dbeta=float(recovery.get("initial_dbeta", 0.0)))
        return cls(**values)

    @classmethod
    def from_file(cls, config_path: Union[str, Path], logger: Optional[logging.Logger] = None) -> "ExperimentConfig":
        logger = logger or LoggerUtils.get_logger()
        document = ConfigUtils.load_config_file(str(config_path), logger)
        logger.info(f"[CONFIG] Loaded {config_path}")
        return cls.from_document(document, Path(config_path).parent, logger)

    def to_classical_config(self) -> ClassicalConfig:
        return ClassicalConfig(spectrum=self.spectrum, sample=self.sample_post, path_diff=self.path_diff)

    def to_type_a_config(self) -> TypeAConfig:
        return TypeAConfig(spectrum=self.spectrum, sample_pre=self.sample_pre, sample_post=self.sample_post,
                           delays=self.delays, r0=self.r0)

    def to_type_b_config(self) -> TypeBConfig:
        return TypeBConfig(spectrum=self.spectrum, sample_pre=self.sample_pre, sample_post=self.sample_post,
                           delays=self.delays, r0=self.r0)

    def interferometer(self, logger: Optional[logging.Logger] = None) -> Interferometer:
        """
        Builds the simulator for the configured mode.

        Raises:
            ConfigurationError: If a postponed-delay config has l1 or tau1 set.
        """
        if self.mode == "classical":
            return ClassicalInterferometer(self.to_classical_config(), self.quadrature, logger)
        if self.mode == "type_a":
            return TypeAInterferometer(self.to_type_a_config(), self.quadrature, logger)
        if self.mode == "type_b":
            return TypeBInterferometer(self.to_type_b_config(), self.quadrature, logger)
        return PostponedDelayInterferometer(self.to_type_b_config(), self.quadrature, logger)

    def scan_grid(self) -> np.ndarray:
        """
        Raises:
            ConfigurationError: If the config has no [scan] table.
        """
        if self.scan_axis is None:
            raise ConfigurationError("Missing required table.", "scan")
        return ScanUtils.generate_scan_points(self.scan_start, self.scan_stop, self.scan_points)

    def resolve_output(self, override: Optional[Union[str, Path]] = None) -> Optional[Path]:
        """Output path from the flag, else from [output] relative to the config file."""
        if override is not None:
            return Path(override)
        if self.output_path is None:
            return None
        path = Path(self.output_path)
        return path if path.is_absolute() else Path(self.base_dir) / path


if __name__ == "__main__":
    # Example usage
    config = ExperimentConfig.from_document({
        "mode": "type_a",
        "spectrum": {"wavelength_nm": 1550.0, "tau_minus": 1.0},
        "sample_post": {"length": 100.0, "h": {"alpha": 3.0}, "v": {"alpha": 3.05}},
        "scan": {"axis": "tau1", "start": -5.0, "stop": 0.0, "points": 101},
    })
    print(config.interferometer().scan(config.scan_axis, config.scan_grid(), engine=config.engine).summary())
