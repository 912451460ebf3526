from .logger_utils import LoggerUtils
from .errors import (PMDInterferometryError, InputDomainError, ConfigurationError, ClosedFormInapplicableError,
                     QuadratureConvergenceError, FitDivergenceError, ProtocolError, PairingError, ConsistencyError)
from .dispersion import DispersionRelation, Sample, PMDDelta, SourceSpectrum, DelayConfig, DispersionUtils
from .spectral_utils import IntegralSpec, QuadratureResult, SpectralUtils
from .scan_result import ScanResult
from .scan_utils import ScanUtils
from .interferometer import QuadratureSettings
from .classical_interferometer import ClassicalConfig, ClassicalInterferometer
from .type_a_interferometer import TypeAConfig, TypeAInterferometer
from .type_b_interferometer import (TypeBConfig, DipPrediction, DelayTableRow, TypeBInterferometer,
                                    PostponedDelayInterferometer)
from .extraction_utils import DipFeature, EnvelopeFringeFit, ExtractionUtils
from .recovery_report import Estimate, BranchSet, RecoveryReport
from .recovery_utils import ScanGeometry, RecoveryUtils
from .config_utils import ConfigUtils
from .experiment_config import ExperimentConfig
