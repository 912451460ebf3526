# Standard imports
import math
from dataclasses import dataclass, field, asdict
from typing import Dict, Any, Tuple, Union
# Local imports
from .errors import InputDomainError
# Third-party imports
import numpy as np

# Unit system: time fs, length um, angular frequency rad/fs, wavenumber rad/um
SPEED_OF_LIGHT_UM_PER_FS = 0.299792458
SPEED_OF_LIGHT_NM_PER_FS = 299.792458
# Solves sinc^2(x) = 1/2
SINC2_HALF_MAXIMUM = 1.3915573782515103

ArrayLike = Union[float, np.ndarray]


def _check_finite(owner: str, values: Dict[str, float]) -> None:
    for name, value in values.items():
        if not isinstance(value, (int, float, np.floating, np.integer)) or not math.isfinite(value):
            raise InputDomainError(f"{owner}.{name} must be a finite number, got {value!r}.")


@dataclass(frozen=True)
class DispersionRelation:
    """
    Taylor coefficients of one polarization's wavenumber about the center frequency.

    Attributes:
        k0: Wavenumber at the center frequency (rad/um).
        alpha: Inverse group velocity (fs/um).
        beta: Second-order coefficient (fs^2/um).
        gamma: Third-order coefficient (fs^3/um). Carried for the numerical
               path only; closed forms reject it.
    """
    k0: float = 0.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        _check_finite("DispersionRelation", asdict(self))

    @property
    def is_linear(self) -> bool:
        return self.beta == 0.0 and self.gamma == 0.0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class Sample:
    """
    A lumped birefringent element of axial length `length` (um).

    A zero length means no sample; every simulator must then reproduce the
    empty-arm result.
    """
    length: float = 0.0
    h: DispersionRelation = field(default_factory=DispersionRelation)
    v: DispersionRelation = field(default_factory=DispersionRelation)
    label: str = ""

    def __post_init__(self):
        _check_finite("Sample", {"length": self.length})
        if self.length < 0:
            raise InputDomainError(f"Sample.length must be >= 0, got {self.length}.")

    @property
    def is_linear(self) -> bool:
        return self.h.is_linear and self.v.is_linear

    def to_dict(self) -> Dict[str, Any]:
        return {"length": self.length, "label": self.label, "h": self.h.to_dict(), "v": self.v.to_dict()}


@dataclass(frozen=True)
class PMDDelta:
    """V minus H differences of a sample, per unit length and lumped over its length."""
    dk0: float
    dalpha: float
    dbeta: float
    dphi: float
    dA: float
    dB: float


@dataclass(frozen=True)
class SourceSpectrum:
    """
    Downconversion spectrum Phi(w) = sinc(tau_minus * w / 2) about omega0.

    Attributes:
        omega0: Center frequency, half the pump frequency (rad/fs).
        tau_minus: Downconversion time (fs).
        description: Free text.
    """
    omega0: float
    tau_minus: float
    description: str = ""

    def __post_init__(self):
        _check_finite("SourceSpectrum", {"omega0": self.omega0, "tau_minus": self.tau_minus})
        if self.omega0 <= 0:
            raise InputDomainError(f"SourceSpectrum.omega0 must be > 0, got {self.omega0}.")
        if self.tau_minus <= 0:
            raise InputDomainError(f"SourceSpectrum.tau_minus must be > 0, got {self.tau_minus}.")

    @property
    def lobe_width(self) -> float:
        """Width of one sinc^2 lobe in detuning (rad/fs)."""
        return 2.0 * math.pi / self.tau_minus

    def default_half_width(self, lobes: int = 10) -> float:
        """Truncation bound covering `lobes` sinc^2 lobes on each side."""
        return lobes * self.lobe_width

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class DelayConfig:
    """
    Adjustable delays.

    Attributes:
        tau1: Birefringent delay before the beam splitter (fs, signed).
        tau2: Birefringent delay after the beam splitter (fs, signed).
        tau: Nonbirefringent delay after the beam splitter (fs).
        delta: Classical path delay (um, signed).
        physical: If True, tau must be non-negative.
    """
    tau1: float = 0.0
    tau2: float = 0.0
    tau: float = 0.0
    delta: float = 0.0
    physical: bool = True

    def __post_init__(self):
        _check_finite("DelayConfig", {"tau1": self.tau1, "tau2": self.tau2, "tau": self.tau, "delta": self.delta})
        if self.physical and self.tau < 0:
            raise InputDomainError(
                f"DelayConfig.tau is an absolute delay and must be >= 0 in physical mode, got {self.tau}."
            )

    def with_axis(self, axis: str, value: float) -> "DelayConfig":
        """Returns a copy with the named delay replaced."""
        if axis not in ("tau1", "tau2", "tau", "delta"):
            raise ValueError(f"Unknown delay axis '{axis}'.")
        values = asdict(self)
        values[axis] = float(value)
        return DelayConfig(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class DispersionUtils:
    """
    Operations on dispersion relations and unit conventions.
    """

    @staticmethod
    def wavenumber(rel: DispersionRelation, detuning: ArrayLike) -> ArrayLike:
        """
        Evaluates k(Omega0 + w) = k0 + alpha w + beta w^2 + gamma w^3.

        Args:
            rel: Dispersion relation.
            detuning: Signed detuning w (rad/fs), scalar or array.

        Returns:
            Wavenumber in rad/um with the shape of `detuning`.
        """
        w = detuning
        return rel.k0 + w * (rel.alpha + w * (rel.beta + w * rel.gamma))

    @staticmethod
    def even_odd_split(rel: DispersionRelation, detuning: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        """
        Splits the wavenumber into its even and odd parts in the detuning.

        Returns:
            (even, odd) with even = k0 + beta w^2 and odd = alpha w + gamma w^3.
        """
        w = detuning
        w2 = w * w
        even = rel.k0 + rel.beta * w2
        odd = w * (rel.alpha + rel.gamma * w2)
        return even, odd

    @staticmethod
    def difference(sample: Sample) -> DispersionRelation:
        """Returns the V minus H relation of a sample."""
        return DispersionRelation(
            k0=sample.v.k0 - sample.h.k0,
            alpha=sample.v.alpha - sample.h.alpha,
            beta=sample.v.beta - sample.h.beta,
            gamma=sample.v.gamma - sample.h.gamma,
        )

    @staticmethod
    def pmd_delta(sample: Sample) -> PMDDelta:
        """
        Computes the PMD parameters of a sample.

        Args:
            sample: The birefringent sample.

        Returns:
            PMDDelta with V minus H differences and their values lumped over
            the sample length.
        """
        diff = DispersionUtils.difference(sample)
        return PMDDelta(
            dk0=diff.k0,
            dalpha=diff.alpha,
            dbeta=diff.beta,
            dphi=sample.length * diff.k0,
            dA=sample.length * diff.alpha,
            dB=sample.length * diff.beta,
        )

    @staticmethod
    def omega0_from_wavelength(lambda0: float) -> float:
        """
        Converts a vacuum wavelength in nm to angular frequency in rad/fs.

        Raises:
            InputDomainError: If the wavelength is not positive and finite.
        """
        if not math.isfinite(lambda0) or lambda0 <= 0:
            raise InputDomainError(f"Wavelength must be a positive number of nm, got {lambda0}.")
        return 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_FS / lambda0

    @staticmethod
    def tau_minus_from_bandwidth(lambda0: float, bandwidth: float) -> float:
        """
        Chooses tau_minus so the |Phi|^2 main lobe has a FWHM of `bandwidth` nm at `lambda0` nm.

        Raises:
            InputDomainError: If either argument is not positive.
        """
        if lambda0 <= 0 or bandwidth <= 0:
            raise InputDomainError(f"Wavelength and bandwidth must be positive, got {lambda0} and {bandwidth}.")
        domega = 2.0 * math.pi * SPEED_OF_LIGHT_NM_PER_FS * bandwidth / lambda0 ** 2
        return 4.0 * SINC2_HALF_MAXIMUM / domega

    @staticmethod
    def coherence_length(lambda0: float, bandwidth: float) -> float:
        """Classical coherence length lambda0^2 / bandwidth, returned in um for inputs in nm."""
        if lambda0 <= 0 or bandwidth <= 0:
            raise InputDomainError(f"Wavelength and bandwidth must be positive, got {lambda0} and {bandwidth}.")
        return lambda0 ** 2 / bandwidth * 1e-3


if __name__ == "__main__":
    # Example usage
    sample = Sample(length=100.0, h=DispersionRelation(alpha=3.0), v=DispersionRelation(alpha=3.05), label="quartz")
    print(DispersionUtils.pmd_delta(sample))
    print(DispersionUtils.omega0_from_wavelength(1550.0))
    print(DispersionUtils.tau_minus_from_bandwidth(1550.0, 200.0))
