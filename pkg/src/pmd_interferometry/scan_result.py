# Standard imports
import os
import math
import logging
import tempfile
from collections import OrderedDict
from pathlib import Path
from typing import Optional, Tuple, Union, Dict, Any, List
# Local imports
from .errors import InputDomainError, ConfigurationError
from .logger_utils import LoggerUtils
# Third-party imports
import numpy as np
import tomlkit
from tomlkit.exceptions import ParseError


def _plain(value: Any) -> Any:
    """Converts metadata to TOML-serializable builtins, dropping None entries."""
    if isinstance(value, dict):
        return OrderedDict((str(k), _plain(v)) for k, v in value.items() if v is not None)
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


class ScanResult:
    """
    A sampled curve of rate or intensity against one swept delay.

    The metadata holds every fixed setting of the run (mode, engine, spectrum,
    samples, delays) so a saved scan can be inverted without its config file.
    """
    FORMAT_VERSION = "1.0"
    AXIS_UNITS = {"tau1": "fs", "tau2": "fs", "tau": "fs", "delta": "um"}

    def __init__(self, axis: str, delays: Union[List[float], np.ndarray], values: Union[List[float], np.ndarray],
                 metadata: Optional[Dict[str, Any]] = None, logger: Optional[logging.Logger] = None):
        """
        Args:
            axis: Swept delay: "tau1", "tau2", "tau" (fs) or "delta" (um).
            delays: Swept delay values.
            values: Rate (normalized to R0) or intensity per delay.
            metadata: Fixed settings of the run.
            logger: Optional logger instance.

        Raises:
            InputDomainError: If the axis is unknown or the arrays disagree in length.
        """
        self.logger = logger if logger else LoggerUtils.get_logger()
        if axis not in self.AXIS_UNITS:
            raise InputDomainError(f"Unknown scan axis '{axis}', expected one of {sorted(self.AXIS_UNITS)}.")
        delays = np.array(delays, dtype=float)
        values = np.array(values, dtype=float)
        if delays.ndim != 1 or delays.shape != values.shape:
            raise InputDomainError(f"Delays and values must be 1-D arrays of equal length, got {delays.shape} and {values.shape}.")
        self._axis = axis
        self._delays = delays
        self._values = values
        self._metadata: Dict[str, Any] = OrderedDict()
        if metadata:
            self.add_metadata(metadata)

    @property
    def axis(self) -> str:
        return self._axis

    @property
    def unit(self) -> str:
        return self.AXIS_UNITS[self._axis]

    @property
    def delays(self) -> np.ndarray:
        return self._delays.copy()

    @property
    def values(self) -> np.ndarray:
        return self._values.copy()

    def __len__(self) -> int:
        return self._delays.size

    def get_data(self) -> Tuple[np.ndarray, np.ndarray]:
        """Returns copies of (delays, values)."""
        return self.delays, self.values

    def add_metadata(self, metadata_dict: Dict[str, Any]) -> None:
        if not isinstance(metadata_dict, dict):
            raise TypeError("metadata_dict must be a dictionary.")
        self._metadata.update(_plain(metadata_dict))

    def get_metadata(self) -> Dict[str, Any]:
        return OrderedDict(self._metadata)

    def _metadata_number(self, section: str, key: str) -> Optional[float]:
        table = self._metadata.get(section)
        if isinstance(table, dict) and key in table:
            return float(table[key])
        return None

    @property
    def tau_minus(self) -> Optional[float]:
        return self._metadata_number("spectrum", "tau_minus")

    @property
    def omega0(self) -> Optional[float]:
        return self._metadata_number("spectrum", "omega0")

    def fixed_delay(self, name: str) -> float:
        """Value of a delay held fixed during the scan, 0 when not recorded."""
        value = self._metadata_number("delays", name)
        return 0.0 if value is None else value

    def with_values(self, values: Union[List[float], np.ndarray], **extra_metadata: Any) -> "ScanResult":
        """Returns a scan on the same grid with replaced values and merged metadata."""
        metadata = self.get_metadata()
        metadata.update(extra_metadata)
        return ScanResult(self._axis, self._delays, values, metadata, self.logger)

    def shifted(self, offset: float) -> "ScanResult":
        """Returns a copy with a constant added to every value."""
        return self.with_values(self._values + offset)

    def summary(self) -> Dict[str, float]:
        """Global extrema of the scan."""
        i_min, i_max = int(np.argmin(self._values)), int(np.argmax(self._values))
        return {
            "points": len(self),
            "min": float(self._values[i_min]), "argmin": float(self._delays[i_min]),
            "max": float(self._values[i_max]), "argmax": float(self._delays[i_max]),
        }

    def to_text(self) -> str:
        """
        Serializes the scan.

        A '#'-prefixed TOML header (format version, axis, columns, metadata) is
        followed by one `delay<TAB>value` row per point.
        """
        header = tomlkit.document()
        header["format_version"] = self.FORMAT_VERSION
        header["axis"] = self._axis
        header["unit"] = self.unit
        header["columns"] = [self._axis, "value"]
        header["points"] = len(self)
        header["metadata"] = self._metadata
        lines = ["## pmd_interferometry scan"]
        for line in tomlkit.dumps(header).splitlines():
            lines.append(f"# {line}" if line else "#")
        for x, y in zip(self._delays, self._values):
            lines.append(f"{format(float(x), '.17g')}\t{format(float(y), '.17g')}")
        return "\n".join(lines) + "\n"

    def save(self, filename: Union[str, Path]) -> Path:
        """
        Writes the scan atomically (temporary file in the same folder, then rename).

        Returns:
            The written path.
        """
        path = Path(filename)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_text()
        self.logger.info(f"[SCAN] Saving {len(self)} points to {path}")
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(tmp_name, path)
        except OSError as e:
            self.logger.error(f"[SCAN] Failed to write {path}: {e}")
            if os.path.exists(tmp_name):
                os.remove(tmp_name)
            raise
        return path

    @classmethod
    def from_text(cls, text: str, logger: Optional[logging.Logger] = None) -> "ScanResult":
        """
        Parses the text produced by `to_text`.

        Raises:
            ConfigurationError: If the header is not valid TOML or is incomplete.
            InputDomainError: If a data row cannot be parsed.
        """
        header_lines, delays, values = [], [], []
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.rstrip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:]
                header_lines.append(body[1:] if body.startswith(" ") else body)
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise InputDomainError(f"Line {number}: expected 'delay<TAB>value', got {line!r}.")
            try:
                x, y = float(parts[0]), float(parts[1])
            except ValueError as e:
                raise InputDomainError(f"Line {number}: {e}") from e
            if not (math.isfinite(x) and math.isfinite(y)):
                raise InputDomainError(f"Line {number}: non-finite value.")
            delays.append(x)
            values.append(y)
        try:
            header = tomlkit.parse("\n".join(header_lines)).unwrap()
        except ParseError as e:
            raise ConfigurationError(f"Scan header is not valid TOML: {e}") from e
        if "axis" not in header:
            raise ConfigurationError("Scan header has no 'axis' entry.", "axis")
        result = cls(header["axis"], delays, values, header.get("metadata", {}), logger)
        version = header.get("format_version")
        if version != cls.FORMAT_VERSION:
            result.logger.warning(f"[SCAN] File format version {version}, expected {cls.FORMAT_VERSION}. Loading anyway.")
        return result

    @classmethod
    def load(cls, filename: Union[str, Path], logger: Optional[logging.Logger] = None) -> "ScanResult":
        """Reads a scan written by `save`."""
        path = Path(filename)
        if not path.is_file():
            raise FileNotFoundError(f"Scan file not found: {path}")
        with path.open("r", encoding="utf-8") as f:
            result = cls.from_text(f.read(), logger)
        result.logger.info(f"[SCAN] Loaded {len(result)} points from {path}")
        return result


if __name__ == "__main__":
    # Example usage
    scan = ScanResult("tau1", [-1.0, 0.0, 1.0], [1.0, 0.5, 1.0],
                      {"mode": "type_a", "spectrum": {"omega0": 1.2153, "tau_minus": 1.0}})
    print(scan.to_text())
