# Standard imports
import os
import math
import logging
import tempfile
from collections import OrderedDict
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import Dict, Any, List, Optional, Union
# Local imports
from .errors import InputDomainError, ConfigurationError
from .logger_utils import LoggerUtils
# Third-party imports
import tomlkit
from tomlkit.exceptions import ParseError


@dataclass(frozen=True)
class Estimate:
    """A recovered parameter with its one-sigma uncertainty and the procedure that produced it."""
    value: float
    uncertainty: float
    unit: str
    method: str

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise InputDomainError(f"Estimate value must be finite, got {self.value}.")
        if not self.uncertainty >= 0:
            raise InputDomainError(f"Estimate uncertainty must be >= 0, got {self.uncertainty}.")

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class BranchSet:
    """
    Every solution of value = principal[i] + n * period, n integer.

    An indeterminate set carries no principal values.
    """
    principal: List[float]
    period: float
    unit: str
    method: str
    indeterminate: bool = False

    def solutions(self, low: float, high: float) -> List[float]:
        """All members of the set inside [low, high], sorted."""
        if self.indeterminate:
            return []
        values = []
        for p in self.principal:
            n = math.ceil((low - p) / self.period)
            while p + n * self.period <= high:
                values.append(p + n * self.period)
                n += 1
        return sorted(values)

    def contains(self, value: float, tolerance: float) -> bool:
        """True if some member lies within `tolerance` of `value`."""
        if self.indeterminate:
            return False
        for p in self.principal:
            offset = (value - p) % self.period
            if min(offset, self.period - offset) <= tolerance:
                return True
        return False

    def to_dict(self) -> Dict[str, Any]:
        values = asdict(self)
        values["principal"] = list(self.principal)
        return values


class RecoveryReport:
    """
    Parameters recovered from one or more scans.

    Serialized as TOML: a commented human summary, then the estimates,
    branch sets, residuals and notes as tables.
    """
    FORMAT_VERSION = "1.0"

    def __init__(self, protocol: str, logger: Optional[logging.Logger] = None):
        self.logger = logger if logger else LoggerUtils.get_logger()
        self.protocol = protocol
        self.estimates: "OrderedDict[str, Estimate]" = OrderedDict()
        self.branches: "OrderedDict[str, BranchSet]" = OrderedDict()
        self.residuals: "OrderedDict[str, float]" = OrderedDict()
        self.notes: List[str] = []

    def add_estimate(self, name: str, value: float, uncertainty: float, unit: str, method: str) -> Estimate:
        estimate = Estimate(float(value), float(uncertainty), unit, method)
        self.estimates[name] = estimate
        self.logger.info(f"[RECOVERY] {name} = {value:.6g} +/- {uncertainty:.2g} {unit} ({method})")
        return estimate

    def add_branch_set(self, name: str, branch_set: BranchSet) -> None:
        self.branches[name] = branch_set
        if branch_set.indeterminate:
            self.logger.warning(f"[RECOVERY] {name} is indeterminate ({branch_set.method})")

    def add_residual(self, name: str, value: float) -> None:
        self.residuals[name] = float(value)

    def add_note(self, note: str) -> None:
        self.notes.append(note)

    def __getitem__(self, name: str) -> Estimate:
        return self.estimates[name]

    def __contains__(self, name: str) -> bool:
        return name in self.estimates

    def value(self, name: str) -> float:
        return self.estimates[name].value

    def merge(self, other: "RecoveryReport") -> "RecoveryReport":
        """Adds the other report's entries, keeping this report's protocol."""
        self.estimates.update(other.estimates)
        self.branches.update(other.branches)
        self.residuals.update(other.residuals)
        self.notes.extend(other.notes)
        return self

    def summary_lines(self) -> List[str]:
        lines = [f"Recovery report ({self.protocol})"]
        for name, e in self.estimates.items():
            lines.append(f"{name} = {e.value:.6g} +/- {e.uncertainty:.2g} {e.unit}  [{e.method}]")
        for name, b in self.branches.items():
            if b.indeterminate:
                lines.append(f"{name}: indeterminate  [{b.method}]")
            else:
                principal = ", ".join(f"{p:.6g}" for p in b.principal)
                lines.append(f"{name} in {{{principal}}} + n * {b.period:.6g} {b.unit}  [{b.method}]")
        for name, r in self.residuals.items():
            lines.append(f"residual {name} = {r:.3g}")
        return lines

    def to_text(self) -> str:
        doc = tomlkit.document()
        for line in self.summary_lines():
            doc.add(tomlkit.comment(line))
        doc.add(tomlkit.nl())
        doc["format_version"] = self.FORMAT_VERSION
        doc["protocol"] = self.protocol
        estimates = tomlkit.table()
        for name, e in self.estimates.items():
            estimates[name] = e.to_dict()
        doc["estimates"] = estimates
        if self.branches:
            branches = tomlkit.table()
            for name, b in self.branches.items():
                branches[name] = b.to_dict()
            doc["branches"] = branches
        if self.residuals:
            doc["residuals"] = dict(self.residuals)
        doc["notes"] = list(self.notes)
        return tomlkit.dumps(doc)

    def save(self, filename: Union[str, Path]) -> Path:
        """Writes the report atomically."""
        path = Path(filename)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = self.to_text()
        fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=str(path.parent))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            os.replace(tmp_name, path)
        except OSError as e:
            self.logger.error(f"[RECOVERY] Failed to write {path}: {e}")
            if os.path.exists(tmp_name):
                os.remove(tmp_name)
            raise
        self.logger.info(f"[RECOVERY] Report written to {path}")
        return path

    @classmethod
    def from_text(cls, text: str, logger: Optional[logging.Logger] = None) -> "RecoveryReport":
        try:
            data = tomlkit.parse(text).unwrap()
        except ParseError as e:
            raise ConfigurationError(f"Report is not valid TOML: {e}") from e
        if "protocol" not in data:
            raise ConfigurationError("Report has no protocol entry.", "protocol")
        report = cls(data["protocol"], logger)
        for name, e in data.get("estimates", {}).items():
            report.estimates[name] = Estimate(**e)
        for name, b in data.get("branches", {}).items():
            report.branches[name] = BranchSet(**b)
        report.residuals.update(data.get("residuals", {}))
        report.notes.extend(data.get("notes", []))
        return report


if __name__ == "__main__":
    # Example usage
    report = RecoveryReport("type_a")
    report.add_estimate("dalpha", 0.05, 1e-5, "fs/um", "tau1 dip center")
    report.add_branch_set("dk0_visibility", BranchSet([0.002, -0.002], 2 * math.pi / 100.0, "rad/um", "dip visibility"))
    print(report.to_text())
