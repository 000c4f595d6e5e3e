"""Report records produced by the verification suites."""

from dataclasses import dataclass, field
from typing import Any, Dict, List


@dataclass(frozen=True, order=True)
class Failure:
    """
    One failed check.

    Attributes
    ----------
    family : str
        Relation family or lemma the check belongs to.
    instance : str
        Instance key, unique within the family.
    detail : str
        Human-readable description of the mismatch.
    """

    family: str
    instance: str
    detail: str = ""

    def to_dict(self) -> dict:
        """Serialize failure to dictionary."""
        return {"family": self.family, "instance": self.instance, "detail": self.detail}

    @classmethod
    def from_dict(cls, data: dict) -> "Failure":
        """Deserialize failure from dictionary."""
        return cls(family=data["family"], instance=data["instance"], detail=data.get("detail", ""))


@dataclass
class SuiteReport:
    """
    Outcome of a batch of independent checks.

    Attributes
    ----------
    suite : str
        Suite name.
    instances : int
        Number of checks run (vacuous instances are not counted).
    failures : List[Failure]
        Failed checks, sorted by family and instance.
    details : Dict[str, Any]
        Extra suite-specific values (counts, lengths, flags).
    """

    suite: str
    instances: int = 0
    failures: List[Failure] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, family: str, instance: str, ok: bool, detail: str = "") -> None:
        """Count one check, keeping it as a failure when ``ok`` is false."""
        self.instances += 1
        if not ok:
            self.failures.append(Failure(family, instance, detail))

    def count_families(self) -> Dict[str, int]:
        counts: Dict[str, int] = {}
        for f in self.failures:
            counts[f.family] = counts.get(f.family, 0) + 1
        return counts

    def merge(self, other: "SuiteReport") -> "SuiteReport":
        """Combine two reports under this report's name."""
        details = dict(self.details)
        details.update(other.details)
        return SuiteReport(
            suite=self.suite,
            instances=self.instances + other.instances,
            failures=sorted(self.failures + other.failures),
            details=details,
        )

    def to_dict(self) -> dict:
        """Serialize report to dictionary with deterministic ordering."""
        return {
            "suite": self.suite,
            "instances": self.instances,
            "failures": [f.to_dict() for f in sorted(self.failures)],
            "details": {k: self.details[k] for k in sorted(self.details)},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SuiteReport":
        """Deserialize report from dictionary."""
        return cls(
            suite=data["suite"],
            instances=int(data["instances"]),
            failures=[Failure.from_dict(f) for f in data.get("failures", [])],
            details=dict(data.get("details", {})),
        )

    def summary(self) -> str:
        """One-paragraph text rendering."""
        status = "PASS" if self.passed else "FAIL"
        counts = f"{self.instances} instances, {len(self.failures)} failures"
        lines = [f"{self.suite}: {status} ({counts})"]
        for key in sorted(self.details):
            lines.append(f"  {key}: {self.details[key]}")
        for f in sorted(self.failures):
            lines.append(f"  - [{f.family}] {f.instance}: {f.detail}")
        return "\n".join(lines)
