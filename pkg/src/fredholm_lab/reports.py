"""Identity-check reports shared by every verifier."""

from __future__ import annotations

from dataclasses import dataclass, field

from fredholm_lab.errors import FormulaViolation


@dataclass(frozen=True)
class Check:
    """One identity ``lhs == rhs`` (integers, or booleans for equivalences)."""

    name: str
    lhs: object
    rhs: object

    @property
    def passed(self) -> bool:
        return self.lhs == self.rhs

    def to_dict(self):
        return {"name": self.name, "lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    values: dict = field(default_factory=dict)

    def add(self, name, lhs, rhs):
        self.checks.append(Check(name, lhs, rhs))
        return self

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def raise_on_failure(self):
        if not self.passed:
            raise FormulaViolation(self)
        return self

    def to_dict(self):
        return {
            "title": self.title,
            "pass": self.passed,
            "values": dict(self.values),
            "checks": [c.to_dict() for c in self.checks],
        }
