"""Structured outcomes of mechanical checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .lattice import Node


@dataclass(frozen=True)
class Violation:
    check: str
    node: Node | None = None
    buyer: int | None = None
    expected: Any = None
    actual: Any = None
    detail: str = ""

    def __str__(self) -> str:
        where = self.node.label() if self.node is not None else "-"
        who = f" buyer {self.buyer}" if self.buyer is not None else ""
        msg = f"[{self.check}] at {where}{who}: expected {_fmt(self.expected)}, got {_fmt(self.actual)}"
        if self.detail:
            msg += f" ({self.detail})"
        return msg

    def to_dict(self) -> dict[str, Any]:
        return {
            "check": self.check,
            "node": None if self.node is None else [self.node.x1, self.node.x2],
            "buyer": self.buyer,
            "expected": _fmt(self.expected),
            "actual": _fmt(self.actual),
            "detail": self.detail,
        }


@dataclass
class CheckReport:
    """Violations found by one named check, plus how many cases were examined."""

    name: str
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    notes: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, violation: Violation) -> None:
        self.violations.append(violation)

    def expect(self, ok: bool, **kwargs: Any) -> bool:
        """Count one case; record a violation when ``ok`` is false."""
        self.checked += 1
        if not ok:
            self.violations.append(Violation(check=kwargs.pop("check", self.name), **kwargs))
        return ok

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.checked += other.checked
        self.violations.extend(other.violations)
        return self

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.checked} cases, {len(self.violations)} violations"

    def to_dict(self, limit: int = 50) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "violation_count": len(self.violations),
            "violations": [v.to_dict() for v in self.violations[:limit]],
            "notes": {k: _fmt(v) for k, v in sorted(self.notes.items())},
        }


def _fmt(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_fmt(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _fmt(v) for k, v in sorted(value.items(), key=lambda kv: str(kv[0]))}
    return value
