"""Validation reports shared by all modules.

Validators never abort: they collect human-readable violation strings and
leave the decision to raise (or not) to the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = field(default_factory=tuple)
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok and not self.warnings:
            return "valid"
        lines = [f"violation: {v}" for v in self.violations]
        lines += [f"warning: {w}" for w in self.warnings]
        return "\n".join(lines)


class ReportBuilder:
    """Mutable accumulator used while a validator runs."""

    def __init__(self) -> None:
        self._violations: list[str] = []
        self._warnings: list[str] = []

    def violation(self, message: str) -> None:
        self._violations.append(message)

    def warning(self, message: str) -> None:
        self._warnings.append(message)

    def build(self) -> ValidationReport:
        return ValidationReport(tuple(self._violations), tuple(self._warnings))
