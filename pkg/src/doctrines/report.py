"""Validation reports: violations are data, not exceptions.

Validators walk a structure and record every broken law together with a
witness, so a deliberately broken input can be inspected.  A report may also
carry "undecided" entries when a check ran out of proof budget; those are
kept separate because they are not refutations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple


@dataclass(frozen=True)
class Violation:
    rule: str
    witness: Tuple = ()

    def __str__(self) -> str:
        if not self.witness:
            return self.rule
        return f"{self.rule}: {', '.join(map(repr, self.witness))}"


@dataclass
class ValidationReport:
    subject: str = ""
    violations: List[Violation] = field(default_factory=list)
    undecided: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.undecided

    @property
    def failed(self) -> bool:
        return bool(self.violations)

    def fail(self, rule: str, *witness) -> None:
        self.violations.append(Violation(rule, tuple(witness)))

    def defer(self, rule: str, *witness) -> None:
        """Record a check that could not be decided within budget."""
        self.undecided.append(Violation(rule, tuple(witness)))

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        self.violations.extend(other.violations)
        self.undecided.extend(other.undecided)
        return self

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "ok": self.ok,
            "violations": [str(v) for v in self.violations],
            "undecided": [str(v) for v in self.undecided],
        }

    def __str__(self) -> str:
        if self.ok:
            return f"{self.subject or 'report'}: ok"
        lines = [f"{self.subject or 'report'}: {len(self.violations)} violation(s),"
                 f" {len(self.undecided)} undecided"]
        lines += [f"  FAIL {v}" for v in self.violations]
        lines += [f"  ?    {v}" for v in self.undecided]
        return "\n".join(lines)
