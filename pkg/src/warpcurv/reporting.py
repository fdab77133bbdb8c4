"""Small report containers shared by profile builders, verifiers, and the CLI.

A report is a flat list of named checks.  Each check stores the measured
worst-case value and the bound it was compared against, so failures are
diagnosable from the serialized report alone.  Checks marked ``required=False``
are informational: they are printed and serialized but do not gate the
report's overall pass flag.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckEntry:
    name: str                 # stable identifier, e.g. "tail_exact_log_slope"
    passed: bool              # outcome of the comparison below
    measured: float           # worst observed value (sup/inf as appropriate)
    bound: float              # the threshold compared against
    comparison: str = "<="    # how measured relates to bound when passing
    required: bool = True     # informational entries don't gate the report
    detail: str = ""          # free-form context (grid, argmax location, ...)

    def format_line(self) -> str:
        tag = "PASS" if self.passed else ("FAIL" if self.required else "info")
        extra = f"  [{self.detail}]" if self.detail else ""
        return (f"{tag:4s} {self.name}: measured {self.measured:.6e} "
                f"{self.comparison} {self.bound:.6e}{extra}")


@dataclass
class Report:
    title: str
    entries: list[CheckEntry] = field(default_factory=list)
    data: dict[str, Any] = field(default_factory=dict)  # extra payload (maxima, argmaxes, ...)

    def add(self, entry: CheckEntry) -> None:
        self.entries.append(entry)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries if e.required)

    def entry(self, name: str) -> CheckEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def format_lines(self) -> list[str]:
        lines = [f"== {self.title}: {'PASS' if self.passed else 'FAIL'} =="]
        lines.extend(e.format_line() for e in self.entries)
        return lines

    def to_dict(self) -> dict[str, Any]:
        return {
            "title": self.title,
            "passed": self.passed,
            "entries": [vars(e) for e in self.entries],
            "data": self.data,
        }
