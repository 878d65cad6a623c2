"""Verification report values shared by the check pipelines and the CLI.

Reports are deterministic: identical inputs give identical content except for
the elapsed-time field. JSON encoding renders exact rationals as "p/q" strings
and integers beyond IEEE-double range as decimal strings so downstream
consumers never overflow.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from fractions import Fraction

_BIG = 1 << 53
_INT_RE = re.compile(r"^-?\d+$")
_FRAC_RE = re.compile(r"^-?\d+/\d+$")


def encode_value(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return str(v) if abs(v) >= _BIG else v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else encode_value(v.numerator)
    if isinstance(v, str):
        return v
    if isinstance(v, dict):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [encode_value(x) for x in v]
    return str(v)


def decode_value(v):
    if isinstance(v, str):
        if _INT_RE.match(v):
            return int(v)
        if _FRAC_RE.match(v):
            return Fraction(v)
        return v
    if isinstance(v, dict):
        return {k: decode_value(x) for k, x in v.items()}
    if isinstance(v, list):
        return [decode_value(x) for x in v]
    return v


@dataclass
class VerificationReport:
    task: str
    status: str = "pass"
    instances: int = 0
    counterexamples: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    elapsed_ms: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def fail(self, counterexample: dict):
        """Record one counterexample with full reproduction data."""
        self.status = "fail"
        self.counterexamples.append(counterexample)

    def tick(self, k: int = 1):
        self.instances += k

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "status": self.status,
            "instances": self.instances,
            "counterexamples": encode_value(self.counterexamples),
            "params": encode_value(self.params),
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        return cls(
            task=d["task"],
            status=d["status"],
            instances=d["instances"],
            counterexamples=decode_value(d.get("counterexamples", [])),
            params=decode_value(d.get("params", {})),
            elapsed_ms=d.get("elapsed_ms", 0),
        )

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def equivalent(self, other: "VerificationReport") -> bool:
        """Equality modulo the elapsed-time field."""
        a, b = self.to_dict(), other.to_dict()
        a.pop("elapsed_ms")
        b.pop("elapsed_ms")
        return a == b

    def to_text(self) -> str:
        lines = [
            f"task        {self.task}",
            f"status      {self.status}",
            f"instances   {self.instances}",
            f"elapsed_ms  {self.elapsed_ms}",
        ]
        if self.params:
            lines.append("params:")
            for k, v in self.params.items():
                lines.append(f"  {k:<24} {encode_value(v)}")
        if self.counterexamples:
            lines.append(f"counterexamples ({len(self.counterexamples)}):")
            for ce in self.counterexamples[:20]:
                lines.append(f"  {encode_value(ce)}")
        return "\n".join(lines)


class timed:
    """Context manager stamping elapsed_ms onto a report."""

    def __init__(self, report: VerificationReport):
        self.report = report

    def __enter__(self):
        self._t0 = time.monotonic()
        return self.report

    def __exit__(self, *exc):
        self.report.elapsed_ms = int((time.monotonic() - self._t0) * 1000)
        return False
