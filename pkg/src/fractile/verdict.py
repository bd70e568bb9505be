"""Three-valued verdicts for the numeric separation/compatibility checks.

Every decision in this package is made on floating-point approximations of
open/closed-set statements, so checks never return a bare bool.  A verdict
records the outcome, the tolerance it was decided at, the approximation
depth of the data it was decided on, and (for violations) a witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

HOLDS = "holds"
VIOLATED = "violated"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    status: str
    #: tolerance the decision was made at (measure or distance units)
    tolerance: float = 0.0
    #: decision margin: distance of the measured quantity from the threshold
    margin: float = 0.0
    reason: str = ""
    #: free-form evidence: overlap measures, index pairs, witness points, ...
    witness: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in (HOLDS, VIOLATED, INCONCLUSIVE):
            raise ValueError(f"bad verdict status {self.status!r}")

    @classmethod
    def holds(cls, tolerance: float = 0.0, margin: float = 0.0,
              reason: str = "", **witness: Any) -> "Verdict":
        return cls(HOLDS, tolerance, margin, reason, dict(witness))

    @classmethod
    def violated(cls, tolerance: float = 0.0, margin: float = 0.0,
                 reason: str = "", **witness: Any) -> "Verdict":
        return cls(VIOLATED, tolerance, margin, reason, dict(witness))

    @classmethod
    def inconclusive(cls, reason: str, tolerance: float = 0.0,
                     **witness: Any) -> "Verdict":
        return cls(INCONCLUSIVE, tolerance, 0.0, reason, dict(witness))

    @property
    def is_holds(self) -> bool:
        return self.status == HOLDS

    @property
    def is_violated(self) -> bool:
        return self.status == VIOLATED

    @property
    def decided(self) -> bool:
        return self.status != INCONCLUSIVE

    def describe(self) -> str:
        bits = [self.status]
        if self.reason:
            bits.append(self.reason)
        if self.witness:
            pretty = ", ".join(f"{k}={_fmt(v)}" for k, v in sorted(self.witness.items()))
            bits.append(pretty)
        return "; ".join(bits)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return format(value, ".9g")
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_fmt(v) for v in value) + ")"
    return str(value)
