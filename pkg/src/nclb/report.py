"""Check-report records shared by the verification pipelines and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class CheckRecord:
    check: str
    status: str
    max_residual: float | None = None
    samples_used: int = 0
    seed: int | None = None
    skipped_samples: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == PASS

    def to_dict(self):
        doc = {
            "check": self.check,
            "status": self.status,
            "max_residual": self.max_residual,
            "samples_used": self.samples_used,
            "seed": self.seed,
            "skipped_samples": self.skipped_samples,
        }
        if self.detail:
            doc["detail"] = self.detail
        return doc


class VerificationError(RuntimeError):
    """A strict verification run found failing checks."""

    def __init__(self, records):
        self.records = records
        bad = [r.check for r in records if not r.passed]
        super().__init__(f"failing checks: {', '.join(bad)}")


def overall_status(records):
    statuses = [r.status for r in records]
    if any(s == FAIL for s in statuses):
        return FAIL
    if any(s == INCONCLUSIVE for s in statuses):
        return INCONCLUSIVE
    return PASS
