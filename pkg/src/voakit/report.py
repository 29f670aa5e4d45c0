"""Machine-readable run reports with a stable, diffable schema.

Reports are JSON with sorted keys; the only fields that vary between
reruns of an identical configuration are the ``elapsed_ms`` timings.
Every FAIL record carries a concrete witness with both computed sides.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

ENGINE_VERSION = "0.1.0"

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE_AT_CUTOFF"


@dataclass
class CheckResult:
    check_id: str
    certifies: str
    verdict: str
    witness: dict | None = None
    elapsed_ms: float = 0.0

    def to_dict(self):
        return {
            "id": self.check_id,
            "certifies": self.certifies,
            "verdict": self.verdict,
            "witness": _sanitize(self.witness),
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _sanitize(value):
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return round(value, 6)
    if isinstance(value, dict):
        return {str(k): _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    return repr(value)


@dataclass
class Report:
    config: dict
    checks: list = field(default_factory=list)

    def add(self, result):
        self.checks.append(result)

    @property
    def summary(self):
        counts = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for c in self.checks:
            counts[c.verdict] = counts.get(c.verdict, 0) + 1
        return {"pass": counts[PASS], "fail": counts[FAIL],
                "inconclusive": counts[INCONCLUSIVE], "total": len(self.checks)}

    def exit_code(self):
        s = self.summary
        if s["fail"]:
            return 1
        if s["inconclusive"]:
            return 2
        return 0

    def to_dict(self):
        return {
            "engine": {"name": "voakit", "version": ENGINE_VERSION},
            "config": _sanitize(self.config),
            "checks": [c.to_dict() for c in self.checks],
            "summary": self.summary,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def emit_report(report, path):
    """Write the report; stable key order for diffability."""
    text = report.to_json()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
