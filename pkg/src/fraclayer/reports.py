"""Check records and deterministic JSON report serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, is_dataclass, asdict
from typing import Any

import numpy as np


def _fmt(v: Any) -> Any:
    """Floats to 17 significant digits so reports are byte-reproducible."""
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.17g}")
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_fmt(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _fmt(x) for k, x in v.items()}
    if isinstance(v, (bool, str)) or v is None:
        return v
    if is_dataclass(v):
        return _fmt(asdict(v))
    return str(v)


@dataclass
class Report:
    """One run: configuration echo plus one record per executed check."""

    run_id: str
    config_echo: dict
    checks: list = field(default_factory=list)

    def add(self, id: str, passed: bool, worst_slack: float,
            location: str = "", statement: str = "") -> None:
        self.checks.append({
            "id": id,
            "statement": statement or id,
            "pass": bool(passed),
            "worst-slack": float(worst_slack),
            "location": location,
        })

    def add_records(self, records, statement: str = "") -> None:
        for r in records:
            self.add(r.id, r.passed, r.worst_slack,
                     getattr(r, "location", ""), statement)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c["pass"]]

    def summary_line(self) -> str:
        n_fail = len(self.failures())
        status = "PASS" if n_fail == 0 else f"FAIL({n_fail})"
        return f"{self.run_id}: {status} [{len(self.checks)} checks]"

    def to_json(self) -> str:
        payload = {
            "run-id": self.run_id,
            "config-echo": _fmt(self.config_echo),
            "checks": _fmt(self.checks),
        }
        return json.dumps(payload, indent=1, sort_keys=True)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
            fh.write("\n")
