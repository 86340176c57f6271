"""
Verification report types for the cluster braiding verifier.
Every check operation returns a CheckReport made of CheckEntry rows.
"""

import json
from enum import Enum
from typing import Dict, List, Optional

import pandas as pd


class CheckStatus(Enum):
    """Enumeration for check outcomes."""
    PASS = "PASS"
    FAIL = "FAIL"
    SKIP = "SKIP"
    INFO = "INFO"


class CheckEntry:
    """
    One verified identity or property.
    """
    def __init__(self, check_id: str, anchor: str, status: CheckStatus,
                 metric: Optional[float] = None, tolerance: Optional[float] = None,
                 runtime: float = 0.0, message: str = "", details: Optional[Dict] = None):
        self.check_id = check_id
        self.anchor = anchor
        self.status = status
        self.metric = metric
        self.tolerance = tolerance
        self.runtime = runtime
        self.message = message
        self.details = details or {}
        self.is_pass = status == CheckStatus.PASS

    @property
    def gates(self) -> bool:
        """INFO and SKIP entries never decide the overall status."""
        return self.status in (CheckStatus.PASS, CheckStatus.FAIL)

    def to_dict(self, include_runtime: bool = False) -> Dict:
        record = {
            "check_id": self.check_id,
            "anchor": self.anchor,
            "status": self.status.value,
            "metric": _plain(self.metric),
            "tolerance": _plain(self.tolerance),
            "message": self.message,
            "details": _plain(self.details),
        }
        if include_runtime:
            record["runtime"] = round(self.runtime, 6)
        return record


def _plain(value):
    """Convert numpy/complex values into JSON-safe builtins."""
    if value is None or isinstance(value, (bool, str, int)):
        return value
    if isinstance(value, float):
        return value if value == value else "nan"
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "tolist"):
        return _plain(value.tolist())
    return str(value)


def check_entry(check_id: str, anchor: str, ok: bool, metric: Optional[float] = None,
                tolerance: Optional[float] = None, message: str = "", **details) -> CheckEntry:
    """Shorthand for a gated PASS/FAIL entry."""
    status = CheckStatus.PASS if ok else CheckStatus.FAIL
    return CheckEntry(check_id, anchor, status, metric, tolerance, message=message, details=details)


class CheckReport:
    """
    Ordered collection of check entries with an overall status.
    """
    def __init__(self, entries: Optional[List[CheckEntry]] = None, title: str = ""):
        self.title = title
        self.entries: List[CheckEntry] = list(entries or [])

    def add(self, entry: CheckEntry) -> CheckEntry:
        self.entries.append(entry)
        return entry

    def extend(self, other: "CheckReport"):
        self.entries.extend(other.entries)

    @property
    def status(self) -> CheckStatus:
        gated = [e for e in self.entries if e.gates]
        if any(not e.is_pass for e in gated):
            return CheckStatus.FAIL
        return CheckStatus.PASS

    @property
    def is_pass(self) -> bool:
        return self.status == CheckStatus.PASS

    def failures(self) -> List[CheckEntry]:
        return [e for e in self.entries if e.status == CheckStatus.FAIL]

    def get(self, check_id: str) -> CheckEntry:
        for entry in self.entries:
            if entry.check_id == check_id:
                return entry
        raise KeyError(check_id)

    def to_dict(self, include_runtime: bool = False) -> Dict:
        ordered = sorted(self.entries, key=lambda e: e.check_id)
        return {
            "title": self.title,
            "status": self.status.value,
            "entries": [e.to_dict(include_runtime) for e in ordered],
        }

    def to_json(self, pretty: bool = False, include_runtime: bool = False) -> str:
        """Deterministic serialisation: sorted keys, entries sorted by check-id."""
        return json.dumps(self.to_dict(include_runtime), sort_keys=True, indent=2 if pretty else None)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {
                "check_id": e.check_id,
                "status": e.status.value,
                "metric": e.metric,
                "tolerance": e.tolerance,
                "runtime": e.runtime,
                "anchor": e.anchor,
            }
            for e in sorted(self.entries, key=lambda e: e.check_id)
        ]
        return pd.DataFrame(rows, columns=["check_id", "status", "metric", "tolerance", "runtime", "anchor"])

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        return f"CheckReport({self.title!r}, {self.status.value}, {len(self.entries)} entries)"
