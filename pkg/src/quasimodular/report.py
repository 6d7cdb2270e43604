"""Machine-readable check reports shared by the verifiers and the CLI."""

from __future__ import annotations

import json
import platform
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Dict, List

REPORT_SCHEMA_VERSION = 1


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item") and callable(value.item):  # numpy scalar
        return value.item()
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


@dataclass
class Check:
    name: str
    passed: bool
    witness: Dict[str, Any] = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": "pass" if self.passed else "fail",
                "witness": _jsonable(self.witness), "note": self.note}

    @classmethod
    def from_dict(cls, d: dict) -> "Check":
        return cls(d["name"], d["status"] == "pass", dict(d.get("witness", {})), d.get("note", ""))


@dataclass
class Report:
    command: List[str] = field(default_factory=list)
    checks: List[Check] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)
    versions: Dict[str, str] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[Check]:
        return [c for c in self.checks if not c.passed]

    def add(self, name: str, passed: bool, note: str = "", **witness) -> Check:
        check = Check(name, bool(passed), witness, note)
        self.checks.append(check)
        return check

    def extend(self, other: "Report") -> "Report":
        self.checks.extend(other.checks)
        for k, v in other.timing.items():
            self.timing[k] = self.timing.get(k, 0.0) + v
        return self

    def sorted(self) -> "Report":
        self.checks.sort(key=lambda c: c.name)
        return self

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA_VERSION,
            "command": list(self.command),
            "ok": self.ok,
            "checks": [c.to_dict() for c in self.checks],
            "timing": dict(self.timing),
            "versions": dict(self.versions),
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != REPORT_SCHEMA_VERSION:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(list(d["command"]), [Check.from_dict(c) for c in d["checks"]],
                   dict(d.get("timing", {})), dict(d.get("versions", {})))

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            extra = f"  ({c.note})" if c.note else ""
            lines.append(f"[{status}] {c.name}{extra}")
        passed = sum(c.passed for c in self.checks)
        lines.append(f"{passed}/{len(self.checks)} checks passed")
        return "\n".join(lines)


def artifact_versions() -> Dict[str, str]:
    from quasimodular import __version__, kernels
    return {"quasimodular": __version__, "kernel_backend": kernels.BACKEND,
            "python": platform.python_version()}


def as_dict(obj) -> dict:
    return _jsonable(asdict(obj))
