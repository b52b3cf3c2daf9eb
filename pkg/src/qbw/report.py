"""Verification result record shared by the checking modules."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class DesignReport:
    kind: str
    passed: bool
    params: tuple = ()
    witness: tuple | None = None
    detail: dict[str, Any] = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "pass": self.passed,
            "params": [_plain(p) for p in self.params],
            "witness": None if self.witness is None else [_plain(w) for w in self.witness],
            "detail": {k: _plain(v) for k, v in self.detail.items()},
        }

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        params = ",".join(str(_plain(p)) for p in self.params)
        tail = f" witness={self.witness}" if self.witness is not None and not self.passed else ""
        return f"{self.kind}: {status} ({params}){tail}"


def _plain(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    if isinstance(x, (list, tuple)):
        return [_plain(y) for y in x]
    if isinstance(x, (set, frozenset)):
        return sorted(_plain(y) for y in x)
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (int, float, str, bool)) or x is None:
        return x
    return str(x)
