"""Findings reported by the loader and the validators."""

from __future__ import annotations

import json
from dataclasses import dataclass

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    code: str
    path: str
    offset: int | None
    message: str

    @property
    def location(self) -> tuple:
        return (self.path, self.offset)

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def to_text(self) -> str:
        where = self.path if self.offset is None else f"{self.path}@{self.offset}"
        return f"{self.severity}: {self.code}: {where}: {self.message}"

    def to_record(self) -> dict:
        return {"severity": self.severity, "code": self.code, "path": self.path,
                "offset": self.offset, "message": self.message}

    def to_json(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True)


def has_errors(diagnostics) -> bool:
    return any(d.severity == ERROR for d in diagnostics)
