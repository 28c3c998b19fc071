"""Versioned JSON report documents shared by every CLI command."""

from __future__ import annotations

import json
from typing import Any

SCHEMA_VERSION = "1.0.0"

#: JSON Schema (draft 2020-12) for every document the CLI writes in JSON mode.
SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "$id": "syzflow-report-1.0.0",
    "title": "syzflow report document",
    "type": "object",
    "required": ["schema_version", "command", "items", "summary"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "command": {
            "type": "object",
            "required": ["command"],
            "properties": {
                "command": {"enum": ["verify", "deta", "hasse", "census", "orbit", "flow"]},
            },
        },
        "items": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["passed"],
                "properties": {"passed": {"type": "boolean"}},
            },
        },
        "summary": {
            "type": "object",
            "required": ["total", "passed", "failed", "seconds"],
            "additionalProperties": False,
            "properties": {
                "total": {"type": "integer", "minimum": 0},
                "passed": {"type": "integer", "minimum": 0},
                "failed": {"type": "integer", "minimum": 0},
                "seconds": {"type": "number", "minimum": 0},
            },
        },
    },
}

#: keys holding wall-clock timings (the only non-deterministic content)
TIMING_KEYS = frozenset({"seconds"})


def dumps(obj: Any) -> str:
    """Canonical serialisation: sorted keys, two-space indent, UTF-8 text, final newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def strip_timings(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: strip_timings(v) for k, v in obj.items() if k not in TIMING_KEYS}
    if isinstance(obj, list):
        return [strip_timings(v) for v in obj]
    return obj


class ReportDoc:
    def __init__(self, command: dict):
        self.command = command
        self.items: list[dict] = []
        self.seconds = 0.0

    def add(self, item: dict) -> None:
        self.items.append(item)

    def all_passed(self) -> bool:
        return all(i.get("passed") for i in self.items)

    def to_dict(self) -> dict:
        passed = sum(1 for i in self.items if i.get("passed"))
        return {
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "items": self.items,
            "summary": {"total": len(self.items), "passed": passed,
                        "failed": len(self.items) - passed, "seconds": round(self.seconds, 6)},
        }

    def to_text(self) -> str:
        d = self.to_dict()
        lines = [f"{self.command['command']}: {d['summary']['passed']}/{d['summary']['total']} passed"]
        for item in self.items:
            mark = "PASS" if item.get("passed") else "FAIL"
            body = ", ".join(f"{k}={v}" for k, v in sorted(item.items())
                             if k != "passed" and not isinstance(v, (dict, list)))
            lines.append(f"  [{mark}] {body}")
        return "\n".join(lines) + "\n"
