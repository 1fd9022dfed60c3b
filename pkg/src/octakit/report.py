"""Run reports and their text and JSON renderings.

Both renderings parse back to an identical report. The text form is one
``key: value`` line per entry, grouped under section headers, with every value
written as compact JSON so that nothing is lost.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

SECTIONS = ("inputs", "residuals", "verdicts", "data", "timings")


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)  # name -> sha256 of contents
    residuals: dict = field(default_factory=dict)  # stage -> float
    verdicts: dict = field(default_factory=dict)  # name -> bool
    data: dict = field(default_factory=dict)  # JSON-compatible values
    timings: dict = field(default_factory=dict)  # stage -> seconds, only when requested
    exit_code: int = 0
    messages: list = field(default_factory=list)

    def add_input(self, name: str, contents: bytes | str) -> None:
        if isinstance(contents, str):
            contents = contents.encode("utf-8")
        self.inputs[name] = hashlib.sha256(contents).hexdigest()

    def to_dict(self) -> dict:
        out = {"command": self.command, "exit_code": self.exit_code}
        for name in SECTIONS:
            out[name] = getattr(self, name)
        out["messages"] = list(self.messages)
        return out

    @classmethod
    def from_dict(cls, doc: dict) -> "RunReport":
        return cls(
            command=doc["command"],
            exit_code=doc.get("exit_code", 0),
            messages=list(doc.get("messages", [])),
            **{name: dict(doc.get(name, {})) for name in SECTIONS},
        )


def _dump(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=True)


def emit_report(r: RunReport, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(r.to_dict(), sort_keys=True, indent=2, allow_nan=True) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")
    lines = [f"command: {_dump(r.command)}", f"exit_code: {r.exit_code}"]
    for name in SECTIONS:
        section = getattr(r, name)
        lines.append(f"[{name}]")
        for key in sorted(section):
            lines.append(f"  {_dump(key)}: {_dump(section[key])}")
    lines.append("[messages]")
    for msg in r.messages:
        lines.append(f"  {_dump(msg)}")
    return "\n".join(lines) + "\n"


def parse_report(text: str) -> RunReport:
    """Inverse of :func:`emit_report` for either format."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return RunReport.from_dict(json.loads(stripped))
    doc: dict = {name: {} for name in SECTIONS}
    doc["messages"] = []
    section = None
    decoder = json.JSONDecoder()
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1]
            continue
        if section is None:
            key, _, value = line.partition(": ")
            doc[key] = json.loads(value)
        elif section == "messages":
            doc["messages"].append(json.loads(line.strip()))
        else:
            body = line.strip()
            key, end = decoder.raw_decode(body)
            if body[end : end + 2] != ": ":
                raise ValueError(f"malformed report line: {line!r}")
            doc[section][key] = json.loads(body[end + 2 :])
    return RunReport.from_dict(doc)
