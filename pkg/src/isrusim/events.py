"""Append-only JSON-lines event log shared by one simulation run.

Every protocol message, every mineral lifecycle event and (at debug
verbosity) every per-tick robot snapshot is one record.  A finished log is
self-contained: metrics and the protocol verifier work from the log alone,
never from live simulation state.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Iterator


class LogParseError(ValueError):
    """A log line that is not valid JSON or not a known record."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        super().__init__(message if line_number is None
                         else f"line {line_number}: {message}")


def _encode(record: dict) -> str:
    # -inf (the busy-bid sentinel) is not valid JSON; ship it as a string.
    safe = {k: ("-inf" if isinstance(v, float) and v == float("-inf") else v)
            for k, v in record.items()}
    return json.dumps(safe, separators=(",", ":"), allow_nan=False)


def _decode(line: str, line_number: int) -> dict:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise LogParseError(f"invalid JSON ({exc.msg})", line_number) from exc
    if not isinstance(record, dict) or "type" not in record:
        raise LogParseError("record is not an object with a 'type' field",
                            line_number)
    if record.get("utility") == "-inf":
        record["utility"] = float("-inf")
    return record


class EventLog:
    """In-memory record list with JSONL dump/load."""

    def __init__(self) -> None:
        self.records: list[dict] = []

    def append(self, record: dict) -> None:
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[dict]:
        return iter(self.records)

    def dump_jsonl(self, path: str | Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w") as fh:
            for record in self.records:
                fh.write(_encode(record))
                fh.write("\n")

    def dumps(self) -> bytes:
        """The exact bytes dump_jsonl would write (for determinism checks)."""
        return "".join(_encode(r) + "\n" for r in self.records).encode()

    @staticmethod
    def load_jsonl(path: str | Path) -> "EventLog":
        log = EventLog()
        with Path(path).open() as fh:
            for line_number, line in enumerate(fh, start=1):
                if line.strip():
                    log.append(_decode(line, line_number))
        return log

    @staticmethod
    def from_records(records: Iterable[dict]) -> "EventLog":
        log = EventLog()
        log.records = list(records)
        return log
