"""Deterministic simulated HID transport.

Replay logs are UTF-8 JSONL, one record per line with exactly the fields
``t_ms`` (integer, non-decreasing), ``reportId`` (0-255) and ``data``
(lowercase hex, even length, non-empty).  Replay advances a virtual clock and
injects each record as an input report; no wall-clock time is involved, so
runs are reproducible and effectively instant.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Union

__all__ = [
    "VirtualClock",
    "ReplayRecord",
    "ReplayError",
    "ReplayParseError",
    "NonMonotoneTimestampError",
    "load_replay",
    "save_replay",
    "run_replay",
]


class ReplayError(ValueError):
    pass


class ReplayParseError(ReplayError):
    """Malformed record; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NonMonotoneTimestampError(ReplayError):
    def __init__(self, line_no: int, t_ms: int, previous: int) -> None:
        super().__init__(f"line {line_no}: t_ms {t_ms} < previous {previous}")
        self.line_no = line_no


class VirtualClock:
    """Milliseconds counter that only moves forward."""

    def __init__(self, start_ms: int = 0) -> None:
        self._now_ms = start_ms

    @property
    def now_ms(self) -> int:
        return self._now_ms

    def advance_to(self, t_ms: int) -> None:
        if t_ms < self._now_ms:
            raise ValueError(f"clock cannot move back from {self._now_ms} to {t_ms}")
        self._now_ms = t_ms

    def advance_by(self, delta_ms: int) -> None:
        if delta_ms < 0:
            raise ValueError("negative clock advance")
        self._now_ms += delta_ms


@dataclass(frozen=True)
class ReplayRecord:
    t_ms: int
    report_id: int
    data: bytes


_LOWER_HEX_RE = re.compile(r"^(?:[0-9a-f]{2})+$")
_RECORD_KEYS = {"t_ms", "reportId", "data"}


def _parse_record(line_no: int, line: str, previous_t: Optional[int]) -> ReplayRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayParseError(line_no, f"invalid JSON: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ReplayParseError(line_no, "record is not a JSON object")
    if set(obj) != _RECORD_KEYS:
        raise ReplayParseError(
            line_no, f"record keys must be exactly t_ms/reportId/data, got {sorted(obj)}"
        )
    t_ms = obj["t_ms"]
    report_id = obj["reportId"]
    data_hex = obj["data"]
    if not isinstance(t_ms, int) or isinstance(t_ms, bool) or t_ms < 0:
        raise ReplayParseError(line_no, f"t_ms must be a non-negative integer, got {t_ms!r}")
    if not isinstance(report_id, int) or isinstance(report_id, bool) or not 0 <= report_id <= 255:
        raise ReplayParseError(line_no, f"reportId must be an integer 0-255, got {report_id!r}")
    if not isinstance(data_hex, str) or not _LOWER_HEX_RE.match(data_hex):
        raise ReplayParseError(
            line_no, "data must be non-empty lowercase hex of even length"
        )
    if previous_t is not None and t_ms < previous_t:
        raise NonMonotoneTimestampError(line_no, t_ms, previous_t)
    return ReplayRecord(t_ms=t_ms, report_id=report_id, data=bytes.fromhex(data_hex))


def load_replay(source: Union[str, "os.PathLike[str]", IO[str]]) -> list[ReplayRecord]:
    """Read a JSONL replay log from a path or an open text stream."""
    if hasattr(source, "read"):
        return _load_lines(source)
    with open(source, "r", encoding="utf-8") as handle:
        return _load_lines(handle)


def _load_lines(handle: Iterable[str]) -> list[ReplayRecord]:
    records: list[ReplayRecord] = []
    previous_t: Optional[int] = None
    for line_no, line in enumerate(handle, start=1):
        if not line.strip():
            continue
        record = _parse_record(line_no, line, previous_t)
        previous_t = record.t_ms
        records.append(record)
    return records


def save_replay(records: Iterable[ReplayRecord], target: Union[str, "os.PathLike[str]", IO[str]]) -> None:
    """Write records in the same JSONL format the loader accepts."""
    if hasattr(target, "write"):
        _write_lines(records, target)
        return
    with open(target, "w", encoding="utf-8") as handle:
        _write_lines(records, handle)


def _write_lines(records: Iterable[ReplayRecord], handle: IO[str]) -> None:
    for record in records:
        handle.write(
            json.dumps(
                {
                    "t_ms": record.t_ms,
                    "reportId": record.report_id,
                    "data": record.data.hex(),
                },
                separators=(",", ":"),
            )
        )
        handle.write("\n")


def run_replay(registry, device, records: Iterable[ReplayRecord],
               until_ms: Optional[int] = None) -> int:
    """Inject records in order, advancing the registry clock to each t_ms.

    Stops before the first record past ``until_ms``; returns the number of
    injected reports.  Reports to a closed device still advance the clock and
    count as injected, they just deliver no events.
    """
    from .device import DeviceDetachedError

    if not registry.is_connected(device):
        raise DeviceDetachedError(device.device_id)
    injected = 0
    for record in records:
        if until_ms is not None and record.t_ms > until_ms:
            break
        registry.clock.advance_to(record.t_ms)
        registry.inject_input_report(device, record.report_id, record.data)
        injected += 1
    return injected
