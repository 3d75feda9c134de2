#!/usr/bin/env python3
"""Regenerate the bundled replay fixtures under fixtures/.

The logs are committed; run this only when the fixture design changes.
"""

from __future__ import annotations

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from hidwire.joycon import (  # noqa: E402
    ACCEL_G_PER_LSB,
    SIMPLE_MODE_REPORT_ID,
    STANDARD_MODE_REPORT_ID,
    build_standard_report,
)
from hidwire.transport import ReplayRecord, save_replay  # noqa: E402

FIXTURES = pathlib.Path(__file__).resolve().parents[1] / "fixtures"

REST_RAW = round(1.0 / ACCEL_G_PER_LSB)    # ~0.9999 g on the z axis
SPIKE_RAW = round(2.5 / ACCEL_G_PER_LSB)   # ~2.5 g

REST_FRAME = (0, 0, REST_RAW, 0, 0, 0)
SPIKE_FRAME = (0, 0, SPIKE_RAW, 0, 0, 0)


def rest_report(t_ms: int) -> ReplayRecord:
    body = build_standard_report(raw_frames=(REST_FRAME, REST_FRAME, REST_FRAME))
    return ReplayRecord(t_ms, STANDARD_MODE_REPORT_ID, body)


def spike_report(t_ms: int) -> ReplayRecord:
    body = build_standard_report(raw_frames=(REST_FRAME, SPIKE_FRAME, REST_FRAME))
    return ReplayRecord(t_ms, STANDARD_MODE_REPORT_ID, body)


def simple_button(t_ms: int, value: int) -> ReplayRecord:
    return ReplayRecord(t_ms, SIMPLE_MODE_REPORT_ID, bytes([value]))


def ten_jumps() -> list[ReplayRecord]:
    """Exactly ten jump spikes, 500 ms apart, padded with rest reports."""
    records = []
    for k in range(10):
        base = k * 500
        records.append(spike_report(base))
        for offset in (100, 200, 300):
            records.append(rest_report(base + offset))
    return records


def joycon_session() -> list[ReplayRecord]:
    """Buttons and IMU mixed: A, X, an unmapped chord, Y, and two jumps."""
    records = [
        simple_button(0, 0x01),    # A
        simple_button(50, 0x00),   # release
        simple_button(100, 0x02),  # X
        simple_button(150, 0x03),  # chord, dropped by the decoder
        rest_report(200),
        spike_report(230),         # jump 1
        rest_report(260),
        simple_button(600, 0x08),  # Y
        rest_report(650),
        spike_report(700),         # jump 2
        rest_report(730),
    ]
    return records


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    save_replay(ten_jumps(), FIXTURES / "ten_jumps.jsonl")
    save_replay(joycon_session(), FIXTURES / "joycon_session.jsonl")
    print(f"wrote {FIXTURES / 'ten_jumps.jsonl'}")
    print(f"wrote {FIXTURES / 'joycon_session.jsonl'}")


if __name__ == "__main__":
    main()
