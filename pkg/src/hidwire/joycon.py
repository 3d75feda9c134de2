"""Nintendo Joy-Con driver: identification, button and IMU decode, subcommands.

Byte layouts and scales follow the community reverse engineering of the
Joy-Con firmware and are frozen here as the single source of truth for the
tests.

Standard input report (id 0x30), body bytes (report id already stripped)::

    0        frame timer
    1        battery level / connection info
    2-4      button bitmap, 24-bit little-endian
    5-7      left stick, packed 12-bit pair
    8-10     right stick, packed 12-bit pair
    11       vibration ack
    12-47    IMU: 3 frames x 12 bytes, 5 ms apart, each frame
             <6h little-endian: accel x, y, z then gyro x, y, z

Sensor scales: accel 0.000244 g/LSB, gyro 0.06103 dps/LSB.

Subcommand output report (id 0x01), body bytes::

    0        packet counter, low 4 bits, rolls 0-15
    1-8      rumble payload (neutral zeros here; rumble is out of scope)
    9        subcommand byte
    10-      subcommand arguments

Subcommands used: 0x40 arg 0x01 enables the IMU, 0x03 arg <mode> selects the
input report mode (0x3f simple, 0x30 standard).

Simple mode (report id 0x3f) carries a one-byte button value in body byte 0;
only the Joy-Con Right values 1/2/4/8 (A/X/B/Y) are mapped, chords and the
other buttons are left unmapped.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

logger = logging.getLogger(__name__)

__all__ = [
    "NINTENDO_VENDOR_ID",
    "JOYCON_LEFT_PRODUCT_ID",
    "JOYCON_RIGHT_PRODUCT_ID",
    "SIMPLE_MODE_REPORT_ID",
    "STANDARD_MODE_REPORT_ID",
    "SUBCOMMAND_OUTPUT_REPORT_ID",
    "ACCEL_G_PER_LSB",
    "GYRO_DPS_PER_LSB",
    "IMU_FRAME_SPACING_MS",
    "SIMPLE_BUTTON_MAP",
    "JoyConSide",
    "ButtonEvent",
    "ImuFrame",
    "JoyConError",
    "EmptyReportError",
    "ReportTooShortError",
    "WrongModeError",
    "InvalidModeError",
    "identify",
    "decode_simple_button",
    "decode_standard_report",
    "build_standard_report",
    "raw_to_physical",
    "build_subcommand_report",
    "build_enable_imu_report",
    "build_set_mode_report",
    "build_joycon_descriptor_bytes",
    "JoyConSession",
]

NINTENDO_VENDOR_ID = 0x057E
JOYCON_LEFT_PRODUCT_ID = 0x2006
JOYCON_RIGHT_PRODUCT_ID = 0x2007

SIMPLE_MODE_REPORT_ID = 0x3F
STANDARD_MODE_REPORT_ID = 0x30
SUBCOMMAND_OUTPUT_REPORT_ID = 0x01
RUMBLE_OUTPUT_REPORT_ID = 0x10

ACCEL_G_PER_LSB = 0.000244
GYRO_DPS_PER_LSB = 0.06103
IMU_FRAME_SPACING_MS = 5

STANDARD_REPORT_MIN_LEN = 48
_IMU_BASE_OFFSET = 12
_IMU_FRAME_SIZE = 12

SUBCOMMAND_ENABLE_IMU = 0x40
SUBCOMMAND_SET_INPUT_MODE = 0x03
_RUMBLE_NEUTRAL = bytes(8)

SIMPLE_BUTTON_MAP = {0x01: "A", 0x02: "X", 0x04: "B", 0x08: "Y"}

VALID_INPUT_MODES = (SIMPLE_MODE_REPORT_ID, STANDARD_MODE_REPORT_ID)


class JoyConSide(Enum):
    LEFT = JOYCON_LEFT_PRODUCT_ID
    RIGHT = JOYCON_RIGHT_PRODUCT_ID

    @property
    def product_id(self) -> int:
        return self.value


class JoyConError(ValueError):
    pass


class EmptyReportError(JoyConError):
    pass


class ReportTooShortError(JoyConError):
    pass


class WrongModeError(JoyConError):
    pass


class InvalidModeError(JoyConError):
    pass


@dataclass
class ButtonEvent:
    button: str
    t_ms: int


@dataclass(frozen=True)
class ImuFrame:
    """One accelerometer+gyro sample in physical units (g, deg/s)."""

    accel: tuple[float, float, float]
    gyro: tuple[float, float, float]
    t_ms: int


def identify(device) -> Optional[JoyConSide]:
    """Side of a Joy-Con, or None for anything that is not one."""
    if getattr(device, "vendor_id", None) != NINTENDO_VENDOR_ID:
        return None
    product_id = getattr(device, "product_id", None)
    if product_id == JOYCON_LEFT_PRODUCT_ID:
        return JoyConSide.LEFT
    if product_id == JOYCON_RIGHT_PRODUCT_ID:
        return JoyConSide.RIGHT
    return None


def decode_simple_button(
    product_id: int, report_id: int, data: bytes, t_ms: int = 0
) -> Optional[ButtonEvent]:
    """Simple-mode button decode; only Joy-Con Right, report id 0x3f.

    Value 0 means release, 1/2/4/8 map to A/X/B/Y; anything else (chords,
    unmapped buttons) is dropped with a debug note.
    """
    if len(data) == 0:
        raise EmptyReportError("simple-mode report with empty body")
    if product_id != JOYCON_RIGHT_PRODUCT_ID or report_id != SIMPLE_MODE_REPORT_ID:
        return None
    value = data[0]
    if value == 0:
        return None
    button = SIMPLE_BUTTON_MAP.get(value)
    if button is None:
        logger.debug("unmapped simple-mode button value 0x%02x", value)
        return None
    return ButtonEvent(button=button, t_ms=t_ms)


def raw_to_physical(raw: int, kind: str) -> float:
    """Signed 16-bit sensor value to physical units (kind: accel or gyro)."""
    if kind == "accel":
        return raw * ACCEL_G_PER_LSB
    if kind == "gyro":
        return raw * GYRO_DPS_PER_LSB
    raise ValueError(f"unknown sensor kind {kind!r}")


def decode_standard_report(
    data: bytes, t_ms: int = 0, report_id: int = STANDARD_MODE_REPORT_ID
) -> tuple[int, tuple[ImuFrame, ImuFrame, ImuFrame]]:
    """Standard-mode decode: 24-bit button bitmap plus three IMU frames.

    ``data`` is the report body with the id byte stripped; the id is the
    mode byte and anything but 0x30 is the wrong mode.  Frame k is stamped
    ``t_ms + 5k``.
    """
    if report_id != STANDARD_MODE_REPORT_ID:
        raise WrongModeError(f"report id 0x{report_id:02x} is not standard mode 0x30")
    if len(data) < STANDARD_REPORT_MIN_LEN:
        raise ReportTooShortError(
            f"standard report body needs {STANDARD_REPORT_MIN_LEN} bytes, got {len(data)}"
        )
    button_bitmap = data[2] | (data[3] << 8) | (data[4] << 16)
    frames = []
    for k in range(3):
        base = _IMU_BASE_OFFSET + k * _IMU_FRAME_SIZE
        ax, ay, az, gx, gy, gz = struct.unpack_from("<6h", data, base)
        frames.append(
            ImuFrame(
                accel=(ax * ACCEL_G_PER_LSB, ay * ACCEL_G_PER_LSB, az * ACCEL_G_PER_LSB),
                gyro=(gx * GYRO_DPS_PER_LSB, gy * GYRO_DPS_PER_LSB, gz * GYRO_DPS_PER_LSB),
                t_ms=t_ms + k * IMU_FRAME_SPACING_MS,
            )
        )
    return button_bitmap, (frames[0], frames[1], frames[2])


def build_standard_report(
    button_bitmap: int = 0,
    raw_frames: Sequence[Sequence[int]] = ((0,) * 6,) * 3,
) -> bytes:
    """Synthesize a 48-byte standard-mode body from raw little-endian values.

    Inverse of decode_standard_report for the button and IMU bytes; used by
    fixtures and the keyboard simulator.
    """
    if len(raw_frames) != 3:
        raise ValueError("standard report carries exactly 3 IMU frames")
    body = bytearray(STANDARD_REPORT_MIN_LEN)
    body[2] = button_bitmap & 0xFF
    body[3] = (button_bitmap >> 8) & 0xFF
    body[4] = (button_bitmap >> 16) & 0xFF
    for k, frame in enumerate(raw_frames):
        if len(frame) != 6:
            raise ValueError("each raw frame is (ax, ay, az, gx, gy, gz)")
        struct.pack_into("<6h", body, _IMU_BASE_OFFSET + k * _IMU_FRAME_SIZE, *frame)
    return bytes(body)


def build_subcommand_report(counter: int, subcommand: int, args: bytes) -> tuple[int, bytes]:
    """(report id 0x01, body) for a subcommand with a neutral rumble payload."""
    body = bytes([counter & 0x0F]) + _RUMBLE_NEUTRAL + bytes([subcommand]) + bytes(args)
    return SUBCOMMAND_OUTPUT_REPORT_ID, body


def build_enable_imu_report(counter: int = 0) -> tuple[int, bytes]:
    return build_subcommand_report(counter, SUBCOMMAND_ENABLE_IMU, b"\x01")


def build_set_mode_report(mode: int, counter: int = 0) -> tuple[int, bytes]:
    if mode not in VALID_INPUT_MODES:
        raise InvalidModeError(f"input mode 0x{mode:02x} not in "
                               f"{[hex(m) for m in VALID_INPUT_MODES]}")
    return build_subcommand_report(counter, SUBCOMMAND_SET_INPUT_MODE, bytes([mode]))


# Vendor-page descriptor for the simulated Joy-Con: one application
# collection exposing the simple (0x3f) and standard (0x30) input reports
# plus the subcommand (0x01) and rumble (0x10) output reports.
_JOYCON_DESCRIPTOR_HEX = (
    "06 00 ff"        # usage page 0xff00 (vendor)
    "09 01"           # usage 1
    "a1 01"           # collection (application)
    "15 00"           # logical minimum 0
    "26 ff 00"        # logical maximum 255
    "75 08"           # report size 8
    "85 3f"           # report id 0x3f (simple mode)
    "95 01"           # report count 1
    "09 02"           # usage 2
    "81 02"           # input (data, variable, absolute)
    "85 30"           # report id 0x30 (standard mode)
    "95 30"           # report count 48
    "09 03"           # usage 3
    "81 02"           # input
    "85 01"           # report id 0x01 (subcommand out)
    "95 0b"           # report count 11
    "09 04"           # usage 4
    "91 02"           # output
    "85 10"           # report id 0x10 (rumble out)
    "95 09"           # report count 9
    "09 05"           # usage 5
    "91 02"           # output
    "c0"              # end collection
)


def build_joycon_descriptor_bytes() -> bytes:
    """Report descriptor bytes for the simulated Joy-Con."""
    return bytes.fromhex(_JOYCON_DESCRIPTOR_HEX.replace(" ", ""))


class JoyConSession:
    """Stateful driver session owning the rolling 4-bit packet counter.

    Owned by one dispatch context; sends subcommands through the registry.
    """

    def __init__(self, registry, device) -> None:
        self.registry = registry
        self.device = device
        self.counter = 0

    def _send(self, builder, *args) -> None:
        report_id, body = builder(*args, counter=self.counter)
        self.counter = (self.counter + 1) % 16
        self.registry.send_report(self.device, report_id, body)

    def enable_imu(self) -> None:
        self._send(build_enable_imu_report)

    def set_input_mode(self, mode: int) -> None:
        self._send(build_set_mode_report, mode)
