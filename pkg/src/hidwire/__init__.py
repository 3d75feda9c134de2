"""hidwire: host-side HID toolkit over a deterministic simulated transport.

Report-descriptor parsing, report body codecs, a WebHID-style device model
with single-grant permissions and protected-usage blocking, a Joy-Con
driver, accelerometer jump detection, replay tooling and a WebSocket event
service.
"""

from .codec import DecodedField, decode_input_report, encode_output_report, extract_field
from .descriptor import (
    Collection,
    ReportDescriptor,
    ReportFieldSpec,
    ReportKind,
    parse_descriptor,
)
from .device import (
    DeviceFilter,
    HidDevice,
    HidRegistry,
    InputReportEvent,
    PermissionStore,
    is_protected,
    matches_filter,
)
from .joycon import ImuFrame, JoyConSide, identify
from .jump import JumpConfig, JumpEvent, detect_jumps
from .transport import ReplayRecord, VirtualClock, load_replay, run_replay, save_replay

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "parse_descriptor",
    "ReportDescriptor",
    "ReportFieldSpec",
    "ReportKind",
    "Collection",
    "DecodedField",
    "extract_field",
    "decode_input_report",
    "encode_output_report",
    "DeviceFilter",
    "HidDevice",
    "HidRegistry",
    "InputReportEvent",
    "PermissionStore",
    "matches_filter",
    "is_protected",
    "JoyConSide",
    "ImuFrame",
    "identify",
    "JumpConfig",
    "JumpEvent",
    "detect_jumps",
    "VirtualClock",
    "ReplayRecord",
    "load_replay",
    "save_replay",
    "run_replay",
]
