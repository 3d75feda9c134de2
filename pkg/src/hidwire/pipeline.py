"""Decoded-event pipeline over a simulated Joy-Con.

Wires a registry, a granted+opened Joy-Con and the decoders together and
emits plain dicts in the wire shape shared by the offline replay command and
the WebSocket service::

    {"type": "button", "button": "A", "t_ms": 0}
    {"type": "imu", "t_ms": 0, "accel": [x, y, z], "gyro": [x, y, z]}
    {"type": "jump", "t_ms": 0, "peak_g": 2.44}
"""

from __future__ import annotations

from typing import Callable, Iterable, Optional

from . import joycon
from .device import DeviceFilter, HidRegistry, InputReportEvent, PermissionStore
from .jump import JumpConfig, JumpState, magnitude, process_sample
from .transport import ReplayRecord, run_replay

__all__ = ["LISTING_FILTERS", "JoyConPipeline", "replay_events"]

# the canonical Joy-Con request filters: one per side
LISTING_FILTERS = (
    DeviceFilter(vendor_id=joycon.NINTENDO_VENDOR_ID, product_id=joycon.JOYCON_LEFT_PRODUCT_ID),
    DeviceFilter(vendor_id=joycon.NINTENDO_VENDOR_ID, product_id=joycon.JOYCON_RIGHT_PRODUCT_ID),
)

EventSink = Callable[[dict], None]


class JoyConPipeline:
    """Simulated Joy-Con attached to a registry, decoding into an event sink.

    Goes through the real permission path (request_device with the Joy-Con
    filters and an auto-accepting chooser) so the whole grant/open/subscribe
    flow is exercised, not just the decoders.
    """

    def __init__(
        self,
        sink: EventSink,
        jump_config: Optional[JumpConfig] = None,
        side: joycon.JoyConSide = joycon.JoyConSide.RIGHT,
        emit_imu: bool = True,
    ) -> None:
        self.sink = sink
        self.jump_config = jump_config if jump_config is not None else JumpConfig()
        self.emit_imu = emit_imu
        self.registry = HidRegistry(store=PermissionStore(path=None))
        self.device = self.registry.connect(
            vendor_id=joycon.NINTENDO_VENDOR_ID,
            product_id=side.product_id,
            product_name=f"Joy-Con ({'L' if side is joycon.JoyConSide.LEFT else 'R'})",
            descriptor=joycon.build_joycon_descriptor_bytes(),
        )
        self.registry.request_device(list(LISTING_FILTERS), lambda candidates: candidates[0])
        self.registry.open(self.device)
        self._jump_state = JumpState()
        self.registry.subscribe_input_reports(self.device, self._on_report)

    def _on_report(self, event: InputReportEvent) -> None:
        if not event.data:
            return
        button = joycon.decode_simple_button(
            event.device.product_id, event.report_id, event.data, t_ms=event.timestamp
        )
        if button is not None:
            self.sink({"type": "button", "button": button.button, "t_ms": button.t_ms})
            return
        if (
            event.report_id == joycon.STANDARD_MODE_REPORT_ID
            and len(event.data) >= joycon.STANDARD_REPORT_MIN_LEN
        ):
            _, frames = joycon.decode_standard_report(event.data, t_ms=event.timestamp)
            for frame in frames:
                if self.emit_imu:
                    self.sink(
                        {
                            "type": "imu",
                            "t_ms": frame.t_ms,
                            "accel": list(frame.accel),
                            "gyro": list(frame.gyro),
                        }
                    )
                jump = process_sample(
                    self._jump_state, frame.t_ms, magnitude(frame), self.jump_config
                )
                if jump is not None:
                    self.sink({"type": "jump", "t_ms": jump.t_ms, "peak_g": jump.peak_g})

    def inject(self, report_id: int, data: bytes, at_ms: Optional[int] = None) -> None:
        """Advance the clock (optionally) and inject one report."""
        if at_ms is not None:
            self.registry.clock.advance_to(at_ms)
        self.registry.inject_input_report(self.device, report_id, data)

    def run(self, records: Iterable[ReplayRecord], until_ms: Optional[int] = None) -> int:
        return run_replay(self.registry, self.device, records, until_ms=until_ms)


def replay_events(
    records: Iterable[ReplayRecord], jump_config: Optional[JumpConfig] = None
) -> list[dict]:
    """Decode a whole replay log into its event-dict sequence."""
    events: list[dict] = []
    pipeline = JoyConPipeline(events.append, jump_config=jump_config)
    pipeline.run(records)
    return events
