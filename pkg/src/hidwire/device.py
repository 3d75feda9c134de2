"""WebHID-style device registry.

Connected devices, filter matching, single-device user grants with a
persisted permission store, protected-usage blocking, the open/close
lifecycle, and input-report event dispatch.

The registry is a single-owner state machine: every mutation funnels through
one internal lock, listeners run on the injecting thread and must not block
it.  Event delivery never crosses a protected collection, in either
direction.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .codec import UnknownReportError
from .descriptor import ReportDescriptor, ReportKind, parse_descriptor

logger = logging.getLogger(__name__)

__all__ = [
    "DeviceFilter",
    "HidDevice",
    "InputReportEvent",
    "PermissionStore",
    "HidRegistry",
    "Subscription",
    "DeviceError",
    "NoDeviceChosenError",
    "NotGrantedError",
    "AlreadyOpenError",
    "NotOpenError",
    "ProtectedCollectionError",
    "DeviceDetachedError",
    "matches_filter",
    "is_protected",
    "PROTECTED_USAGES",
    "FIDO_USAGE_PAGE",
]

# Minimal protected list: generic mouse/keyboard/keypad plus the whole FIDO
# usage page.  Reports in a top-level collection with one of these usages can
# be neither received nor sent.
PROTECTED_USAGES = frozenset({(0x01, 0x02), (0x01, 0x06), (0x01, 0x07)})
FIDO_USAGE_PAGE = 0xF1D0


class DeviceError(Exception):
    pass


class NoDeviceChosenError(DeviceError):
    pass


class NotGrantedError(DeviceError):
    pass


class AlreadyOpenError(DeviceError):
    pass


class NotOpenError(DeviceError):
    pass


class ProtectedCollectionError(DeviceError):
    pass


class DeviceDetachedError(DeviceError):
    pass


def is_protected(usage_page: int, usage: int) -> bool:
    return usage_page == FIDO_USAGE_PAGE or (usage_page, usage) in PROTECTED_USAGES


@dataclass(frozen=True)
class DeviceFilter:
    """Optional vendor/product/usage-page/usage match quadruple.

    Absent fields are wildcards; productId requires vendorId and usage
    requires usagePage, mirroring WebHID filter validity.
    """

    vendor_id: Optional[int] = None
    product_id: Optional[int] = None
    usage_page: Optional[int] = None
    usage: Optional[int] = None

    def __post_init__(self) -> None:
        if self.product_id is not None and self.vendor_id is None:
            raise ValueError("filter with productId requires vendorId")
        if self.usage is not None and self.usage_page is None:
            raise ValueError("filter with usage requires usagePage")


@dataclass
class HidDevice:
    """A connected HID device as seen by clients.

    ``opened`` toggles only through the owning registry's open/close.
    """

    device_id: str
    vendor_id: int
    product_id: int
    product_name: str
    descriptor: ReportDescriptor
    opened: bool = False


@dataclass(frozen=True)
class InputReportEvent:
    """One delivered input report: device, 8-bit report id, body bytes.

    ``data`` excludes the report id byte; ``timestamp`` is virtual-clock
    milliseconds at injection.
    """

    device: HidDevice
    report_id: int
    data: bytes
    timestamp: int


def matches_filter(device: HidDevice, filt: DeviceFilter) -> bool:
    """True iff every present filter field matches the device.

    usagePage/usage must hold together on at least one top-level collection.
    """
    if filt.vendor_id is not None and device.vendor_id != filt.vendor_id:
        return False
    if filt.product_id is not None and device.product_id != filt.product_id:
        return False
    if filt.usage_page is not None:
        for page, usage in device.descriptor.top_level_usages():
            if page == filt.usage_page and (filt.usage is None or usage == filt.usage):
                break
        else:
            return False
    return True


class PermissionStore:
    """Set of granted device ids, persisted as a JSON list.

    ``path=None`` keeps the store in memory only.  A corrupt store file is
    treated as empty with a warning.
    """

    def __init__(self, path=None) -> None:
        self.path = path
        self._granted: set[str] = set()
        if path is not None:
            self._load()

    def _load(self) -> None:
        try:
            with open(self.path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
            if not isinstance(data, list) or not all(isinstance(x, str) for x in data):
                raise ValueError("expected a JSON list of device id strings")
            self._granted = set(data)
        except FileNotFoundError:
            pass
        except (ValueError, OSError) as exc:
            logger.warning("corrupt permission store %s (%s); starting empty", self.path, exc)
            self._granted = set()

    def _save(self) -> None:
        if self.path is None:
            return
        with open(self.path, "w", encoding="utf-8") as handle:
            json.dump(sorted(self._granted), handle)

    def grant(self, device_id: str) -> None:
        self._granted.add(device_id)
        self._save()

    def revoke(self, device_id: str) -> None:
        self._granted.discard(device_id)
        self._save()

    def is_granted(self, device_id: str) -> bool:
        return device_id in self._granted

    def __len__(self) -> int:
        return len(self._granted)

    def __contains__(self, device_id: str) -> bool:
        return device_id in self._granted


class Subscription:
    """Handle returned by subscribe_input_reports; unsubscribe stops delivery."""

    def __init__(self, registry: "HidRegistry", device_id: str,
                 listener: Callable[[InputReportEvent], None]) -> None:
        self._registry = registry
        self.device_id = device_id
        self.listener = listener
        self.active = True

    def unsubscribe(self) -> None:
        self._registry._remove_subscription(self)


Chooser = Callable[[list[HidDevice]], Optional[HidDevice]]


class HidRegistry:
    """Owner of connected devices, grants, subscriptions and report flow."""

    def __init__(self, store: Optional[PermissionStore] = None, clock=None) -> None:
        from .transport import VirtualClock  # avoid import cycle at module load

        self.store = store if store is not None else PermissionStore()
        self.clock = clock if clock is not None else VirtualClock()
        self._lock = threading.RLock()
        self._devices: dict[str, HidDevice] = {}
        self._ordinals: dict[tuple[int, int], int] = {}
        self._subscriptions: dict[str, list[Subscription]] = {}
        self._outbound: dict[str, list[tuple[int, int, bytes]]] = {}

    # -- connection lifecycle -------------------------------------------------

    def connect(
        self,
        vendor_id: int,
        product_id: int,
        product_name: str,
        descriptor: ReportDescriptor | bytes,
    ) -> HidDevice:
        """Attach a device; device ids are vendor:product:ordinal."""
        if isinstance(descriptor, (bytes, bytearray)):
            descriptor = parse_descriptor(bytes(descriptor))
        with self._lock:
            key = (vendor_id, product_id)
            ordinal = self._ordinals.get(key, 0)
            self._ordinals[key] = ordinal + 1
            device = HidDevice(
                device_id=f"{vendor_id:04x}:{product_id:04x}:{ordinal}",
                vendor_id=vendor_id,
                product_id=product_id,
                product_name=product_name,
                descriptor=descriptor,
            )
            self._devices[device.device_id] = device
            self._outbound.setdefault(device.device_id, [])
            return device

    def disconnect(self, device: HidDevice) -> None:
        with self._lock:
            self._devices.pop(device.device_id, None)
            device.opened = False
            self._subscriptions.pop(device.device_id, None)

    def connected_devices(self) -> list[HidDevice]:
        with self._lock:
            return list(self._devices.values())

    def is_connected(self, device: HidDevice) -> bool:
        with self._lock:
            return self._devices.get(device.device_id) is device

    # -- permission flow ------------------------------------------------------

    def request_device(
        self, filters: Sequence[DeviceFilter], chooser: Chooser
    ) -> HidDevice:
        """Candidate devices matching any filter go to the chooser; the pick
        is granted.  An empty filter list matches every connected device.

        Devices whose every top-level usage is protected never appear.
        """
        with self._lock:
            candidates = []
            for device in self._devices.values():
                if filters and not any(matches_filter(device, f) for f in filters):
                    continue
                usages = device.descriptor.top_level_usages()
                if usages and all(is_protected(p, u) for p, u in usages):
                    continue
                candidates.append(device)
            if not candidates:
                raise NoDeviceChosenError("no connected device matches the filters")
            chosen = chooser(candidates)
            if chosen is None:
                raise NoDeviceChosenError("chooser declined")
            if chosen not in candidates:
                raise ValueError("chooser returned a device outside the candidate set")
            self.store.grant(chosen.device_id)
            return chosen

    def get_devices(self) -> list[HidDevice]:
        """Connected devices previously granted, stable order by device id."""
        with self._lock:
            granted = [d for d in self._devices.values() if d.device_id in self.store]
            granted.sort(key=lambda d: d.device_id)
            return granted

    # -- open/close -----------------------------------------------------------

    def open(self, device: HidDevice) -> None:
        with self._lock:
            if not self.is_connected(device):
                raise DeviceDetachedError(device.device_id)
            if device.device_id not in self.store:
                raise NotGrantedError(device.device_id)
            if device.opened:
                raise AlreadyOpenError(device.device_id)
            device.opened = True

    def close(self, device: HidDevice) -> None:
        with self._lock:
            if not device.opened:
                raise NotOpenError(device.device_id)
            device.opened = False

    # -- events ---------------------------------------------------------------

    def subscribe_input_reports(
        self, device: HidDevice, listener: Callable[[InputReportEvent], None]
    ) -> Subscription:
        with self._lock:
            if device.device_id not in self.store:
                raise NotGrantedError(device.device_id)
            sub = Subscription(self, device.device_id, listener)
            self._subscriptions.setdefault(device.device_id, []).append(sub)
            return sub

    def _remove_subscription(self, sub: Subscription) -> None:
        with self._lock:
            sub.active = False
            subs = self._subscriptions.get(sub.device_id, [])
            if sub in subs:
                subs.remove(sub)

    def _report_protected(self, device: HidDevice, kind: ReportKind, report_id: int) -> bool:
        for col in device.descriptor.top_level_collections_for_report(kind, report_id):
            if is_protected(col.usage_page, col.usage):
                return True
        return False

    def inject_input_report(self, device: HidDevice, report_id: int, data: bytes) -> bool:
        """Deliver a report to subscribed listeners; returns True if delivered.

        Nothing is delivered while the device is closed or when the report
        belongs to a protected collection.
        """
        with self._lock:
            if not self.is_connected(device):
                raise DeviceDetachedError(device.device_id)
            if not device.opened:
                return False
            if self._report_protected(device, ReportKind.INPUT, report_id):
                logger.debug(
                    "suppressed input report 0x%02x from protected collection on %s",
                    report_id, device.device_id,
                )
                return False
            event = InputReportEvent(
                device=device,
                report_id=report_id,
                data=bytes(data),
                timestamp=self.clock.now_ms,
            )
            subs = list(self._subscriptions.get(device.device_id, []))
        delivered = False
        for sub in subs:
            if sub.active:
                sub.listener(event)
                delivered = True
        return delivered

    def send_report(self, device: HidDevice, report_id: int, data: bytes) -> None:
        """Append an output report to the transport's outbound log."""
        with self._lock:
            if not self.is_connected(device):
                raise DeviceDetachedError(device.device_id)
            if not device.opened:
                raise NotOpenError(device.device_id)
            specs = device.descriptor.fields_for_report(ReportKind.OUTPUT, report_id)
            if not specs:
                raise UnknownReportError(f"no output report with id {report_id}")
            if self._report_protected(device, ReportKind.OUTPUT, report_id):
                raise ProtectedCollectionError(
                    f"output report 0x{report_id:02x} targets a protected collection"
                )
            self._outbound[device.device_id].append(
                (self.clock.now_ms, report_id, bytes(data))
            )

    def outbound_log(self, device: HidDevice) -> list[tuple[int, int, bytes]]:
        with self._lock:
            return list(self._outbound.get(device.device_id, []))
