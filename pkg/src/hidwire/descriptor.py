"""HID report-descriptor parsing.

Turns the binary short-item stream a device publishes into a structured
model: a tree of collections plus one ``ReportFieldSpec`` per Input/Output/
Feature main item.  Follows the HID 1.11 item state machine: Global items
persist (with Push/Pop), Local items reset after every Main item, and report
bit offsets accumulate per (kind, report id) across the whole descriptor.

Parsed descriptors are immutable and safe to share across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Iterator, Sequence

__all__ = [
    "ReportKind",
    "ItemType",
    "DescriptorItem",
    "ReportFieldSpec",
    "Collection",
    "ReportDescriptor",
    "DescriptorError",
    "TruncatedItemError",
    "LongItemUnsupportedError",
    "UnbalancedCollectionError",
    "MisalignedReportError",
    "MixedReportIdError",
    "InvalidReportIdError",
    "GlobalStackError",
    "OrphanFieldError",
    "iter_items",
    "parse_descriptor",
    "parse_hex_text",
    "read_descriptor_file",
    "descriptor_to_json",
]

LONG_ITEM_PREFIX = 0xFE

# payload length encoded in the two low prefix bits
_PAYLOAD_SIZES = (0, 1, 2, 4)


class ItemType(IntEnum):
    MAIN = 0
    GLOBAL = 1
    LOCAL = 2


class MainTag(IntEnum):
    INPUT = 0b1000
    OUTPUT = 0b1001
    COLLECTION = 0b1010
    FEATURE = 0b1011
    END_COLLECTION = 0b1100


class GlobalTag(IntEnum):
    USAGE_PAGE = 0
    LOGICAL_MINIMUM = 1
    LOGICAL_MAXIMUM = 2
    PHYSICAL_MINIMUM = 3
    PHYSICAL_MAXIMUM = 4
    UNIT_EXPONENT = 5
    UNIT = 6
    REPORT_SIZE = 7
    REPORT_ID = 8
    REPORT_COUNT = 9
    PUSH = 10
    POP = 11


class LocalTag(IntEnum):
    USAGE = 0
    USAGE_MINIMUM = 1
    USAGE_MAXIMUM = 2
    DESIGNATOR_INDEX = 3
    DESIGNATOR_MINIMUM = 4
    DESIGNATOR_MAXIMUM = 5
    STRING_INDEX = 7
    STRING_MINIMUM = 8
    STRING_MAXIMUM = 9
    DELIMITER = 10


class ReportKind(Enum):
    INPUT = "input"
    OUTPUT = "output"
    FEATURE = "feature"


_MAIN_TAG_TO_KIND = {
    MainTag.INPUT: ReportKind.INPUT,
    MainTag.OUTPUT: ReportKind.OUTPUT,
    MainTag.FEATURE: ReportKind.FEATURE,
}

# global tags whose payload is a signed two's-complement value
_SIGNED_GLOBAL_TAGS = {
    GlobalTag.LOGICAL_MINIMUM,
    GlobalTag.LOGICAL_MAXIMUM,
    GlobalTag.PHYSICAL_MINIMUM,
    GlobalTag.PHYSICAL_MAXIMUM,
    GlobalTag.UNIT_EXPONENT,
}

MAX_FIELD_BIT_SIZE = 64


class DescriptorError(ValueError):
    """Base class for report-descriptor parse failures."""


class TruncatedItemError(DescriptorError):
    """Item payload runs past the end of the byte stream."""


class LongItemUnsupportedError(DescriptorError):
    """Long items (prefix 0xFE) are rejected, never silently skipped."""


class UnbalancedCollectionError(DescriptorError):
    """End Collection without an open collection, or EOF while one is open."""


class MisalignedReportError(DescriptorError):
    """Total bit length of a (kind, report id) is not a multiple of 8."""


class MixedReportIdError(DescriptorError):
    """Descriptor mixes unnumbered (id 0) and numbered reports."""


class InvalidReportIdError(DescriptorError):
    """Report ID item with a reserved or out-of-range value."""


class GlobalStackError(DescriptorError):
    """Pop without a matching Push."""


class OrphanFieldError(DescriptorError):
    """Input/Output/Feature main item outside any collection."""


@dataclass(frozen=True)
class DescriptorItem:
    """One decoded short item.

    ``payload`` is the raw unsigned little-endian value; use
    ``signed_payload`` for tags that carry two's-complement data.
    """

    tag: int
    item_type: ItemType
    payload: int
    byte_length: int

    @property
    def payload_size(self) -> int:
        return self.byte_length - 1

    @property
    def signed_payload(self) -> int:
        size = self.payload_size
        if size and (self.payload >> (size * 8 - 1)) & 1:
            return self.payload - (1 << (size * 8))
        return self.payload


@dataclass(frozen=True)
class FieldFlags:
    constant: bool
    variable: bool
    relative: bool

    @classmethod
    def from_main_payload(cls, payload: int) -> "FieldFlags":
        return cls(
            constant=bool(payload & 0x01),
            variable=bool(payload & 0x02),
            relative=bool(payload & 0x04),
        )


@dataclass(frozen=True)
class ReportFieldSpec:
    """Layout of one main item's data inside its report.

    ``bit_offset`` counts from the start of the report body (report id byte
    excluded); ``count`` elements of ``bit_size`` bits tile the report
    contiguously with the other fields of the same (kind, report id).
    """

    report_id: int
    kind: ReportKind
    bit_offset: int
    bit_size: int
    count: int
    logical_min: int
    logical_max: int
    usages: tuple[tuple[int, int], ...]
    flags: FieldFlags
    unit: int = 0
    unit_exponent: int = 0

    @property
    def is_signed(self) -> bool:
        return self.logical_min < 0

    @property
    def total_bits(self) -> int:
        return self.bit_size * self.count


@dataclass(frozen=True)
class Collection:
    usage_page: int
    usage: int
    collection_type: int
    children: tuple["Collection", ...]
    field_specs: tuple[ReportFieldSpec, ...]

    def iter_field_specs(self) -> Iterator[ReportFieldSpec]:
        """Own specs plus those of all nested collections, declaration order."""
        yield from self.field_specs
        for child in self.children:
            yield from child.iter_field_specs()


@dataclass(frozen=True)
class ReportDescriptor:
    collections: tuple[Collection, ...]

    def top_level_usages(self) -> list[tuple[int, int]]:
        return [(c.usage_page, c.usage) for c in self.collections]

    def all_field_specs(self) -> Iterator[ReportFieldSpec]:
        for collection in self.collections:
            yield from collection.iter_field_specs()

    def fields_for_report(self, kind: ReportKind, report_id: int) -> list[ReportFieldSpec]:
        specs = [
            s
            for s in self.all_field_specs()
            if s.kind is kind and s.report_id == report_id
        ]
        specs.sort(key=lambda s: s.bit_offset)
        return specs

    def report_bit_length(self, kind: ReportKind, report_id: int) -> int:
        return sum(s.total_bits for s in self.fields_for_report(kind, report_id))

    def report_byte_length(self, kind: ReportKind, report_id: int) -> int:
        return self.report_bit_length(kind, report_id) // 8

    def report_ids(self, kind: ReportKind) -> list[int]:
        seen: list[int] = []
        for spec in self.all_field_specs():
            if spec.kind is kind and spec.report_id not in seen:
                seen.append(spec.report_id)
        return seen

    def top_level_collections_for_report(
        self, kind: ReportKind, report_id: int
    ) -> list[Collection]:
        """Top-level collections that define fields of (kind, report id)."""
        out = []
        for collection in self.collections:
            for spec in collection.iter_field_specs():
                if spec.kind is kind and spec.report_id == report_id:
                    out.append(collection)
                    break
        return out


def iter_items(data: bytes) -> Iterator[DescriptorItem]:
    """Decode the short-item stream; raises on truncation and long items."""
    pos = 0
    length = len(data)
    while pos < length:
        prefix = data[pos]
        if prefix == LONG_ITEM_PREFIX:
            raise LongItemUnsupportedError(f"long item at byte {pos}")
        size = _PAYLOAD_SIZES[prefix & 0x03]
        tag = (prefix >> 4) & 0x0F
        item_type = ItemType((prefix >> 2) & 0x03)
        if pos + 1 + size > length:
            raise TruncatedItemError(
                f"item at byte {pos} declares {size} payload bytes, "
                f"{length - pos - 1} remain"
            )
        payload = int.from_bytes(data[pos + 1 : pos + 1 + size], "little")
        yield DescriptorItem(tag, item_type, payload, 1 + size)
        pos += 1 + size


class _GlobalState:
    __slots__ = (
        "usage_page",
        "logical_min",
        "logical_max",
        "physical_min",
        "physical_max",
        "unit",
        "unit_exponent",
        "report_size",
        "report_id",
        "report_count",
    )

    def __init__(self) -> None:
        self.usage_page = 0
        self.logical_min = 0
        self.logical_max = 0
        self.physical_min = 0
        self.physical_max = 0
        self.unit = 0
        self.unit_exponent = 0
        self.report_size = 0
        self.report_id = 0
        self.report_count = 0

    def copy(self) -> "_GlobalState":
        clone = _GlobalState()
        for name in self.__slots__:
            setattr(clone, name, getattr(self, name))
        return clone


class _CollectionBuilder:
    def __init__(self, usage_page: int, usage: int, collection_type: int) -> None:
        self.usage_page = usage_page
        self.usage = usage
        self.collection_type = collection_type
        self.children: list[_CollectionBuilder] = []
        self.field_specs: list[ReportFieldSpec] = []

    def freeze(self) -> Collection:
        return Collection(
            usage_page=self.usage_page,
            usage=self.usage,
            collection_type=self.collection_type,
            children=tuple(c.freeze() for c in self.children),
            field_specs=tuple(self.field_specs),
        )


def _split_usage(payload: int, payload_size: int, usage_page: int) -> tuple[int, int]:
    # 4-byte usages carry their own page in the high 16 bits
    if payload_size == 4:
        return (payload >> 16) & 0xFFFF, payload & 0xFFFF
    return usage_page & 0xFFFF, payload & 0xFFFF


def parse_descriptor(data: bytes) -> ReportDescriptor:
    """Parse a report-descriptor byte stream into its structured model."""
    state = _GlobalState()
    state_stack: list[_GlobalState] = []

    usages: list[tuple[int, int]] = []
    pending_usage_min: tuple[int, int] | None = None

    top_level: list[_CollectionBuilder] = []
    open_stack: list[_CollectionBuilder] = []

    bit_offsets: dict[tuple[ReportKind, int], int] = {}
    report_ids_seen: set[int] = set()

    def reset_locals() -> None:
        nonlocal pending_usage_min
        usages.clear()
        pending_usage_min = None

    def emit_field(kind: ReportKind, payload: int) -> None:
        if not open_stack:
            raise OrphanFieldError(f"{kind.value} item outside any collection")
        if state.report_size < 1:
            raise DescriptorError(f"{kind.value} item with report size 0")
        if state.report_size > MAX_FIELD_BIT_SIZE:
            raise DescriptorError(
                f"report size {state.report_size} exceeds {MAX_FIELD_BIT_SIZE} bits"
            )
        if state.report_count < 1:
            raise DescriptorError(f"{kind.value} item with report count 0")
        if state.logical_min > state.logical_max:
            raise DescriptorError(
                f"logical minimum {state.logical_min} exceeds maximum {state.logical_max}"
            )
        report_id = state.report_id
        report_ids_seen.add(report_id)
        if 0 in report_ids_seen and len(report_ids_seen) > 1:
            raise MixedReportIdError(
                "descriptor mixes unnumbered (id 0) and numbered reports"
            )
        key = (kind, report_id)
        offset = bit_offsets.get(key, 0)
        spec = ReportFieldSpec(
            report_id=report_id,
            kind=kind,
            bit_offset=offset,
            bit_size=state.report_size,
            count=state.report_count,
            logical_min=state.logical_min,
            logical_max=state.logical_max,
            usages=tuple(usages),
            flags=FieldFlags.from_main_payload(payload),
            unit=state.unit,
            unit_exponent=state.unit_exponent,
        )
        bit_offsets[key] = offset + spec.total_bits
        open_stack[-1].field_specs.append(spec)

    for item in iter_items(data):
        if item.item_type is ItemType.GLOBAL:
            tag = item.tag
            if tag == GlobalTag.USAGE_PAGE:
                state.usage_page = item.payload & 0xFFFF
            elif tag == GlobalTag.LOGICAL_MINIMUM:
                state.logical_min = item.signed_payload
            elif tag == GlobalTag.LOGICAL_MAXIMUM:
                state.logical_max = item.signed_payload
            elif tag == GlobalTag.PHYSICAL_MINIMUM:
                state.physical_min = item.signed_payload
            elif tag == GlobalTag.PHYSICAL_MAXIMUM:
                state.physical_max = item.signed_payload
            elif tag == GlobalTag.UNIT_EXPONENT:
                state.unit_exponent = item.signed_payload
            elif tag == GlobalTag.UNIT:
                state.unit = item.payload
            elif tag == GlobalTag.REPORT_SIZE:
                state.report_size = item.payload
            elif tag == GlobalTag.REPORT_ID:
                if not 1 <= item.payload <= 0xFF:
                    raise InvalidReportIdError(
                        f"report id {item.payload} outside 1..255 (0 is reserved)"
                    )
                state.report_id = item.payload
            elif tag == GlobalTag.REPORT_COUNT:
                state.report_count = item.payload
            elif tag == GlobalTag.PUSH:
                state_stack.append(state.copy())
            elif tag == GlobalTag.POP:
                if not state_stack:
                    raise GlobalStackError("pop without matching push")
                state = state_stack.pop()
            # unknown global tags are ignored
        elif item.item_type is ItemType.LOCAL:
            tag = item.tag
            if tag == LocalTag.USAGE:
                usages.append(_split_usage(item.payload, item.payload_size, state.usage_page))
            elif tag == LocalTag.USAGE_MINIMUM:
                pending_usage_min = _split_usage(
                    item.payload, item.payload_size, state.usage_page
                )
            elif tag == LocalTag.USAGE_MAXIMUM:
                if pending_usage_min is None:
                    raise DescriptorError("usage maximum without preceding usage minimum")
                page, low = pending_usage_min
                max_page, high = _split_usage(
                    item.payload, item.payload_size, state.usage_page
                )
                if max_page != page:
                    raise DescriptorError("usage range spans usage pages")
                if high < low:
                    raise DescriptorError(f"usage maximum {high} below minimum {low}")
                usages.extend((page, u) for u in range(low, high + 1))
                pending_usage_min = None
            # designators, strings and delimiters are ignored
        else:  # main
            tag = item.tag
            if tag == MainTag.COLLECTION:
                page, usage = usages[0] if usages else (state.usage_page, 0)
                builder = _CollectionBuilder(page, usage, item.payload)
                if open_stack:
                    open_stack[-1].children.append(builder)
                else:
                    top_level.append(builder)
                open_stack.append(builder)
                reset_locals()
            elif tag == MainTag.END_COLLECTION:
                if not open_stack:
                    raise UnbalancedCollectionError("end collection without open collection")
                open_stack.pop()
                reset_locals()
            elif tag in _MAIN_TAG_TO_KIND:
                emit_field(_MAIN_TAG_TO_KIND[MainTag(tag)], item.payload)
                reset_locals()
            else:
                # unknown main tags reset local state like any main item
                reset_locals()

    if open_stack:
        raise UnbalancedCollectionError(f"{len(open_stack)} collection(s) left open at EOF")

    for (kind, report_id), bits in bit_offsets.items():
        if bits % 8:
            raise MisalignedReportError(
                f"{kind.value} report {report_id}: {bits} bits is not byte-aligned"
            )

    return ReportDescriptor(collections=tuple(b.freeze() for b in top_level))


_HEX_TEXT_RE = re.compile(r"^[0-9a-fA-FxX,\s]*$")


def parse_hex_text(text: str) -> bytes:
    """Whitespace/comma-separated hex bytes (`05 01 09 04 ...`) to bytes."""
    out = bytearray()
    for token in re.split(r"[,\s]+", text.strip()):
        if not token:
            continue
        if token.lower().startswith("0x"):
            token = token[2:]
        if len(token) % 2:
            token = "0" + token
        try:
            out.extend(bytes.fromhex(token))
        except ValueError:
            raise DescriptorError(f"invalid hex token {token!r}") from None
    return bytes(out)


def read_descriptor_file(path) -> bytes:
    """Read descriptor bytes from a raw binary or hex text file."""
    with open(path, "rb") as handle:
        raw = handle.read()
    try:
        text = raw.decode("ascii")
    except UnicodeDecodeError:
        return raw
    if _HEX_TEXT_RE.match(text):
        return parse_hex_text(text)
    return raw


def _field_to_json(spec: ReportFieldSpec) -> dict:
    return {
        "reportId": spec.report_id,
        "kind": spec.kind.value,
        "bitOffset": spec.bit_offset,
        "bitSize": spec.bit_size,
        "count": spec.count,
        "logicalMin": spec.logical_min,
        "logicalMax": spec.logical_max,
        "usages": [[page, usage] for page, usage in spec.usages],
        "flags": {
            "constant": spec.flags.constant,
            "variable": spec.flags.variable,
            "relative": spec.flags.relative,
        },
    }


def _collection_to_json(collection: Collection) -> dict:
    return {
        "usagePage": collection.usage_page,
        "usage": collection.usage,
        "collectionType": collection.collection_type,
        "children": [_collection_to_json(c) for c in collection.children],
        "fields": [_field_to_json(s) for s in collection.field_specs],
    }


def descriptor_to_json(desc: ReportDescriptor) -> dict:
    """JSON-ready tree mirroring the parsed structure."""
    return {"collections": [_collection_to_json(c) for c in desc.collections]}
