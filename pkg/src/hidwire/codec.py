"""Report body codec driven by ``ReportFieldSpec``s.

Bit order is the single source of truth for both directions: fields pack
little-endian, LSB-first within bytes, so bit ``i`` of a report body lives in
``body[i // 8]`` at position ``i % 8``.  Values sign-extend iff the field's
logical minimum is negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .descriptor import ReportDescriptor, ReportFieldSpec, ReportKind

__all__ = [
    "DecodedField",
    "CodecError",
    "BufferTooShortError",
    "UnknownReportError",
    "ValueOutOfRangeError",
    "ArityMismatchError",
    "extract_field",
    "decode_input_report",
    "encode_output_report",
]


class CodecError(ValueError):
    """Base class for report encode/decode failures."""


class BufferTooShortError(CodecError):
    pass


class UnknownReportError(CodecError):
    """Descriptor defines no fields for the requested (kind, report id)."""


class ValueOutOfRangeError(CodecError):
    pass


class ArityMismatchError(CodecError):
    pass


@dataclass(frozen=True)
class DecodedField:
    """One decoded element: resolved usage, signed value, raw bit pattern.

    ``in_range`` is False when the raw pattern falls outside the field's
    logical bounds; the value is reported as-is, never clamped.
    """

    usage: tuple[int, int]
    value: int
    raw: int
    in_range: bool


def _required_bytes(spec: ReportFieldSpec) -> int:
    return (spec.bit_offset + spec.total_bits + 7) // 8


def _extract_raw(body_int: int, start_bit: int, bit_size: int) -> int:
    return (body_int >> start_bit) & ((1 << bit_size) - 1)


def _sign_extend(raw: int, bit_size: int) -> int:
    if raw & (1 << (bit_size - 1)):
        return raw - (1 << bit_size)
    return raw


def extract_field(data: bytes, spec: ReportFieldSpec, index: int) -> int:
    """Element ``index`` of ``spec`` out of a report body.

    Sign-extends iff the field's logical minimum is negative.
    """
    if not 0 <= index < spec.count:
        raise IndexError(f"element index {index} outside 0..{spec.count - 1}")
    if len(data) < _required_bytes(spec):
        raise BufferTooShortError(
            f"field needs {_required_bytes(spec)} bytes, buffer holds {len(data)}"
        )
    body_int = int.from_bytes(data, "little")
    raw = _extract_raw(body_int, spec.bit_offset + index * spec.bit_size, spec.bit_size)
    if spec.is_signed:
        return _sign_extend(raw, spec.bit_size)
    return raw


def _element_usage(spec: ReportFieldSpec, index: int) -> tuple[int, int]:
    # fewer usages than elements: the last usage applies to the rest
    if not spec.usages:
        return (0, 0)
    if index < len(spec.usages):
        return spec.usages[index]
    return spec.usages[-1]


def decode_input_report(
    desc: ReportDescriptor, report_id: int, data: bytes
) -> list[DecodedField]:
    """Decode an input report body into (usage, value) pairs.

    Constant (padding) fields are skipped.  Variable fields yield one
    ``DecodedField`` per element; array fields yield one per element whose
    value is inside the logical range (null states are empty slots), with the
    usage resolved by index into the field's usage list.
    """
    specs = desc.fields_for_report(ReportKind.INPUT, report_id)
    if not specs:
        raise UnknownReportError(f"no input report with id {report_id}")
    needed = desc.report_byte_length(ReportKind.INPUT, report_id)
    if len(data) < needed:
        raise BufferTooShortError(
            f"input report {report_id} needs {needed} bytes, got {len(data)}"
        )
    body_int = int.from_bytes(data, "little")
    out: list[DecodedField] = []
    for spec in specs:
        if spec.flags.constant:
            continue
        for index in range(spec.count):
            raw = _extract_raw(
                body_int, spec.bit_offset + index * spec.bit_size, spec.bit_size
            )
            value = _sign_extend(raw, spec.bit_size) if spec.is_signed else raw
            if spec.flags.variable:
                in_range = spec.logical_min <= value <= spec.logical_max
                out.append(
                    DecodedField(_element_usage(spec, index), value, raw, in_range)
                )
            else:
                # array element: value is a usage index, out of range = null slot
                if not spec.logical_min <= value <= spec.logical_max:
                    continue
                slot = value - spec.logical_min
                if spec.usages:
                    usage = spec.usages[min(slot, len(spec.usages) - 1)]
                else:
                    usage = (0, 0)
                out.append(DecodedField(usage, value, raw, True))
    return out


def encode_output_report(
    desc: ReportDescriptor, report_id: int, values: Sequence[int]
) -> bytes:
    """Encode one value per non-constant element into an output report body.

    Round-trips with ``extract_field``: padding bits stay zero and every
    in-range value decodes back to itself.
    """
    specs = desc.fields_for_report(ReportKind.OUTPUT, report_id)
    if not specs:
        raise UnknownReportError(f"no output report with id {report_id}")
    arity = sum(s.count for s in specs if not s.flags.constant)
    if len(values) != arity:
        raise ArityMismatchError(
            f"output report {report_id} takes {arity} values, got {len(values)}"
        )
    body_int = 0
    cursor = 0
    for spec in specs:
        if spec.flags.constant:
            continue
        mask = (1 << spec.bit_size) - 1
        for index in range(spec.count):
            value = values[cursor]
            cursor += 1
            if not spec.logical_min <= value <= spec.logical_max:
                raise ValueOutOfRangeError(
                    f"value {value} outside [{spec.logical_min}, {spec.logical_max}]"
                )
            raw = value & mask  # two's complement within the field width
            body_int |= raw << (spec.bit_offset + index * spec.bit_size)
    return body_int.to_bytes(desc.report_byte_length(ReportKind.OUTPUT, report_id), "little")
