"""Joy-Con driver tests against the frozen byte-layout table."""

import struct

import pytest

from hidwire.device import HidRegistry, PermissionStore, matches_filter, DeviceFilter
from hidwire.joycon import (
    ACCEL_G_PER_LSB,
    GYRO_DPS_PER_LSB,
    EmptyReportError,
    ImuFrame,
    InvalidModeError,
    JoyConSession,
    JoyConSide,
    ReportTooShortError,
    WrongModeError,
    build_enable_imu_report,
    build_joycon_descriptor_bytes,
    build_set_mode_report,
    build_standard_report,
    decode_simple_button,
    decode_standard_report,
    identify,
    raw_to_physical,
)


class FakeDevice:
    def __init__(self, vendor_id, product_id):
        self.vendor_id = vendor_id
        self.product_id = product_id


@pytest.mark.parametrize(
    "vendor,product,side",
    [
        (0x057E, 0x2006, JoyConSide.LEFT),
        (0x057E, 0x2007, JoyConSide.RIGHT),
        (0x054C, 0x05C4, None),
        (0x057E, 0x2008, None),
        (0x0001, 0x2006, None),
    ],
)
def test_identify(vendor, product, side):
    assert identify(FakeDevice(vendor, product)) is side


def test_identify_consistent_with_filters():
    filters = [
        DeviceFilter(vendor_id=0x057E, product_id=0x2006),
        DeviceFilter(vendor_id=0x057E, product_id=0x2007),
    ]
    registry = HidRegistry(store=PermissionStore())
    for vendor in (0x057E, 0x054C, 0x0000):
        for product in (0x2006, 0x2007, 0x2008, 0x05C4):
            device = registry.connect(vendor, product, "d", build_joycon_descriptor_bytes())
            matched = any(matches_filter(device, f) for f in filters)
            assert (identify(device) is not None) == matched


@pytest.mark.parametrize(
    "body,button",
    [(b"\x00", None), (b"\x01", "A"), (b"\x02", "X"), (b"\x04", "B"), (b"\x08", "Y")],
)
def test_simple_button_map(body, button):
    event = decode_simple_button(0x2007, 0x3F, body, t_ms=7)
    if button is None:
        assert event is None
    else:
        assert event.button == button
        assert event.t_ms == 7


def test_simple_button_left_always_none():
    for body in (b"\x00", b"\x01", b"\x02", b"\x04", b"\x08"):
        assert decode_simple_button(0x2006, 0x3F, body) is None


def test_simple_button_wrong_report_id():
    assert decode_simple_button(0x2007, 0x30, b"\x01") is None


def test_simple_button_chord_dropped():
    assert decode_simple_button(0x2007, 0x3F, b"\x03") is None
    assert decode_simple_button(0x2007, 0x3F, b"\x10") is None


def test_simple_button_empty_body():
    with pytest.raises(EmptyReportError):
        decode_simple_button(0x2007, 0x3F, b"")


def test_simple_button_injective_on_listed_values():
    outputs = {decode_simple_button(0x2007, 0x3F, bytes([v])) and
               decode_simple_button(0x2007, 0x3F, bytes([v])).button
               for v in (0, 1, 2, 4, 8)}
    assert outputs == {None, "A", "X", "B", "Y"}


def test_raw_to_physical_examples():
    assert raw_to_physical(0, "accel") == 0.0
    assert raw_to_physical(4096, "accel") == pytest.approx(0.999424, rel=1e-9)
    # 32768 * 6103 = 199_983_104, so full negative scale is -1999.83104 dps
    assert raw_to_physical(-32768, "gyro") == pytest.approx(-1999.83104, rel=1e-9)
    assert raw_to_physical(-1, "gyro") == pytest.approx(-0.06103, rel=1e-9)
    with pytest.raises(ValueError):
        raw_to_physical(1, "magnetometer")


def test_standard_report_zero_body():
    bitmap, frames = decode_standard_report(bytes(48))
    assert bitmap == 0
    for frame in frames:
        assert frame.accel == (0.0, 0.0, 0.0)
        assert frame.gyro == (0.0, 0.0, 0.0)


def test_standard_report_accel_scale():
    # accel X raw bytes 00 10 = 4096 in frame 0 (body bytes 12-13)
    body = bytearray(48)
    body[12:14] = b"\x00\x10"
    _, frames = decode_standard_report(bytes(body))
    assert frames[0].accel[0] == pytest.approx(0.999424, rel=1e-9)


def test_standard_report_gyro_negative():
    # gyro X raw bytes ff ff = -1 in frame 0 (body bytes 18-19)
    body = bytearray(48)
    body[18:20] = b"\xff\xff"
    _, frames = decode_standard_report(bytes(body))
    assert frames[0].gyro[0] == pytest.approx(-0.06103, rel=1e-9)


def test_standard_report_button_bitmap_bytes_2_to_4():
    body = bytearray(48)
    body[2], body[3], body[4] = 0x01, 0x02, 0x03
    bitmap, _ = decode_standard_report(bytes(body))
    assert bitmap == 0x030201


def test_standard_report_frame_timestamps():
    _, frames = decode_standard_report(bytes(48), t_ms=100)
    assert [f.t_ms for f in frames] == [100, 105, 110]


def test_standard_report_too_short():
    with pytest.raises(ReportTooShortError):
        decode_standard_report(bytes(47))


def test_standard_report_wrong_mode():
    with pytest.raises(WrongModeError):
        decode_standard_report(bytes(48), report_id=0x3F)


def test_standard_report_roundtrip_exact():
    raw_frames = (
        (100, -200, 300, -400, 500, -600),
        (4096, 0, -4096, 32767, -32768, 1),
        (0, 0, 0, 0, 0, 0),
    )
    body = build_standard_report(button_bitmap=0x000108, raw_frames=raw_frames)
    bitmap, frames = decode_standard_report(body, t_ms=0)
    assert bitmap == 0x000108
    for expected, frame in zip(raw_frames, frames):
        recovered = [
            *(round(a / ACCEL_G_PER_LSB) for a in frame.accel),
            *(round(g / GYRO_DPS_PER_LSB) for g in frame.gyro),
        ]
        assert recovered == list(expected)
        for raw, value in zip(expected[:3], frame.accel):
            assert value == pytest.approx(raw * ACCEL_G_PER_LSB, rel=1e-9)
        for raw, value in zip(expected[3:], frame.gyro):
            assert value == pytest.approx(raw * GYRO_DPS_PER_LSB, rel=1e-9)


def test_build_standard_report_validates_shape():
    with pytest.raises(ValueError):
        build_standard_report(raw_frames=((0,) * 6,) * 2)
    with pytest.raises(ValueError):
        build_standard_report(raw_frames=((0,) * 5,) * 3)


def test_enable_imu_report_layout():
    report_id, body = build_enable_imu_report(counter=0)
    assert report_id == 0x01
    assert body[0] == 0
    assert body[1:9] == bytes(8)  # neutral rumble
    assert body[9] == 0x40
    assert body[10] == 0x01


def test_set_mode_report_layout():
    report_id, body = build_set_mode_report(0x30, counter=5)
    assert report_id == 0x01
    assert body[0] == 5
    assert body[9] == 0x03
    assert body[10] == 0x30
    _, body = build_set_mode_report(0x3F, counter=0)
    assert body[10] == 0x3F


def test_set_mode_invalid():
    with pytest.raises(InvalidModeError):
        build_set_mode_report(0x99)


def test_session_counter_rolls_and_sends():
    registry = HidRegistry(store=PermissionStore())
    device = registry.connect(0x057E, 0x2007, "Joy-Con (R)", build_joycon_descriptor_bytes())
    registry.store.grant(device.device_id)
    registry.open(device)
    session = JoyConSession(registry, device)
    session.enable_imu()
    session.set_input_mode(0x30)
    for _ in range(16):
        session.enable_imu()
    log = registry.outbound_log(device)
    assert len(log) == 18
    counters = [body[0] for _, _, body in log]
    assert counters == [(i % 16) for i in range(18)]
    assert log[1][2][9:11] == bytes([0x03, 0x30])


def test_joycon_descriptor_parses_with_expected_reports():
    from hidwire.descriptor import ReportKind, parse_descriptor

    desc = parse_descriptor(build_joycon_descriptor_bytes())
    assert desc.top_level_usages() == [(0xFF00, 0x01)]
    assert desc.report_byte_length(ReportKind.INPUT, 0x3F) == 1
    assert desc.report_byte_length(ReportKind.INPUT, 0x30) == 48
    assert desc.report_byte_length(ReportKind.OUTPUT, 0x01) == 11
    assert desc.report_byte_length(ReportKind.OUTPUT, 0x10) == 9
