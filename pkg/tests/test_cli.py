"""CLI tests, in-process via main(argv) plus one subprocess smoke test."""

import json
import socket
import subprocess
import sys
from pathlib import Path

import pytest

from hidwire.cli import main

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
JOYSTICK_HEX = "05 01 09 04 a1 01 09 30 09 31 15 81 25 7f 75 08 95 02 81 02 c0"


@pytest.fixture
def joystick_file(tmp_path):
    path = tmp_path / "joystick.hex"
    path.write_text(JOYSTICK_HEX)
    return path


def test_dump_descriptor_joystick(joystick_file, capsys):
    assert main(["dump-descriptor", str(joystick_file)]) == 0
    tree = json.loads(capsys.readouterr().out)
    assert len(tree["collections"]) == 1
    assert tree["collections"][0]["usagePage"] == 1
    assert tree["collections"][0]["usage"] == 4


def test_dump_descriptor_truncated(tmp_path, capsys):
    path = tmp_path / "bad.hex"
    path.write_text("26 ff")  # 2-byte payload declared, 1 present
    assert main(["dump-descriptor", str(path)]) == 1
    err = capsys.readouterr().err
    assert "TruncatedItem" in err


def test_dump_descriptor_empty(tmp_path, capsys):
    path = tmp_path / "empty.hex"
    path.write_text("")
    assert main(["dump-descriptor", str(path)]) == 0
    assert json.loads(capsys.readouterr().out) == {"collections": []}


def test_dump_descriptor_missing_file(tmp_path, capsys):
    assert main(["dump-descriptor", str(tmp_path / "nope.hex")]) == 1
    assert "cannot read" in capsys.readouterr().err


def test_decode_command(joystick_file, capsys):
    code = main([
        "decode", "--descriptor", str(joystick_file),
        "--report-id", "0", "--data", "807f",
    ])
    assert code == 0
    fields = json.loads(capsys.readouterr().out)
    assert [f["value"] for f in fields] == [-128, 127]
    assert [f["inRange"] for f in fields] == [False, True]


def test_decode_unknown_report(joystick_file, capsys):
    code = main([
        "decode", "--descriptor", str(joystick_file),
        "--report-id", "9", "--data", "00",
    ])
    assert code == 1
    assert "UnknownReport" in capsys.readouterr().err


def test_replay_button_log(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text('{"t_ms":0,"reportId":63,"data":"01"}\n')
    assert main(["replay", str(log), "--json"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    assert json.loads(lines[0]) == {"type": "button", "button": "A", "t_ms": 0}


def test_replay_empty_log(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text("")
    assert main(["replay", str(log)]) == 0
    assert capsys.readouterr().out == ""


def test_replay_ten_jump_fixture(capsys):
    assert main(["replay", str(FIXTURES / "ten_jumps.jsonl"), "--json"]) == 0
    lines = capsys.readouterr().out.splitlines()
    jumps = [json.loads(l) for l in lines if json.loads(l)["type"] == "jump"]
    assert len(jumps) == 10


def test_replay_human_format(capsys):
    assert main(["replay", str(FIXTURES / "joycon_session.jsonl")]) == 0
    out = capsys.readouterr().out
    assert "button A" in out
    assert "jump peak=" in out
    assert "imu accel=" in out


def test_replay_deterministic_output(capsys):
    assert main(["replay", str(FIXTURES / "joycon_session.jsonl"), "--json"]) == 0
    first = capsys.readouterr().out
    assert main(["replay", str(FIXTURES / "joycon_session.jsonl"), "--json"]) == 0
    second = capsys.readouterr().out
    assert first == second


def test_replay_malformed_log(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text('{"t_ms":0,"reportId":63,"data":"XY"}\n')
    assert main(["replay", str(log)]) == 1
    assert "ReplayParseError" in capsys.readouterr().err


def test_bad_config_exits_2(tmp_path, capsys):
    log = tmp_path / "log.jsonl"
    log.write_text("")
    config = tmp_path / "hidwire.toml"
    config.write_text("[jump]\nt_hgih_g = 2.0\n")  # typo must be fatal
    assert main(["replay", str(log), "--config", str(config)]) == 2
    assert "bad config" in capsys.readouterr().err


def test_config_thresholds_apply(tmp_path, capsys):
    config = tmp_path / "hidwire.toml"
    # raise the trigger threshold above the fixture's 2.5 g spikes
    config.write_text("[jump]\nt_high_g = 3.5\nt_low_g = 1.0\n")
    assert main([
        "replay", str(FIXTURES / "ten_jumps.jsonl"), "--config", str(config), "--json",
    ]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert not any(json.loads(l)["type"] == "jump" for l in lines)


def test_serve_port_in_use(capsys):
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as blocker:
        blocker.bind(("127.0.0.1", 0))
        port = blocker.getsockname()[1]
        code = main(["serve", "--port", str(port)])
    assert code == 1
    assert "PortInUse" in capsys.readouterr().err


def test_serve_bad_config(tmp_path, capsys):
    config = tmp_path / "hidwire.toml"
    config.write_text("[serve]\nporrt = 1\n")
    assert main(["serve", "--config", str(config)]) == 2


def test_console_script_subprocess(tmp_path):
    path = tmp_path / "joystick.hex"
    path.write_text(JOYSTICK_HEX)
    result = subprocess.run(
        [sys.executable, "-m", "hidwire.cli", "dump-descriptor", str(path)],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["collections"]
