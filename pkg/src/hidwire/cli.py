"""hidwire command line.

Subcommands:
  dump-descriptor  parse a descriptor file (raw or hex text) to a JSON tree
  decode           decode one input report against a descriptor
  replay           decode a JSONL replay log to an event stream on stdout
  serve            WebSocket event service (replay, keyboard sim, or idle)
"""

from __future__ import annotations

import argparse
import json
import socket
import sys
from typing import Optional, Sequence

from .codec import CodecError, decode_input_report
from .config import ConfigError, ToolConfig, default_config, load_config
from .descriptor import DescriptorError, descriptor_to_json, parse_descriptor, \
    parse_hex_text, read_descriptor_file
from .pipeline import replay_events
from .transport import ReplayError, load_replay

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BAD_CONFIG = 2


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_ERROR


def _load_tool_config(path: Optional[str]) -> ToolConfig:
    if path is None:
        return default_config()
    return load_config(path)


def cmd_dump_descriptor(args: argparse.Namespace) -> int:
    try:
        data = read_descriptor_file(args.file)
        desc = parse_descriptor(data)
    except OSError as exc:
        return _fail(f"cannot read {args.file}: {exc}")
    except DescriptorError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    print(json.dumps(descriptor_to_json(desc), indent=2))
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    try:
        desc = parse_descriptor(read_descriptor_file(args.descriptor))
    except OSError as exc:
        return _fail(f"cannot read {args.descriptor}: {exc}")
    except DescriptorError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    try:
        data = parse_hex_text(args.data)
    except DescriptorError as exc:
        return _fail(f"bad --data: {exc}")
    try:
        fields = decode_input_report(desc, args.report_id, data)
    except CodecError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    print(
        json.dumps(
            [
                {
                    "usagePage": f.usage[0],
                    "usage": f.usage[1],
                    "value": f.value,
                    "raw": f.raw,
                    "inRange": f.in_range,
                }
                for f in fields
            ],
            indent=2,
        )
    )
    return EXIT_OK


def _format_event(event: dict) -> str:
    if event["type"] == "button":
        return f"t={event['t_ms']} button {event['button']}"
    if event["type"] == "imu":
        ax, ay, az = event["accel"]
        gx, gy, gz = event["gyro"]
        return (
            f"t={event['t_ms']} imu accel=({ax:.6f},{ay:.6f},{az:.6f})"
            f" gyro=({gx:.5f},{gy:.5f},{gz:.5f})"
        )
    if event["type"] == "jump":
        return f"t={event['t_ms']} jump peak={event['peak_g']:.6f}g"
    return f"t={event.get('t_ms', '?')} {event['type']}"


def cmd_replay(args: argparse.Namespace) -> int:
    try:
        config = _load_tool_config(args.config)
    except ConfigError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    try:
        records = load_replay(args.log)
    except OSError as exc:
        return _fail(f"cannot read {args.log}: {exc}")
    except ReplayError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    for event in replay_events(records, jump_config=config.jump):
        if args.json:
            print(json.dumps(event, separators=(",", ":")))
        else:
            print(_format_event(event))
    return EXIT_OK


def _port_free(port: int) -> bool:
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as probe:
        try:
            probe.bind(("127.0.0.1", port))
        except OSError:
            return False
    return True


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import (
        Broadcaster,
        create_app,
        realtime_replay_producer,
        stdin_sim_producer,
    )

    try:
        config = _load_tool_config(args.config)
    except ConfigError as exc:
        print(f"bad config: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    port = args.port if args.port is not None else config.serve.port
    realtime = args.realtime or config.serve.realtime

    precomputed = None
    broadcaster = None
    producer = None
    if args.replay is not None:
        try:
            records = load_replay(args.replay)
        except OSError as exc:
            return _fail(f"cannot read {args.replay}: {exc}")
        except ReplayError as exc:
            return _fail(f"{type(exc).__name__}: {exc}")
        if realtime:
            broadcaster = Broadcaster()
            producer = realtime_replay_producer(records, broadcaster, jump_config=config.jump)
        else:
            precomputed = replay_events(records, jump_config=config.jump)
    elif args.stdin_sim:
        broadcaster = Broadcaster()
        producer = stdin_sim_producer(broadcaster, jump_config=config.jump)

    if not _port_free(port):
        return _fail(f"PortInUse: port {port} is already bound")

    app = create_app(precomputed=precomputed, broadcaster=broadcaster, producer=producer)
    print(f"serving ws://127.0.0.1:{port}/ws", file=sys.stderr)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hidwire", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_dump = sub.add_parser("dump-descriptor", help="parse a report descriptor to JSON")
    p_dump.add_argument("file", help="descriptor file, raw bytes or hex text")
    p_dump.set_defaults(func=cmd_dump_descriptor)

    p_decode = sub.add_parser("decode", help="decode an input report")
    p_decode.add_argument("--descriptor", required=True, help="descriptor file")
    p_decode.add_argument("--report-id", type=lambda s: int(s, 0), required=True)
    p_decode.add_argument("--data", required=True, help="report body as hex")
    p_decode.set_defaults(func=cmd_decode)

    p_replay = sub.add_parser("replay", help="decode a replay log to stdout")
    p_replay.add_argument("log", help="JSONL replay log")
    p_replay.add_argument("--config", help="TOML config file")
    p_replay.add_argument("--json", action="store_true", help="JSON lines instead of text")
    p_replay.set_defaults(func=cmd_replay)

    p_serve = sub.add_parser("serve", help="run the WebSocket event service")
    p_serve.add_argument("--port", type=int, help="listen port (default from config, 9001)")
    p_serve.add_argument("--config", help="TOML config file")
    source = p_serve.add_mutually_exclusive_group()
    source.add_argument("--replay", help="stream a JSONL replay log")
    source.add_argument("--stdin-sim", action="store_true",
                        help="map stdin lines to synthetic button+jump input")
    p_serve.add_argument("--realtime", action="store_true",
                         help="honor replay timestamps on the wall clock")
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
