"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data error (bad trace/scene files).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .replay import TraceError, parse_trace, replay as replay_trace
from .scene import canonical_serialize, deserialize, export_mesh


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser() -> _Parser:
    p = _Parser(prog="airsketch", description="Deterministic immersive-sketching engine")
    sub = p.add_subparsers(dest="command", required=True)

    rp = sub.add_parser("replay", help="replay a trace and emit the scene")
    rp.add_argument("--trace", required=True)
    rp.add_argument("--out", help="write the final scene (.scene.json)")
    rp.add_argument("--print-hash", action="store_true")

    ex = sub.add_parser("export", help="export a scene to a mesh file")
    ex.add_argument("--scene", required=True)
    ex.add_argument("--format", default="obj", choices=["obj"])
    ex.add_argument("--out", required=True)

    va = sub.add_parser("validate", help="check a trace file")
    va.add_argument("--trace", required=True)

    sv = sub.add_parser("serve", help="run the live session endpoint")
    sv.add_argument("--port", type=int, default=None)
    return p


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise TraceError(f"cannot read {path}: {e.strerror}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        if args.command == "replay":
            trace = parse_trace(_read(args.trace))
            scene, digest = replay_trace(trace)
            if args.out:
                Path(args.out).write_bytes(canonical_serialize(scene))
            if args.print_hash:
                sys.stdout.write(digest + "\n")
            return 0
        if args.command == "export":
            scene = deserialize(_read(args.scene))
            Path(args.out).write_bytes(export_mesh(scene, args.format))
            return 0
        if args.command == "validate":
            parse_trace(_read(args.trace))
            return 0
        if args.command == "serve":
            from .server import serve
            serve(port=args.port)
            return 0
    except (TraceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 1


if __name__ == "__main__":
    sys.exit(main())
