"""Command line entry point.

Thin client over the core package: ``validate`` checks map and lexicon
files, ``replay`` runs a scripted session to completion and prints the
event log, ``run`` serves a live session for the operator console.

Exit codes: 0 success, 1 validation failure, 2 bad usage.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .cloudadapters import MockTtsClient
from .errors import GuidebotError
from .session import Session
from .simrobot import SimConfig
from .sitemap import GoalPose, SiteMap, load_site_map
from .speechflow import Lexicon, WakeConfig, load_lexicon, validate_lexicon

LISTEN_ENV = "GUIDEBOT_LISTEN"
DEFAULT_LISTEN = "127.0.0.1:8000"


def _read(path: str, what: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise GuidebotError(f"cannot read {what} file {path!r}: {exc}") from exc


def _load_inputs(args) -> tuple[SiteMap, Lexicon, WakeConfig]:
    site = load_site_map(_read(args.map, "map"))
    cfg = load_lexicon(_read(args.lexicon, "lexicon"))
    lexicon = cfg.lexicon
    validate_lexicon(lexicon, site)
    wake = cfg.wake
    if getattr(args, "wake", None):
        wake = WakeConfig.from_text(args.wake)
    return site, lexicon, wake


def _default_start(site: SiteMap) -> GoalPose:
    """First free cell (row-major) of the first floor in the map file."""
    floor_id, grid = next(iter(site.floors.items()))
    for row in range(grid.height):
        for col in range(grid.width):
            if grid.is_free((col, row)):
                return GoalPose(floor_id=floor_id, cell=(col, row), heading_rad=0.0)
    raise GuidebotError(f"floor {floor_id!r} has no free cell")  # unreachable: load checks


def _parse_start(site: SiteMap, text: str | None) -> GoalPose:
    if text is None:
        return _default_start(site)
    try:
        floor_id, cell_text = text.split(":", 1)
        col_text, row_text = cell_text.split(",", 1)
        pose = GoalPose(floor_id=floor_id, cell=(int(col_text), int(row_text)))
    except ValueError:
        raise GuidebotError(f"bad --start {text!r}, expected FLOOR:COL,ROW") from None
    if not site.floor(pose.floor_id).is_free(pose.cell):
        raise GuidebotError(f"start cell {text!r} is not a free cell")
    return pose


def _parse_listen(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise GuidebotError(f"bad listen address {text!r}, expected HOST:PORT")
    return host, int(port)


def _build_session(args, site: SiteMap, lexicon: Lexicon, wake: WakeConfig) -> Session:
    sim_cfg = SimConfig(
        start=_parse_start(site, getattr(args, "start", None)),
        tick_ms=getattr(args, "tick_ms", 100),
    )
    audio_dir = getattr(args, "audio_dir", None)
    return Session(
        site, lexicon, wake, sim_cfg,
        tts_client=MockTtsClient() if audio_dir else None,
        audio_dir=audio_dir,
    )


def cmd_validate(args) -> int:
    _load_inputs(args)
    print("map and lexicon are valid")
    return 0


def cmd_replay(args) -> int:
    site, lexicon, wake = _load_inputs(args)
    session = _build_session(args, site, lexicon, wake)
    session.run_script(_read(args.script, "script").splitlines())
    for rec in session.events:
        print(rec.to_json_line())
    print(json.dumps(
        {"t": session.ticks, "kind": "final_state", "payload": session.state_payload()},
        separators=(",", ":"),
    ))
    return 0


def cmd_run(args) -> int:
    import uvicorn

    from .service import create_app

    site, lexicon, wake = _load_inputs(args)
    session = _build_session(args, site, lexicon, wake)
    listen = args.listen or os.environ.get(LISTEN_ENV) or DEFAULT_LISTEN
    host, port = _parse_listen(listen)
    static_dir = args.static if args.static and Path(args.static).is_dir() else None
    app = create_app(session, static_dir=static_dir)
    print(f"serving on http://{host}:{port} (map={args.map}, lexicon={args.lexicon})")
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="guidebot")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--map", required=True, help="site map JSON file")
        p.add_argument("--lexicon", required=True, help="word dictionary JSON file")

    p_run = sub.add_parser("run", help="serve a live session")
    add_common(p_run)
    p_run.add_argument("--wake", help="override the lexicon's wake phrase")
    p_run.add_argument("--tick-ms", dest="tick_ms", type=int, default=100)
    p_run.add_argument("--listen", help=f"HOST:PORT (or ${LISTEN_ENV}; default {DEFAULT_LISTEN})")
    p_run.add_argument("--start", help="robot start as FLOOR:COL,ROW")
    p_run.add_argument("--audio-dir", dest="audio_dir", help="write synthesized clips here")
    p_run.add_argument("--static", help="serve an operator console from this directory")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="run a scripted session to completion")
    add_common(p_replay)
    p_replay.add_argument("--script", required=True, help="utterance script file")
    p_replay.add_argument("--start", help="robot start as FLOOR:COL,ROW")
    p_replay.add_argument("--tick-ms", dest="tick_ms", type=int, default=100)
    p_replay.add_argument("--audio-dir", dest="audio_dir", help="write synthesized clips here")
    p_replay.set_defaults(func=cmd_replay)

    p_validate = sub.add_parser("validate", help="check map and lexicon files")
    add_common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuidebotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
