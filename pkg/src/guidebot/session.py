"""One live session: bus wiring, deterministic event loop, event log.

All pending bus messages are drained before each tick, in bus publish order,
so a replay of the same (map, lexicon, script) inputs is reproducible byte
for byte. Logical time is the tick count: records emitted while processing
tick N carry t = N, records emitted between ticks carry the count of ticks
completed so far.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional

from . import simrobot
from .cloudadapters import SpeakerService, TtsClient
from .errors import GuidebotError
from .messages import (
    TOPIC_GOAL,
    TOPIC_KINDS,
    TOPIC_STOP,
    TOPIC_TRANSCRIPT,
    GoalMsg,
    TranscriptMsg,
    register_default_topics,
)
from .msgbus import MessageBus, drain_merged
from .simrobot import RobotState, SimConfig
from .sitemap import SiteMap
from .speechflow import (
    HandleOutcome,
    Lexicon,
    WakeConfig,
    handle_transcript,
    validate_lexicon,
)

logger = logging.getLogger(__name__)

#: safety cap when running a replay to quiescence
SETTLE_CAP = 10_000


@dataclass(frozen=True)
class EventRecord:
    t: int
    kind: str
    payload: dict

    def to_json_line(self) -> str:
        return json.dumps(
            {"t": self.t, "kind": self.kind, "payload": self.payload},
            separators=(",", ":"),
        )


def event_log_ndjson(records: list[EventRecord]) -> str:
    return "".join(rec.to_json_line() + "\n" for rec in records)


class Session:
    """Wires speech handling and the robot onto one bus.

    Thread-safe: injections and ticks serialize on an internal lock, so a
    live gateway can tick on a background thread while requests inject.
    """

    def __init__(
        self,
        site: SiteMap,
        lexicon: Lexicon,
        wake: WakeConfig,
        sim_cfg: SimConfig,
        tts_client: Optional[TtsClient] = None,
        audio_dir=None,
    ):
        validate_lexicon(lexicon, site)
        self.site = site
        self.lexicon = lexicon
        self.wake = wake
        self.cfg = sim_cfg
        self.bus = MessageBus()
        register_default_topics(self.bus)
        self.state: RobotState = simrobot.initial_state(site, sim_cfg)
        self.ticks = 0
        self.events: list[EventRecord] = []
        self._transcripts = self.bus.subscribe(TOPIC_TRANSCRIPT)
        self._goals = self.bus.subscribe(TOPIC_GOAL)
        self._stops = self.bus.subscribe(TOPIC_STOP)
        self._log_subs = [self.bus.subscribe(t) for t in TOPIC_KINDS]
        self.speaker = (
            SpeakerService(self.bus, tts_client, audio_dir, clock=self.now_ms)
            if tts_client is not None and audio_dir is not None
            else None
        )
        self._listeners: list[Callable[[EventRecord], None]] = []
        self._lock = threading.RLock()

    # -- time ---------------------------------------------------------------

    def now_ms(self) -> int:
        return self.ticks * self.cfg.tick_ms

    # -- listeners (gateway stream) ------------------------------------------

    def add_listener(self, callback: Callable[[EventRecord], None]) -> None:
        with self._lock:
            self._listeners.append(callback)

    def remove_listener(self, callback: Callable[[EventRecord], None]) -> None:
        with self._lock:
            if callback in self._listeners:
                self._listeners.remove(callback)

    def _collect_events(self) -> None:
        for env in drain_merged(*self._log_subs):
            rec = EventRecord(t=self.ticks, kind=env.payload.kind, payload=env.payload.as_dict())
            self.events.append(rec)
            for cb in list(self._listeners):
                try:
                    cb(rec)
                except Exception:
                    logger.exception("event listener failed")

    # -- the event loop -------------------------------------------------------

    def _process_transcripts(self) -> list[HandleOutcome]:
        outcomes = []
        for env in self._transcripts.drain():
            try:
                outcomes.append(handle_transcript(
                    env.payload, self.wake, self.lexicon, self.site, self.bus
                ))
            except GuidebotError:
                logger.exception("transcript handling failed; utterance dropped")
                outcomes.append(HandleOutcome(commanded=False))
        return outcomes

    def inject(self, text: str, confidence: Optional[float] = None) -> HandleOutcome:
        """Publish one utterance and handle it immediately.

        Any nav.goal / nav.stop the utterance produces stays queued until the
        next tick, like every other command.
        """
        with self._lock:
            msg = TranscriptMsg(text=text, timestamp_ms=self.now_ms(), confidence=confidence)
            self.bus.publish(TOPIC_TRANSCRIPT, msg)
            outcome = self._process_transcripts()[-1]
            self._collect_events()
            return outcome

    def tick(self) -> RobotState:
        """Drain all pending messages, then advance the robot one tick."""
        with self._lock:
            self._process_transcripts()
            for env in drain_merged(self._goals, self._stops):
                if isinstance(env.payload, GoalMsg):
                    self.state = simrobot.on_goal(self.state, env.payload, self.site, self.bus)
                else:
                    self.state = simrobot.on_stop(self.state)
            self.ticks += 1
            self.state = simrobot.tick(self.state, self.cfg, self.site, self.bus)
            if self.speaker is not None:
                self.speaker.drain_pending()
            self._collect_events()
            return self.state

    # -- snapshots ------------------------------------------------------------

    def state_payload(self) -> dict:
        with self._lock:
            return simrobot.state_msg(self.state).as_dict()

    def is_quiescent(self) -> bool:
        with self._lock:
            return not isinstance(self.state.status, simrobot.Navigating)

    # -- scripted and live driving ---------------------------------------------

    def run_script(self, lines: list[str], settle: bool = True) -> None:
        """Replay a script: utterances in order, ``#tick N`` advances time.

        Lines starting with ``#`` other than ``#tick`` are comments; blank
        lines are skipped. Afterwards the session settles: it ticks until the
        robot is no longer navigating (at least once), so the log always ends
        on a state snapshot.
        """
        for raw in lines:
            line = raw.rstrip("\n")
            stripped = line.strip()
            if not stripped:
                continue
            if stripped.startswith("#tick"):
                arg = stripped[len("#tick"):].strip()
                count = int(arg) if arg else 1
                for _ in range(count):
                    self.tick()
            elif stripped.startswith("#"):
                continue
            else:
                self.inject(line)
        if settle:
            self.settle()

    def settle(self, min_ticks: int = 1, cap: int = SETTLE_CAP) -> None:
        for _ in range(min_ticks):
            self.tick()
        remaining = cap - min_ticks
        while not self.is_quiescent():
            if remaining <= 0:
                raise RuntimeError(f"robot still navigating after {cap} settle ticks")
            self.tick()
            remaining -= 1

    def run_forever(self, stop_event: threading.Event, real_time: bool = True) -> None:
        """Tick until the stop event is set (the live-session loop)."""
        period = self.cfg.tick_ms / 1000.0
        while not stop_event.is_set():
            started = time.monotonic()
            try:
                self.tick()
            except Exception:
                logger.exception("tick failed; session continues")
            if real_time:
                delay = period - (time.monotonic() - started)
                if delay > 0:
                    stop_event.wait(delay)
