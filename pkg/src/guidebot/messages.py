"""Message payloads carried on the bus, plus the well-known topic names.

Every payload knows how to render itself as a plain JSON-able dict; these
dicts are the wire schema used verbatim by the event log and the gateway.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

TOPIC_TRANSCRIPT = "speech.transcript"
TOPIC_GOAL = "nav.goal"
TOPIC_STOP = "nav.stop"
TOPIC_SAY = "speech.say"
TOPIC_STATE = "robot.state"


@dataclass(frozen=True)
class TranscriptMsg:
    """One recognized utterance entering the pipeline."""

    text: str
    timestamp_ms: int
    confidence: Optional[float] = None

    kind = "transcript"

    def as_dict(self) -> dict:
        d: dict = {"text": self.text, "timestamp_ms": self.timestamp_ms}
        if self.confidence is not None:
            d["confidence"] = self.confidence
        return d


@dataclass(frozen=True)
class GoalMsg:
    """Preset coordinates for a named location, sent to the navigation side."""

    location_id: str
    floor_id: str
    cell: tuple[int, int]
    heading_rad: float

    kind = "goal"

    def as_dict(self) -> dict:
        return {
            "location_id": self.location_id,
            "floor_id": self.floor_id,
            "cell": list(self.cell),
            "heading_rad": self.heading_rad,
        }


@dataclass(frozen=True)
class StopMsg:
    """Hold-in-place command."""

    kind = "stop"

    def as_dict(self) -> dict:
        return {}


@dataclass(frozen=True)
class SpeechOutMsg:
    """Text the robot should speak back to the user."""

    text: str

    kind = "speech_out"

    def as_dict(self) -> dict:
        return {"text": self.text}


@dataclass(frozen=True)
class StateMsg:
    """Robot pose and motion status snapshot, published every tick.

    ``goal_location_id`` and ``path`` are present only while navigating;
    ``path`` is the planner output already rendered as a dict.
    """

    floor_id: str
    cell: tuple[int, int]
    heading_rad: float
    status: str
    goal_location_id: Optional[str] = None
    path: Optional[dict] = None

    kind = "state"

    def as_dict(self) -> dict:
        d: dict = {
            "floor_id": self.floor_id,
            "cell": list(self.cell),
            "heading_rad": self.heading_rad,
            "status": self.status,
        }
        if self.goal_location_id is not None:
            d["goal_location_id"] = self.goal_location_id
        if self.path is not None:
            d["path"] = self.path
        return d


#: payload type expected on each well-known topic
TOPIC_KINDS = {
    TOPIC_TRANSCRIPT: TranscriptMsg,
    TOPIC_GOAL: GoalMsg,
    TOPIC_STOP: StopMsg,
    TOPIC_SAY: SpeechOutMsg,
    TOPIC_STATE: StateMsg,
}


def register_default_topics(bus) -> None:
    """Register the five pipeline topics (idempotent)."""
    for topic, kind in TOPIC_KINDS.items():
        bus.register_topic(topic, kind)
