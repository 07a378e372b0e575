"""In-process topic bus with per-topic FIFO broadcast delivery.

Modeled on robot middleware topics: publishers fire and forget, every live
subscription gets its own queue, late subscribers see only what is published
after they subscribe. A single lock makes publish atomic with respect to
subscription creation; ordering is guaranteed per topic only, but every
envelope also carries a bus-wide ``stamp`` so consumers that read several
topics can reconstruct arrival order deterministically.
"""

from __future__ import annotations

import logging
import re
import threading
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    ConflictingRegistration,
    InvalidTopicName,
    PayloadKindMismatch,
    UnknownTopic,
)

logger = logging.getLogger(__name__)

_TOPIC_RE = re.compile(r"^[a-z0-9]+(\.[a-z0-9]+)*$")

#: queue depth at which a subscription logs a one-shot warning
HIGH_WATER = 10_000


def validate_topic_name(name: str) -> str:
    """Return ``name`` if it is a valid dot-separated topic, else raise."""
    if not isinstance(name, str) or not _TOPIC_RE.match(name):
        raise InvalidTopicName(f"bad topic name: {name!r}")
    return name


@dataclass(frozen=True)
class Envelope:
    topic: str
    seq: int          # per-topic, starts at 1, no gaps
    stamp: int        # bus-wide publish counter, for cross-topic ordering
    payload: Any


class Subscription:
    """FIFO queue of envelopes published to one topic after subscribing."""

    def __init__(self, topic: str):
        self.topic = topic
        self._queue: deque[Envelope] = deque()
        self._warned = False

    def _push(self, env: Envelope) -> None:
        self._queue.append(env)
        if not self._warned and len(self._queue) > HIGH_WATER:
            self._warned = True
            logger.warning("subscription on %s passed %d queued messages", self.topic, HIGH_WATER)

    def pop(self) -> Envelope | None:
        """Next undelivered envelope, or None if the queue is empty."""
        try:
            return self._queue.popleft()
        except IndexError:
            return None

    def drain(self) -> list[Envelope]:
        """All undelivered envelopes, in publish order."""
        out = list(self._queue)
        self._queue.clear()
        return out

    def __len__(self) -> int:
        return len(self._queue)


@dataclass
class _Topic:
    kind: type
    next_seq: int = 1
    subscriptions: list[Subscription] = field(default_factory=list)


class MessageBus:
    """Topic registry plus broadcast delivery. Safe for concurrent use."""

    def __init__(self):
        self._topics: dict[str, _Topic] = {}
        self._lock = threading.Lock()
        self._next_stamp = 1

    def register_topic(self, topic: str, kind: type) -> None:
        """Declare ``topic`` to carry payloads of ``kind``.

        Re-registering with the identical kind is a no-op so that modules can
        each register what they use at startup.
        """
        validate_topic_name(topic)
        with self._lock:
            existing = self._topics.get(topic)
            if existing is None:
                self._topics[topic] = _Topic(kind=kind)
            elif existing.kind is not kind:
                raise ConflictingRegistration(
                    f"topic {topic!r} already registered for {existing.kind.__name__}, "
                    f"not {kind.__name__}"
                )

    def publish(self, topic: str, payload: Any) -> int:
        """Enqueue ``payload`` to every live subscription; return its seq.

        Fire and forget: succeeds (and burns a seq) even with no subscribers.
        """
        with self._lock:
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(f"topic {topic!r} was never registered")
            if not isinstance(payload, t.kind):
                raise PayloadKindMismatch(
                    f"topic {topic!r} carries {t.kind.__name__}, got {type(payload).__name__}"
                )
            seq = t.next_seq
            t.next_seq += 1
            stamp = self._next_stamp
            self._next_stamp += 1
            env = Envelope(topic=topic, seq=seq, stamp=stamp, payload=payload)
            for sub in t.subscriptions:
                sub._push(env)
            return seq

    def subscribe(self, topic: str) -> Subscription:
        """New subscription seeing only messages published after this call."""
        with self._lock:
            t = self._topics.get(topic)
            if t is None:
                raise UnknownTopic(f"topic {topic!r} was never registered")
            sub = Subscription(topic)
            t.subscriptions.append(sub)
            return sub

    def unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            t = self._topics.get(sub.topic)
            if t is not None and sub in t.subscriptions:
                t.subscriptions.remove(sub)

    def topics(self) -> dict[str, type]:
        with self._lock:
            return {name: t.kind for name, t in self._topics.items()}


def drain_merged(*subs: Subscription) -> list[Envelope]:
    """Drain several subscriptions and interleave by bus-wide publish order."""
    merged: list[Envelope] = []
    for sub in subs:
        merged.extend(sub.drain())
    merged.sort(key=lambda env: env.stamp)
    return merged
