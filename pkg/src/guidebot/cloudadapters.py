"""Speech service client seams: mock-first STT/TTS plus the speaker sink.

The pipeline only ever sees these interfaces, so the whole system runs
offline against the deterministic mocks. The HTTP clients are thin adapters
for a real deployment where an authenticated proxy fronts the cloud engines
(Amazon Polly for synthesis, Google Cloud Speech-to-Text for recognition);
they are documented here and deliberately not exercised by the test suite.
"""

from __future__ import annotations

import base64
import logging
import os
import re
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol

from .errors import EmptyAudio, EmptyText, ServiceUnavailable
from .messages import TOPIC_SAY

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SttResult:
    text: str
    confidence: Optional[float] = None

    def __post_init__(self):
        if self.confidence is not None and not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")


@dataclass(frozen=True)
class AudioClip:
    data: bytes
    format_label: str = "pcm16-16k"


@dataclass(frozen=True)
class SpeechClientConfig:
    """Where a real client talks to. Credentials stay in the environment."""

    endpoint: str
    credential_ref: str = "GUIDEBOT_SPEECH_CREDENTIAL"
    timeout_ms: int = 5000

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")

    def credential(self) -> str:
        return os.environ.get(self.credential_ref, "")


class SttClient(Protocol):
    def transcribe(self, audio: AudioClip) -> SttResult: ...


class TtsClient(Protocol):
    def synthesize(self, text: str) -> AudioClip: ...


class MockSttClient:
    """Scripted recognizer: results keyed by clip bytes, else a shared queue."""

    def __init__(self, script: Iterable[str] = ()):
        self._queue: deque[str] = deque(script)
        self._by_clip: dict[bytes, deque[str]] = {}

    def script(self, *texts: str) -> "MockSttClient":
        self._queue.extend(texts)
        return self

    def script_for(self, clip: AudioClip, *texts: str) -> "MockSttClient":
        self._by_clip.setdefault(clip.data, deque()).extend(texts)
        return self

    def transcribe(self, audio: AudioClip) -> SttResult:
        if not audio.data:
            raise EmptyAudio("cannot transcribe an empty clip")
        keyed = self._by_clip.get(audio.data)
        if keyed:
            return SttResult(text=keyed.popleft())
        if self._queue:
            return SttResult(text=self._queue.popleft())
        raise ServiceUnavailable("mock recognizer script exhausted")


class MockTtsClient:
    """Deterministic synthesizer: clip bytes are the UTF-8 of the text."""

    def synthesize(self, text: str) -> AudioClip:
        if not text:
            raise EmptyText("cannot synthesize empty text")
        return AudioClip(data=text.encode("utf-8"), format_label="mock")


class HttpSttClient:
    """Recognizer over plain HTTPS.

    Protocol: POST ``cfg.endpoint`` with JSON ``{"audio": <base64>,
    "format": <label>}`` and a bearer credential read from the environment
    variable named by ``cfg.credential_ref``; the reply is JSON ``{"text":
    str, "confidence": float?}``. Point the endpoint at whatever fronts the
    recognition engine (e.g. a Google Cloud Speech-to-Text proxy).
    """

    def __init__(self, cfg: SpeechClientConfig):
        self.cfg = cfg

    def transcribe(self, audio: AudioClip) -> SttResult:
        if not audio.data:
            raise EmptyAudio("cannot transcribe an empty clip")
        import requests

        try:
            resp = requests.post(
                self.cfg.endpoint,
                json={
                    "audio": base64.b64encode(audio.data).decode("ascii"),
                    "format": audio.format_label,
                },
                headers={"Authorization": f"Bearer {self.cfg.credential()}"},
                timeout=self.cfg.timeout_ms / 1000.0,
            )
            resp.raise_for_status()
            body = resp.json()
            return SttResult(text=body["text"], confidence=body.get("confidence"))
        except Exception as exc:
            raise ServiceUnavailable(f"recognition request failed: {exc}") from exc


class HttpTtsClient:
    """Synthesizer over plain HTTPS.

    Protocol: POST ``cfg.endpoint`` with JSON ``{"text": str}`` and the same
    bearer credential convention as HttpSttClient; the reply is JSON
    ``{"audio": <base64>, "format": str}``. Point the endpoint at whatever
    fronts the synthesis engine (e.g. an Amazon Polly proxy).
    """

    def __init__(self, cfg: SpeechClientConfig):
        self.cfg = cfg

    def synthesize(self, text: str) -> AudioClip:
        if not text:
            raise EmptyText("cannot synthesize empty text")
        import requests

        try:
            resp = requests.post(
                self.cfg.endpoint,
                json={"text": text},
                headers={"Authorization": f"Bearer {self.cfg.credential()}"},
                timeout=self.cfg.timeout_ms / 1000.0,
            )
            resp.raise_for_status()
            body = resp.json()
            return AudioClip(
                data=base64.b64decode(body["audio"]),
                format_label=body.get("format", "bin"),
            )
        except Exception as exc:
            raise ServiceUnavailable(f"synthesis request failed: {exc}") from exc


def _clip_extension(format_label: str) -> str:
    return re.sub(r"[^a-z0-9]+", "", format_label.lower()) or "bin"


class SpeakerService:
    """Consumes speech.say, synthesizes each message, writes clip files.

    Synthesis failures are logged and skipped: a TTS outage must never stall
    the rest of the pipeline. Clip files are named ``<seq>-<timestamp>.<ext>``
    with the timestamp taken from ``clock`` (milliseconds).
    """

    def __init__(self, bus, client: TtsClient, out_dir: str | Path,
                 clock: Callable[[], int] | None = None):
        self.client = client
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.clock = clock or (lambda: int(time.time() * 1000))
        self.subscription = bus.subscribe(TOPIC_SAY)
        self.clips_written: list[Path] = []
        self.failures: list[tuple[str, str]] = []

    def drain_pending(self) -> int:
        """Synthesize every queued message; returns how many were attempted."""
        handled = 0
        for env in self.subscription.drain():
            handled += 1
            text = env.payload.text
            try:
                clip = self.client.synthesize(text)
            except (ServiceUnavailable, EmptyText) as exc:
                self.failures.append((text, str(exc)))
                logger.warning("synthesis failed for %r: %s", text, exc)
                continue
            name = f"{env.seq:06d}-{self.clock()}.{_clip_extension(clip.format_label)}"
            path = self.out_dir / name
            path.write_bytes(clip.data)
            self.clips_written.append(path)
        return handled

    def run_forever(self, poll_s: float = 0.05, stop_event=None) -> None:
        """Blocking drain loop; runs until ``stop_event`` is set."""
        while stop_event is None or not stop_event.is_set():
            self.drain_pending()
            time.sleep(poll_s)


def speak_loop(bus, client: TtsClient, out_dir: str | Path,
               poll_s: float = 0.05, stop_event=None) -> SpeakerService:
    """Subscribe to speech.say and keep synthesizing until stopped."""
    service = SpeakerService(bus, client, out_dir)
    service.run_forever(poll_s=poll_s, stop_event=stop_event)
    return service
