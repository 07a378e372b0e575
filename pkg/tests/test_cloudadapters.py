import threading
import time

import pytest

from guidebot.cloudadapters import (
    AudioClip,
    MockSttClient,
    MockTtsClient,
    SpeakerService,
    SpeechClientConfig,
    speak_loop,
)
from guidebot.errors import EmptyAudio, EmptyText, ServiceUnavailable
from guidebot.messages import TOPIC_SAY, SpeechOutMsg, register_default_topics
from guidebot.msgbus import MessageBus


class FailingTtsClient:
    calls = 0

    def synthesize(self, text):
        FailingTtsClient.calls += 1
        raise ServiceUnavailable("synthetic outage")


def clip(data=b"\x01\x02", label="pcm16-16k"):
    return AudioClip(data=data, format_label=label)


class TestMockStt:
    def test_scripted_queue(self):
        stt = MockSttClient(["hey a1 take me to the lab"])
        assert stt.transcribe(clip()).text == "hey a1 take me to the lab"

    def test_keyed_by_clip_identity(self):
        lab_clip = clip(b"lab-audio")
        office_clip = clip(b"office-audio")
        stt = MockSttClient(["fallback"])
        stt.script_for(lab_clip, "take me to the lab")
        stt.script_for(office_clip, "take me to the office")
        assert stt.transcribe(office_clip).text == "take me to the office"
        assert stt.transcribe(lab_clip).text == "take me to the lab"
        assert stt.transcribe(clip(b"other")).text == "fallback"

    def test_empty_audio(self):
        with pytest.raises(EmptyAudio):
            MockSttClient(["x"]).transcribe(clip(data=b""))

    def test_exhausted_script(self):
        stt = MockSttClient(["only one"])
        stt.transcribe(clip())
        with pytest.raises(ServiceUnavailable):
            stt.transcribe(clip())


class TestMockTts:
    def test_deterministic_bytes(self):
        out = MockTtsClient().synthesize("Okay, navigating to the lab.")
        assert out.data == "Okay, navigating to the lab.".encode("utf-8")
        assert out.format_label == "mock"

    def test_empty_text(self):
        with pytest.raises(EmptyText):
            MockTtsClient().synthesize("")


class TestClientConfig:
    def test_timeout_positive(self):
        with pytest.raises(ValueError):
            SpeechClientConfig(endpoint="https://example.test", timeout_ms=0)

    def test_credential_from_env(self, monkeypatch):
        cfg = SpeechClientConfig(endpoint="https://example.test", credential_ref="FAKE_CRED")
        monkeypatch.setenv("FAKE_CRED", "sekrit")
        assert cfg.credential() == "sekrit"


def say_bus():
    bus = MessageBus()
    register_default_topics(bus)
    return bus


class TestSpeakerService:
    def test_writes_clips_in_publish_order(self, tmp_path):
        bus = say_bus()
        speaker = SpeakerService(bus, MockTtsClient(), tmp_path, clock=lambda: 7)
        bus.publish(TOPIC_SAY, SpeechOutMsg(text="Okay, navigating to the lab."))
        bus.publish(TOPIC_SAY, SpeechOutMsg(text="Okay, stopping."))
        assert speaker.drain_pending() == 2
        names = [p.name for p in speaker.clips_written]
        assert names == ["000001-7.mock", "000002-7.mock"]
        assert speaker.clips_written[0].read_bytes() == b"Okay, navigating to the lab."
        assert speaker.clips_written[1].read_bytes() == b"Okay, stopping."

    def test_failure_logged_and_loop_alive(self, tmp_path):
        bus = say_bus()
        speaker = SpeakerService(bus, FailingTtsClient(), tmp_path)
        bus.publish(TOPIC_SAY, SpeechOutMsg(text="one"))
        bus.publish(TOPIC_SAY, SpeechOutMsg(text="two"))
        assert speaker.drain_pending() == 2
        assert not speaker.clips_written
        assert [text for text, _ in speaker.failures] == ["one", "two"]
        # still consumes later traffic
        bus.publish(TOPIC_SAY, SpeechOutMsg(text="three"))
        assert speaker.drain_pending() == 1

    def test_speak_loop_runs_until_stopped(self, tmp_path):
        bus = say_bus()
        stop = threading.Event()
        service = SpeakerService(bus, MockTtsClient(), tmp_path)
        thread = threading.Thread(
            target=service.run_forever, kwargs={"poll_s": 0.005, "stop_event": stop}
        )
        thread.start()
        bus.publish(TOPIC_SAY, SpeechOutMsg(text="hello"))
        deadline = time.time() + 2.0
        while time.time() < deadline and not service.clips_written:
            time.sleep(0.01)
        stop.set()
        thread.join(timeout=2.0)
        assert not thread.is_alive()
        assert len(service.clips_written) == 1

    def test_speak_loop_honors_stop_event(self, tmp_path):
        stop = threading.Event()
        stop.set()
        service = speak_loop(say_bus(), MockTtsClient(), tmp_path, stop_event=stop)
        assert service.clips_written == []
