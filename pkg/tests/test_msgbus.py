import random

import pytest

from guidebot.errors import (
    ConflictingRegistration,
    InvalidTopicName,
    PayloadKindMismatch,
    UnknownTopic,
)
from guidebot.messages import GoalMsg, SpeechOutMsg, StateMsg
from guidebot.msgbus import MessageBus, drain_merged, validate_topic_name


def goal(n=0):
    return GoalMsg(location_id=f"loc{n}", floor_id="f1", cell=(n, 0), heading_rad=0.0)


@pytest.fixture()
def bus():
    b = MessageBus()
    b.register_topic("nav.goal", GoalMsg)
    b.register_topic("speech.say", SpeechOutMsg)
    return b


class TestTopicNames:
    def test_valid(self):
        for name in ("a", "nav.goal", "speech.transcript", "a1.b2.c3"):
            assert validate_topic_name(name) == name

    @pytest.mark.parametrize("name", ["", "Nav.goal", "nav..goal", ".nav", "nav.", "nav goal", "nav_goal"])
    def test_invalid(self, name):
        with pytest.raises(InvalidTopicName):
            validate_topic_name(name)


class TestRegistration:
    def test_reregister_same_kind_is_idempotent(self, bus):
        bus.register_topic("nav.goal", GoalMsg)

    def test_reregister_other_kind_conflicts(self, bus):
        with pytest.raises(ConflictingRegistration):
            bus.register_topic("nav.goal", StateMsg)

    def test_publish_unknown_topic(self, bus):
        with pytest.raises(UnknownTopic):
            bus.publish("nav.nope", goal())

    def test_subscribe_unknown_topic(self, bus):
        with pytest.raises(UnknownTopic):
            bus.subscribe("nav.nope")

    def test_payload_kind_mismatch(self, bus):
        with pytest.raises(PayloadKindMismatch):
            bus.publish("nav.goal", SpeechOutMsg(text="hi"))


class TestDelivery:
    def test_first_seq_is_one(self, bus):
        assert bus.publish("nav.goal", goal()) == 1

    def test_seqs_increase_and_fifo(self, bus):
        sub_a = bus.subscribe("nav.goal")
        sub_b = bus.subscribe("nav.goal")
        assert bus.publish("nav.goal", goal(1)) == 1
        assert bus.publish("nav.goal", goal(2)) == 2
        for sub in (sub_a, sub_b):
            envs = sub.drain()
            assert [e.seq for e in envs] == [1, 2]
            assert [e.payload.location_id for e in envs] == ["loc1", "loc2"]

    def test_publish_without_subscribers_succeeds(self, bus):
        assert bus.publish("nav.goal", goal()) == 1
        # a later subscriber never sees it
        assert bus.subscribe("nav.goal").drain() == []

    def test_subscription_sees_only_later_messages(self, bus):
        bus.publish("nav.goal", goal(1))
        sub = bus.subscribe("nav.goal")
        bus.publish("nav.goal", goal(2))
        envs = sub.drain()
        assert len(envs) == 1
        assert envs[0].payload.location_id == "loc2"

    def test_isolation_between_topics(self, bus):
        say = bus.subscribe("speech.say")
        bus.publish("nav.goal", goal())
        assert say.drain() == []

    def test_pop_empty_returns_none(self, bus):
        assert bus.subscribe("nav.goal").pop() is None

    def test_unsubscribe_stops_delivery(self, bus):
        sub = bus.subscribe("nav.goal")
        bus.unsubscribe(sub)
        bus.publish("nav.goal", goal())
        assert sub.drain() == []

    def test_high_water_warning_once(self, bus, caplog):
        import logging

        sub = bus.subscribe("speech.say")
        with caplog.at_level(logging.WARNING, logger="guidebot.msgbus"):
            for i in range(10_002):
                bus.publish("speech.say", SpeechOutMsg(text=str(i)))
        warnings = [r for r in caplog.records if "10000" in r.getMessage()]
        assert len(warnings) == 1
        assert len(sub) == 10_002  # nothing dropped

    def test_drain_merged_orders_across_topics(self, bus):
        g = bus.subscribe("nav.goal")
        s = bus.subscribe("speech.say")
        bus.publish("speech.say", SpeechOutMsg(text="one"))
        bus.publish("nav.goal", goal())
        bus.publish("speech.say", SpeechOutMsg(text="two"))
        kinds = [e.payload.kind for e in drain_merged(g, s)]
        assert kinds == ["speech_out", "goal", "speech_out"]


class TestThreadSafety:
    def test_concurrent_publishers_no_loss_no_dup(self):
        import threading

        bus = MessageBus()
        bus.register_topic("speech.say", SpeechOutMsg)
        sub = bus.subscribe("speech.say")
        n_threads, per_thread = 8, 200

        def publisher(tid):
            for i in range(per_thread):
                bus.publish("speech.say", SpeechOutMsg(text=f"{tid}:{i}"))

        threads = [threading.Thread(target=publisher, args=(t,)) for t in range(n_threads)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        envs = sub.drain()
        assert len(envs) == n_threads * per_thread
        assert sorted(e.seq for e in envs) == list(range(1, len(envs) + 1))
        # per-publisher order preserved within the merged stream
        for tid in range(n_threads):
            mine = [e.payload.text for e in envs if e.payload.text.startswith(f"{tid}:")]
            assert mine == [f"{tid}:{i}" for i in range(per_thread)]


class TestPropertiesAgainstSequentialModel:
    """Random publish/subscribe interleavings checked against a dict model."""

    TOPICS = ["t0.alpha", "t1.beta", "t2.gamma"]

    def test_random_interleavings(self):
        rng = random.Random(1234)
        for _ in range(50):
            bus = MessageBus()
            for t in self.TOPICS:
                bus.register_topic(t, SpeechOutMsg)
            # model: per topic, list of (seq, text); per sub, start offset
            published: dict[str, list[tuple[int, str]]] = {t: [] for t in self.TOPICS}
            subs: list[tuple[str, object, int]] = []
            counter = 0
            for _ in range(rng.randint(20, 120)):
                topic = rng.choice(self.TOPICS)
                if rng.random() < 0.3:
                    subs.append((topic, bus.subscribe(topic), len(published[topic])))
                else:
                    counter += 1
                    text = f"m{counter}"
                    seq = bus.publish(topic, SpeechOutMsg(text=text))
                    published[topic].append((seq, text))
                    assert seq == len(published[topic])  # contiguous from 1

            for topic, sub, offset in subs:
                got = [(e.seq, e.payload.text) for e in sub.drain()]
                expected = published[topic][offset:]
                # broadcast: exactly the messages published after subscribing,
                # in publish order, each exactly once
                assert got == expected
                # FIFO: strictly increasing contiguous seq run
                seqs = [s for s, _ in got]
                assert seqs == list(range(offset + 1, offset + 1 + len(seqs)))
