"""Voice-commanded guide robot at desk scale.

Speech pipeline (wake word -> word dictionary -> goal coordinates), an
in-process pub/sub bus, a multi-floor occupancy-grid planner, a simulated
robot, and an operator gateway service.
"""

from .errors import (
    ConflictingRegistration,
    EmptyAudio,
    EmptyText,
    GuidebotError,
    InvalidTopicName,
    PayloadKindMismatch,
    SchemaError,
    ServiceUnavailable,
    UnknownLocation,
    UnknownTopic,
    Unreachable,
    ValidationError,
)
from .messages import (
    TOPIC_GOAL,
    TOPIC_SAY,
    TOPIC_STATE,
    TOPIC_STOP,
    TOPIC_TRANSCRIPT,
    GoalMsg,
    SpeechOutMsg,
    StateMsg,
    StopMsg,
    TranscriptMsg,
    register_default_topics,
)
from .msgbus import MessageBus, Subscription
from .planner import Path, plan_floor, plan_path, validate_path
from .session import Session
from .simrobot import RobotState, SimConfig
from .sitemap import GoalPose, SiteMap, load_site_map, resolve_location
from .speechflow import (
    Lexicon,
    WakeConfig,
    gate_wake_word,
    handle_transcript,
    load_lexicon,
    normalize,
    parse_intent,
)

__version__ = "0.1.0"
