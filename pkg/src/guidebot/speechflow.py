"""Transcript handling: normalization, wake-word gating, keyword intents.

The pipeline works on recognized text, not audio: a transcript is normalized
to lowercase alphanumeric tokens, gated on the (customizable) wake phrase,
and the remainder is matched against the word dictionary of location
keywords. Utterances without the wake phrase are ignored outright and
publish nothing.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .errors import SchemaError, ValidationError
from .messages import (
    TOPIC_GOAL,
    TOPIC_SAY,
    TOPIC_STOP,
    GoalMsg,
    SpeechOutMsg,
    StopMsg,
    TranscriptMsg,
)
from .sitemap import SiteMap, display_name, resolve_location

TokenSeq = tuple[str, ...]

#: a transcript is just the bus payload; one utterance of recognized text
Transcript = TranscriptMsg

_TOKEN_RE = re.compile(r"[a-z0-9]+")

DEFAULT_WAKE_PHRASE: TokenSeq = ("hey", "a1")
DEFAULT_STOP_KEYWORDS: tuple[TokenSeq, ...] = (("stop",),)

RESPONSE_GOTO = "Okay, navigating to the {name}."
RESPONSE_STOP = "Okay, stopping."
RESPONSE_UNKNOWN = "Sorry, I did not understand."


def normalize(text: str) -> TokenSeq:
    """Lowercase tokens; any run of non-alphanumeric characters separates."""
    return tuple(_TOKEN_RE.findall(text.lower()))


def find_subsequence(tokens: Sequence[str], needle: Sequence[str]) -> Optional[int]:
    """Start index of the first contiguous occurrence of needle, or None."""
    n = len(needle)
    if n == 0 or n > len(tokens):
        return None
    for i in range(len(tokens) - n + 1):
        if tuple(tokens[i:i + n]) == tuple(needle):
            return i
    return None


@dataclass(frozen=True)
class WakeConfig:
    phrase: TokenSeq = DEFAULT_WAKE_PHRASE

    def __post_init__(self):
        if not self.phrase:
            raise ValidationError("wake phrase must have at least one token")

    @classmethod
    def from_text(cls, text: str) -> "WakeConfig":
        return cls(phrase=normalize(text))


@dataclass(frozen=True)
class GateResult:
    passed: bool
    remainder: TokenSeq = ()


def gate_wake_word(tokens: TokenSeq, cfg: WakeConfig) -> GateResult:
    """Pass with the tokens after the first wake-phrase occurrence, or ignore."""
    idx = find_subsequence(tokens, cfg.phrase)
    if idx is None:
        return GateResult(passed=False)
    return GateResult(passed=True, remainder=tokens[idx + len(cfg.phrase):])


@dataclass(frozen=True)
class LexEntry:
    location_id: str
    keywords: tuple[TokenSeq, ...]

    def __post_init__(self):
        if not self.keywords:
            raise ValidationError(f"lexicon entry {self.location_id!r} has no keywords")
        for kw in self.keywords:
            if not kw:
                raise ValidationError(f"lexicon entry {self.location_id!r} has an empty keyword")


@dataclass(frozen=True)
class Lexicon:
    entries: tuple[LexEntry, ...]
    stop_keywords: tuple[TokenSeq, ...] = DEFAULT_STOP_KEYWORDS

    def __post_init__(self):
        seen: set[TokenSeq] = set()
        for entry in self.entries:
            for kw in entry.keywords:
                if kw in seen:
                    raise ValidationError(f"keyword {' '.join(kw)!r} appears twice in lexicon")
                seen.add(kw)
        for kw in self.stop_keywords:
            if not kw:
                raise ValidationError("empty stop keyword")


def validate_lexicon(lex: Lexicon, site: SiteMap) -> None:
    """Check every lexicon location against the site map (drift guard)."""
    for entry in lex.entries:
        if entry.location_id not in site.locations:
            raise ValidationError(
                f"lexicon references location {entry.location_id!r} missing from the map"
            )


@dataclass(frozen=True)
class GoTo:
    location_id: str


@dataclass(frozen=True)
class Stop:
    pass


@dataclass(frozen=True)
class Unknown:
    remainder: TokenSeq


Intent = Union[GoTo, Stop, Unknown]


def parse_intent(remainder: TokenSeq, lex: Lexicon) -> Intent:
    """Keyword search over the gated remainder.

    A stop keyword anywhere wins outright (safety first). Otherwise the
    earliest-starting location keyword wins, ties broken by longest keyword,
    then lexicon entry order, then alias order within the entry.
    """
    for kw in lex.stop_keywords:
        if find_subsequence(remainder, kw) is not None:
            return Stop()

    best_key: tuple | None = None
    best_id: str | None = None
    for entry_idx, entry in enumerate(lex.entries):
        for alias_idx, kw in enumerate(entry.keywords):
            start = find_subsequence(remainder, kw)
            if start is None:
                continue
            key = (start, -len(kw), entry_idx, alias_idx)
            if best_key is None or key < best_key:
                best_key = key
                best_id = entry.location_id
    if best_id is not None:
        return GoTo(location_id=best_id)
    return Unknown(remainder=remainder)


def compose_response(intent: Intent, site: SiteMap) -> str:
    if isinstance(intent, GoTo):
        return RESPONSE_GOTO.format(name=display_name(site, intent.location_id))
    if isinstance(intent, Stop):
        return RESPONSE_STOP
    return RESPONSE_UNKNOWN


@dataclass(frozen=True)
class HandleOutcome:
    commanded: bool
    intent: Optional[Intent] = None
    response: Optional[str] = None

    @property
    def ignored(self) -> bool:
        return not self.commanded


def handle_transcript(
    t: Transcript, cfg: WakeConfig, lex: Lexicon, site: SiteMap, bus
) -> HandleOutcome:
    """Run one transcript through gate -> intent -> publish.

    Gated-out transcripts publish nothing at all. A GoTo publishes the
    location's preset coordinates on nav.goal, a Stop publishes on nav.stop,
    and every accepted utterance gets exactly one spoken response on
    speech.say (navigation first, response second).
    """
    gate = gate_wake_word(normalize(t.text), cfg)
    if not gate.passed:
        return HandleOutcome(commanded=False)

    intent = parse_intent(gate.remainder, lex)
    response = compose_response(intent, site)
    if isinstance(intent, GoTo):
        pose = resolve_location(site, intent.location_id)
        bus.publish(TOPIC_GOAL, GoalMsg(
            location_id=intent.location_id,
            floor_id=pose.floor_id,
            cell=pose.cell,
            heading_rad=pose.heading_rad,
        ))
    elif isinstance(intent, Stop):
        bus.publish(TOPIC_STOP, StopMsg())
    bus.publish(TOPIC_SAY, SpeechOutMsg(text=response))
    return HandleOutcome(commanded=True, intent=intent, response=response)


# ---------------------------------------------------------------------------
# lexicon file


@dataclass(frozen=True)
class LexiconConfig:
    """Parsed lexicon document: word dictionary plus the wake phrase."""

    lexicon: Lexicon
    wake: WakeConfig


def load_lexicon(document: str | dict) -> LexiconConfig:
    """Parse a lexicon document (JSON text or dict); keywords are normalized."""
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"lexicon document is not valid JSON: {exc}") from exc
    else:
        doc = document
    if not isinstance(doc, dict):
        raise SchemaError("lexicon document must be a JSON object")

    wake_text = doc.get("wake_phrase", "hey a1")
    if not isinstance(wake_text, str):
        raise SchemaError("lexicon: field 'wake_phrase' must be a string")
    wake_phrase = normalize(wake_text)
    if not wake_phrase:
        raise ValidationError("lexicon: wake_phrase has no tokens")

    raw_stops = doc.get("stop_keywords", ["stop"])
    if not isinstance(raw_stops, list) or not all(isinstance(s, str) for s in raw_stops):
        raise SchemaError("lexicon: field 'stop_keywords' must be a list of strings")
    stop_keywords = []
    for s in raw_stops:
        kw = normalize(s)
        if not kw:
            raise ValidationError(f"lexicon: stop keyword {s!r} has no tokens")
        stop_keywords.append(kw)

    raw_entries = doc.get("entries")
    if not isinstance(raw_entries, list):
        raise SchemaError("lexicon: field 'entries' must be a list")
    entries = []
    for raw in raw_entries:
        if not isinstance(raw, dict):
            raise SchemaError("lexicon: each entry must be an object")
        loc_id = raw.get("location_id")
        if not isinstance(loc_id, str) or not loc_id:
            raise SchemaError("lexicon: entry field 'location_id' must be a non-empty string")
        raw_keywords = raw.get("keywords")
        if not isinstance(raw_keywords, list) or not all(isinstance(k, str) for k in raw_keywords):
            raise SchemaError(f"lexicon entry {loc_id!r}: field 'keywords' must be a list of strings")
        keywords = []
        for k in raw_keywords:
            kw = normalize(k)
            if not kw:
                raise ValidationError(f"lexicon entry {loc_id!r}: keyword {k!r} has no tokens")
            keywords.append(kw)
        entries.append(LexEntry(location_id=loc_id, keywords=tuple(keywords)))

    return LexiconConfig(
        lexicon=Lexicon(entries=tuple(entries), stop_keywords=tuple(stop_keywords)),
        wake=WakeConfig(phrase=wake_phrase),
    )
