"""Exception types shared across the package."""


class GuidebotError(Exception):
    """Base class for all package errors."""


# -- message bus --

class InvalidTopicName(GuidebotError):
    pass


class UnknownTopic(GuidebotError):
    pass


class PayloadKindMismatch(GuidebotError):
    pass


class ConflictingRegistration(GuidebotError):
    pass


# -- site map / lexicon --

class SchemaError(GuidebotError):
    """Document is structurally malformed (missing/bad-typed fields)."""


class ValidationError(GuidebotError):
    """Document is well-formed but violates a semantic invariant."""


class UnknownLocation(GuidebotError):
    pass


# -- planning --

class Unreachable(GuidebotError):
    """No path exists between the requested cells."""


# -- speech clients --

class ServiceUnavailable(GuidebotError):
    pass


class EmptyAudio(GuidebotError):
    pass


class EmptyText(GuidebotError):
    pass
