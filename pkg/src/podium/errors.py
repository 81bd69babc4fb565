"""Exception types shared across the engine."""


class PodiumError(Exception):
    """Base class for all engine errors."""


class ValidationError(PodiumError):
    """Input violates a documented invariant."""


class EmptyBundleError(ValidationError):
    """An operation would leave a bundle with no content."""


class FormatError(PodiumError):
    """A data file does not match its declared format."""


class PolicyError(PodiumError):
    """A request violates a session or study policy rule."""


class NotFoundError(PodiumError):
    """A referenced id does not exist in the store."""
