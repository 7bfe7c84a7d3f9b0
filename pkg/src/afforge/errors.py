"""Exception types shared across the package."""


class AfforgeError(Exception):
    """Base class for all package-specific errors."""


class BehindCameraError(AfforgeError):
    """Point has non-positive camera-frame depth; it cannot be projected."""


class NonPositiveDepthError(AfforgeError):
    """Backprojection requires a strictly positive depth."""


class OutOfRangeError(AfforgeError):
    """Sample coordinates fall outside the map."""


class DimensionMismatchError(AfforgeError):
    """A heatmap's shape does not match its camera view."""


class LengthMismatchError(AfforgeError):
    """Metric inputs have different lengths."""


class EmptyInputError(AfforgeError):
    """An operation that needs at least one point received none."""


class NoVisiblePointsError(AfforgeError):
    """No point of the cloud is visible from the requested view."""


class MissingAlphaError(AfforgeError):
    """Background compositing needs an alpha channel on the render."""


class ServiceUnreachableError(AfforgeError):
    """Transport-level failure talking to a model service, after retries."""


class ServiceTimeoutError(AfforgeError):
    """Model service did not answer within the configured timeout."""


class MalformedResponseError(AfforgeError):
    """Model service answered with an unparseable or contract-violating body."""


class CorruptBlobError(AfforgeError):
    """Binary blob has the wrong magic or a payload of the wrong length."""


class SchemaVersionMismatchError(AfforgeError):
    """Persisted data uses a schema version this build does not understand."""


class UnknownIdError(AfforgeError):
    """Referenced object or record id does not exist in the store."""


class UnknownViewError(AfforgeError):
    """Referenced view id does not exist for the object."""
