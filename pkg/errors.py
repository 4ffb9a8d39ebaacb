# errors.py


class QicError(Exception):
    """Base class for every error raised by the codec."""


# image-io
class ImageNotFound(QicError, FileNotFoundError):
    pass


class UnsupportedFormat(QicError):
    pass


class CorruptHeader(QicError):
    pass


class IoFailure(QicError):
    pass


# transform / encoders
class QOutOfRange(QicError, ValueError):
    pass


class RegisterTooSmall(QicError, ValueError):
    pass


class ImageTooLarge(QicError, ValueError):
    pass


class MissingGroupMetadata(QicError):
    pass


class NotPowerOfTwo(QicError, ValueError):
    pass


# circuit-ir / simulator
class InvalidCircuit(QicError):
    pass


class TooManyQubits(QicError):
    pass


class NondeterministicReset(QicError):
    """Reset hit a qubit whose value is not fixed by the rest of the register."""


class RegisterMismatch(QicError, ValueError):
    pass


# codec-metrics
class MalformedGroup(QicError):
    pass


class CoefficientOutOfBounds(QicError, ValueError):
    pass


class DimensionMismatch(QicError, ValueError):
    pass


# pipeline-cli
class UsageError(QicError):
    pass


class ManifestError(QicError, ValueError):
    pass
