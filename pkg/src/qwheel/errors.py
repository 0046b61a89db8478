class QWheelError(Exception):
    pass


class TruncationError(QWheelError):
    """The wavepacket reached the edge of the momentum grid."""


class DegenerateInputError(QWheelError, ValueError):
    pass


class SequenceTooShortError(QWheelError, ValueError):
    pass


class InvalidKeyError(QWheelError, ValueError):
    """Secret key failed validation."""


class DimensionMismatchError(QWheelError, ValueError):
    pass


class PGMError(QWheelError, ValueError):
    pass


class BadMagicError(PGMError):
    pass


class UnsupportedDepthError(PGMError):
    pass


class TruncatedPayloadError(PGMError):
    pass


class SidecarError(QWheelError, ValueError):
    pass
