class QGradError(Exception):
    """Base class for errors raised by qgrad."""


class DegenerateInputError(QGradError, ValueError):
    """Input carries no signal: all-zero image, zero-probability branch, ..."""


class ShapeError(QGradError, ValueError):
    pass


class UnsupportedFormatError(QGradError, ValueError):
    pass
