"""Exception types shared across the package."""


class HmheError(Exception):
    """Base class for all package errors."""


class ImageIOError(HmheError):
    """File could not be read or written."""


class FormatError(HmheError):
    """Unsupported image format or bit depth."""


class RangeError(HmheError):
    """Intensity outside the valid level range."""


class EmptyImageError(HmheError):
    """Histogram with zero total mass."""


class ParamError(HmheError):
    """Invalid parameter value."""


class ShapeError(HmheError):
    """Operand dimensions do not match."""


class UndefinedCorrelationError(HmheError):
    """Pearson correlation undefined (constant input)."""


class UndefinedContrastError(HmheError):
    """Contrast undefined (zero bright+dark sum)."""


class DegenerateHistogramError(HmheError):
    """Histogram occupies a single level; CDF mapping is degenerate."""
