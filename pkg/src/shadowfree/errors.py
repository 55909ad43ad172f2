"""Exception types shared across the package."""


class ShadowfreeError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(ShadowfreeError, ValueError):
    """Two inputs disagree in shape, channel count, or dimensionality."""


class DecodeError(ShadowfreeError, ValueError):
    """An image file could not be read or has an unusable layout."""


class NonPositiveInputError(ShadowfreeError, ValueError):
    """An intensity that must be strictly positive is zero or negative."""


class UnsupportedChannelCountError(ShadowfreeError, ValueError):
    """Channel count outside the supported set {3, 4}."""


class OutOfRangeError(ShadowfreeError, ValueError):
    """A numeric argument lies outside its documented range."""


class DegenerateDistributionError(ShadowfreeError, ValueError):
    """Sample distribution has zero spread, so no bin width exists."""


class EmptyInputError(ShadowfreeError, ValueError):
    """An operation received no samples or no pixels."""


class RegionOutOfBoundsError(ShadowfreeError, ValueError):
    """An evaluation rectangle extends past the image bounds."""


class SizeMismatchError(ShadowfreeError, ValueError):
    """Region dimensions are invalid or inconsistent."""


class DegenerateCameraError(ShadowfreeError, ValueError):
    """Camera bands coincide, leaving no illumination direction."""
