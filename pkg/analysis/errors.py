"""Exception hierarchy for the numerical core.

Every error raised on bad input derives from ``LabError`` which itself
inherits from ``ValueError``, so callers that catch ``ValueError`` keep
working while the CLI can single out lab failures.
"""

from __future__ import annotations


class LabError(ValueError):
    """Base class for every input or precondition failure in ``analysis``."""


class GridError(LabError):
    """Raised for invalid grid dimensions, mismatched grids or bad shifts."""


class NonFiniteSampleError(LabError):
    """Raised when a sampled closed-form function returns a non-finite value.

    Attributes:
        time: Time coordinate of the first offending cell.
        position: Spatial coordinates of the first offending cell.
        value: The non-finite value that was produced.
    """

    def __init__(self, time: float, position: tuple[float, ...], value: float) -> None:
        self.time = time
        self.position = position
        self.value = value
        coords = ", ".join(f"{x:.6g}" for x in position)
        super().__init__(
            f"Non-finite sample {value!r} at t={time:.6g}, x=({coords})."
        )


class ResolutionError(LabError):
    """Raised when a mollification radius or time window is under-resolved.

    Attributes:
        radius: The requested radius (ε or h).
        floor: Smallest admissible radius on the grid.
    """

    def __init__(self, name: str, radius: float, floor: float) -> None:
        self.radius = radius
        self.floor = floor
        super().__init__(
            f"{name}={radius:.6g} is below the resolution floor {floor:.6g}."
        )


class SupportError(LabError):
    """Raised when a test function is not supported inside the valid window."""


class DensityError(LabError):
    """Raised for negative densities or densities below a declared floor."""


class ShockAdmissibilityError(LabError):
    """Raised for shock states that violate the admissibility ordering."""


class RateFitError(LabError):
    """Raised when a log-log fit receives unusable values."""


class FieldFormatError(LabError):
    """Raised when a serialized field cannot be read back."""
