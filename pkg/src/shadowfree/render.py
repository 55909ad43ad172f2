"""Rendering of invariant images from the chosen projection direction.

Three products: the grayscale invariant (exp of the scalar projection),
the shadow-free chromaticity image (exp of the rank-1 projection that
keeps reduced coordinates), and a reconstructed RGB image obtained by
least-squares mapping the shadow-free chromaticity onto the original
image's L1 chromaticity and re-modulating with the grayscale invariant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chromaticity import ReducedChromaticityField
from .entropy import ProjectionDirection, project_scalar
from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    NonPositiveInputError,
    OutOfRangeError,
)
from .image import MultiChannelImage
from .validation import check_same_grid

DEFAULT_DISPLAY_PERCENTILES = (1.0, 99.0)


def normalize_display(raw: np.ndarray, low_pct: float = 1.0, high_pct: float = 99.0) -> np.ndarray:
    """Linear stretch mapping the given percentiles to [0, 1], clipping outside.

    A constant (or otherwise zero-window) image maps to 0.5 everywhere.
    """
    if high_pct <= low_pct:
        raise OutOfRangeError(f"need high_pct > low_pct, got {low_pct} >= {high_pct}")
    arr = np.asarray(raw, dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("nothing to normalize")
    lo, hi = np.percentile(arr, [low_pct, high_pct])
    if hi - lo <= 0.0:
        return np.full_like(arr, 0.5)
    return np.clip((arr - lo) / (hi - lo), 0.0, 1.0)


@dataclass
class GrayInvariantImage:
    """Raw grayscale invariant values exp(projection), plus display metadata."""

    raw: np.ndarray  # (H, W), strictly positive
    display_low_pct: float = DEFAULT_DISPLAY_PERCENTILES[0]
    display_high_pct: float = DEFAULT_DISPLAY_PERCENTILES[1]

    def display(self) -> np.ndarray:
        """Display-normalized view in [0, 1] (used for metrics and export)."""
        return normalize_display(self.raw, self.display_low_pct, self.display_high_pct)


@dataclass
class ShadowFreeChromaticity:
    """Reduced log values projected onto the optimal line, kept in full coords."""

    log_values: np.ndarray  # (H, W, D)
    projector: np.ndarray  # (D, D), symmetric rank-1 idempotent
    direction: ProjectionDirection

    @property
    def chroma(self) -> np.ndarray:
        """Componentwise exp of the projected log values."""
        return np.exp(self.log_values)


@dataclass
class ReconstructedImage:
    """Shadow-free RGB estimate: invariant-modulated mapped chromaticity."""

    values: np.ndarray  # (H, W, 3)
    mapping: np.ndarray  # (3, 3) fitted matrix
    variant: str = field(default="multiplication")


def grayscale_invariant(
    reduced: ReducedChromaticityField,
    direction: ProjectionDirection,
    display_percentiles: tuple[float, float] = DEFAULT_DISPLAY_PERCENTILES,
) -> GrayInvariantImage:
    """Exp of the per-pixel projection onto the chosen direction.

    Raw values are kept for metrics; the display stretch is applied only
    on demand.
    """
    scalar = project_scalar(reduced, direction)
    return GrayInvariantImage(np.exp(scalar), *display_percentiles)


def shadow_free_chromaticity(
    reduced: ReducedChromaticityField, direction: ProjectionDirection
) -> ShadowFreeChromaticity:
    """Project reduced log-chromaticities onto the direction's line.

    Uses the rank-1 projector built from the direction, so the result
    keeps full reduced coordinates but varies only along the invariant
    axis. Applying the operation twice changes nothing.
    """
    if reduced.dims != direction.dims:
        raise DimensionMismatchError(
            f"field has {reduced.dims} dims, direction has {direction.dims}"
        )
    q = direction.vector
    projector = np.outer(q, q)
    return ShadowFreeChromaticity(reduced.values @ projector, projector, direction)


def l1_chromaticity(image: MultiChannelImage) -> np.ndarray:
    """First three channels of the L1 chromaticity, {R,G,B}/(R+G+B+N).

    Requires a 4-channel image whose intensities were clamped positive.
    """
    if image.channels != 4:
        raise DimensionMismatchError(
            f"L1 chromaticity needs a 4-channel image, got {image.channels}"
        )
    total = image.data.sum(axis=2, keepdims=True)
    if total.min() <= 0.0:
        raise NonPositiveInputError("channel sums must be positive; clamp the image first")
    return image.data[:, :, :3] / total


def fit_l1_mapping(shadow_free: ShadowFreeChromaticity, original: MultiChannelImage) -> np.ndarray:
    """Least-squares 3x3 matrix mapping shadow-free chromaticity to L1 chromaticity.

    Solves the normal equations; if the 3x3 Gram matrix is rank-deficient
    the minimum-norm solution is taken via the pseudo-inverse.
    """
    check_same_grid(shadow_free.log_values, original.data, "chromaticity and original")
    if shadow_free.log_values.shape[2] != 3:
        raise DimensionMismatchError("mapping fit expects 3 reduced dims (4-channel input)")
    a = shadow_free.chroma.reshape(-1, 3)
    y = l1_chromaticity(original).reshape(-1, 3)
    gram = a.T @ a
    moment = a.T @ y
    if np.linalg.matrix_rank(gram) < 3:
        return np.linalg.pinv(gram) @ moment
    return np.linalg.solve(gram, moment)


def reconstruct_rgb(
    shadow_free: ShadowFreeChromaticity,
    mapping: np.ndarray,
    invariant: GrayInvariantImage,
) -> ReconstructedImage:
    """Map chromaticity through the fitted matrix and modulate by the invariant.

    The raw (not display-normalized) invariant multiplies each mapped
    channel; normalization for display happens at export time. The
    projection-only variant of the shadow-free image is available directly
    as ``shadow_free.chroma``.
    """
    mapping = np.asarray(mapping, dtype=np.float64)
    if mapping.shape != (3, 3):
        raise DimensionMismatchError(f"mapping must be 3x3, got {mapping.shape}")
    check_same_grid(shadow_free.log_values, invariant.raw[..., None], "chromaticity and invariant")
    approx = shadow_free.chroma @ mapping
    return ReconstructedImage(invariant.raw[:, :, None] * approx, mapping)
