"""End-to-end orchestration: image in, invariant products out."""

from __future__ import annotations

from dataclasses import dataclass

from .chromaticity import (
    OrthonormalBasis,
    ReducedChromaticityField,
    log_chromaticity,
    reduce_chromaticity,
    zero_sum_basis,
)
from .entropy import (
    EntropySurface,
    HistogramSpec,
    ProjectionDirection,
    find_min_entropy_direction,
)
from .image import CHROMA_EPSILON, MultiChannelImage
from .render import (
    DEFAULT_DISPLAY_PERCENTILES,
    GrayInvariantImage,
    ReconstructedImage,
    ShadowFreeChromaticity,
    fit_l1_mapping,
    grayscale_invariant,
    reconstruct_rgb,
    shadow_free_chromaticity,
)


@dataclass
class InvariantOutputs:
    """Everything the pipeline produces for one image."""

    direction: ProjectionDirection
    surface: EntropySurface
    gray: GrayInvariantImage
    chroma: ShadowFreeChromaticity
    reconstructed: ReconstructedImage | None  # 4-channel inputs only
    reduced: ReducedChromaticityField
    basis: OrthonormalBasis


def run_pipeline(
    image: MultiChannelImage,
    *,
    grid_step_deg: float = 1.0,
    trim_fraction: float = 0.05,
    epsilon: float = CHROMA_EPSILON,
    display_percentiles: tuple[float, float] = DEFAULT_DISPLAY_PERCENTILES,
    max_samples: int | None = None,
) -> InvariantOutputs:
    """Run chromaticity, the direction search, and all renders on one image.

    The RGB-only baseline is obtained by passing ``image.rgb_only()``.
    Reconstruction applies to 4-channel inputs; for 3-channel inputs the
    shadow-free chromaticity keeps its two reduced coordinates and
    ``reconstructed`` is None.
    """
    clamped = image.clamped(epsilon)
    basis = zero_sum_basis(clamped.channels)
    reduced = reduce_chromaticity(log_chromaticity(clamped), basis)
    direction, surface = find_min_entropy_direction(
        reduced,
        grid_step_deg=grid_step_deg,
        spec=HistogramSpec(trim_fraction),
        max_samples=max_samples,
    )
    gray = grayscale_invariant(reduced, direction, display_percentiles)
    chroma = shadow_free_chromaticity(reduced, direction)
    reconstructed = None
    if clamped.channels == 4:
        mapping = fit_l1_mapping(chroma, clamped)
        reconstructed = reconstruct_rgb(chroma, mapping, gray)
    return InvariantOutputs(
        direction=direction,
        surface=surface,
        gray=gray,
        chroma=chroma,
        reconstructed=reconstructed,
        reduced=reduced,
        basis=basis,
    )
