"""Illumination-invariant imaging for RGB and RGB+NIR images.

Forms geometric-mean log-chromaticities, searches the reduced zero-sum
subspace for the projection direction of minimum entropy, and renders
grayscale and color shadow-free images. Ships a synthetic black-body
scene generator with analytic ground truth and an RMSE evaluator for
shadow/non-shadow region pairs.
"""

from .chromaticity import (
    LogChromaticityField,
    OrthonormalBasis,
    ReducedChromaticityField,
    lift_reduced,
    log_chromaticity,
    reduce_chromaticity,
    zero_sum_basis,
)
from .entropy import (
    EntropySurface,
    Histogram,
    HistogramSpec,
    ProjectionDirection,
    angular_distance_deg,
    direction_from_angles,
    direction_from_vector,
    find_min_entropy_direction,
    project_scalar,
    scotts_bin_width,
    trimmed_entropy,
    trimmed_histogram,
    write_surface_csv,
    write_surface_heatmap,
)
from .errors import (
    DecodeError,
    DegenerateCameraError,
    DegenerateDistributionError,
    DimensionMismatchError,
    EmptyInputError,
    NonPositiveInputError,
    OutOfRangeError,
    RegionOutOfBoundsError,
    ShadowfreeError,
    SizeMismatchError,
    UnsupportedChannelCountError,
)
from .estimator import InvariantImageTransformer
from .evaluate import (
    ComparisonReport,
    RegionPair,
    compare_pipelines,
    format_report_table,
    parse_region_file,
    region_rmse,
    write_report_csv,
)
from .image import (
    CHROMA_EPSILON,
    MultiChannelImage,
    linear_to_srgb,
    load_pair,
    luminance,
    read_image,
    save_png8,
    save_tiff16,
    srgb_to_linear,
)
from .pipeline import InvariantOutputs, run_pipeline
from .render import (
    GrayInvariantImage,
    ReconstructedImage,
    ShadowFreeChromaticity,
    fit_l1_mapping,
    grayscale_invariant,
    l1_chromaticity,
    normalize_display,
    reconstruct_rgb,
    shadow_free_chromaticity,
)
from .synth import (
    CameraModel,
    IlluminantSpec,
    LineModel,
    SurfaceSpec,
    SyntheticScene,
    generate_scene,
    illumination_direction_reduced,
    line_model,
    render_pixel,
    save_scene,
    scene_from_config,
    true_invariant_direction,
    wien_spd,
)

__version__ = "0.1.0"

__all__ = [
    "CHROMA_EPSILON",
    "CameraModel",
    "ComparisonReport",
    "DecodeError",
    "DegenerateCameraError",
    "DegenerateDistributionError",
    "DimensionMismatchError",
    "EmptyInputError",
    "EntropySurface",
    "GrayInvariantImage",
    "Histogram",
    "HistogramSpec",
    "IlluminantSpec",
    "InvariantImageTransformer",
    "InvariantOutputs",
    "LineModel",
    "LogChromaticityField",
    "MultiChannelImage",
    "NonPositiveInputError",
    "OrthonormalBasis",
    "OutOfRangeError",
    "ProjectionDirection",
    "ReconstructedImage",
    "ReducedChromaticityField",
    "RegionOutOfBoundsError",
    "RegionPair",
    "ShadowFreeChromaticity",
    "ShadowfreeError",
    "SizeMismatchError",
    "SurfaceSpec",
    "SyntheticScene",
    "UnsupportedChannelCountError",
    "angular_distance_deg",
    "compare_pipelines",
    "direction_from_angles",
    "direction_from_vector",
    "find_min_entropy_direction",
    "fit_l1_mapping",
    "format_report_table",
    "generate_scene",
    "grayscale_invariant",
    "illumination_direction_reduced",
    "l1_chromaticity",
    "lift_reduced",
    "line_model",
    "linear_to_srgb",
    "load_pair",
    "log_chromaticity",
    "luminance",
    "normalize_display",
    "parse_region_file",
    "project_scalar",
    "read_image",
    "reconstruct_rgb",
    "reduce_chromaticity",
    "region_rmse",
    "render_pixel",
    "run_pipeline",
    "save_png8",
    "save_scene",
    "save_tiff16",
    "scene_from_config",
    "scotts_bin_width",
    "shadow_free_chromaticity",
    "srgb_to_linear",
    "trimmed_entropy",
    "trimmed_histogram",
    "true_invariant_direction",
    "wien_spd",
    "write_report_csv",
    "write_surface_csv",
    "write_surface_heatmap",
    "zero_sum_basis",
]
