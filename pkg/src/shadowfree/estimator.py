"""Scikit-learn style estimator wrapping the invariant-image pipeline.

``fit`` finds the entropy-minimizing projection direction on an image;
``transform`` maps images (with the same channel count) to their raw
grayscale invariant. The class follows the sklearn parameter protocol so
it clones and composes with the wider ecosystem.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .chromaticity import log_chromaticity, reduce_chromaticity, zero_sum_basis
from .entropy import HistogramSpec, find_min_entropy_direction, project_scalar
from .errors import DimensionMismatchError
from .image import CHROMA_EPSILON, MultiChannelImage
from .pipeline import InvariantOutputs, run_pipeline


def _as_multichannel(X) -> MultiChannelImage:
    if isinstance(X, MultiChannelImage):
        return X
    return MultiChannelImage(np.asarray(X, dtype=np.float64))


class InvariantImageTransformer(TransformerMixin, BaseEstimator):
    """Estimate an illumination-invariant projection and apply it to images.

    Parameters
    ----------
    grid_step_deg:
        Angular resolution of the exhaustive direction search.
    trim_fraction:
        Fraction trimmed from each tail before entropy is computed.
    epsilon:
        Lower clamp applied to intensities before logs.
    display_percentiles:
        Percentile window used when rendered outputs are normalized.
    max_samples:
        Optional cap on the pixels used per entropy evaluation
        (deterministic even subsample); None uses every pixel.

    Attributes (after fit)
    ----------------------
    n_channels_ : channel count of the fitted image (3 or 4).
    basis_ : orthonormal basis of the zero-sum chromaticity subspace.
    direction_ : the fitted minimum-entropy projection direction.
    entropy_surface_ : entropy over the full direction grid.
    min_entropy_bits_ : entropy at the fitted direction.
    """

    def __init__(
        self,
        grid_step_deg: float = 1.0,
        trim_fraction: float = 0.05,
        epsilon: float = CHROMA_EPSILON,
        display_percentiles: tuple[float, float] = (1.0, 99.0),
        max_samples: int | None = None,
    ):
        self.grid_step_deg = grid_step_deg
        self.trim_fraction = trim_fraction
        self.epsilon = epsilon
        self.display_percentiles = display_percentiles
        self.max_samples = max_samples

    def _reduced(self, X):
        image = _as_multichannel(X).clamped(self.epsilon)
        basis = zero_sum_basis(image.channels)
        return image, basis, reduce_chromaticity(log_chromaticity(image), basis)

    def fit(self, X, y=None):
        """Find the minimum-entropy projection direction for an image.

        ``X`` is an (H, W, C) array or a :class:`MultiChannelImage` with
        3 or 4 channels; ``y`` is ignored.
        """
        image, basis, reduced = self._reduced(X)
        direction, surface = find_min_entropy_direction(
            reduced,
            grid_step_deg=self.grid_step_deg,
            spec=HistogramSpec(self.trim_fraction),
            max_samples=self.max_samples,
        )
        self.n_channels_ = image.channels
        self.basis_ = basis
        self.direction_ = direction
        self.entropy_surface_ = surface
        self.min_entropy_bits_ = surface.min_entropy_bits
        return self

    def transform(self, X) -> np.ndarray:
        """Raw grayscale invariant of an image under the fitted direction."""
        check_is_fitted(self, "direction_")
        image, _, reduced = self._reduced(X)
        if image.channels != self.n_channels_:
            raise DimensionMismatchError(
                f"fitted on {self.n_channels_} channels, got {image.channels}"
            )
        return np.exp(project_scalar(reduced, self.direction_))

    def render(self, X) -> InvariantOutputs:
        """Full pipeline products for one image, independent of any fit."""
        return run_pipeline(
            _as_multichannel(X),
            grid_step_deg=self.grid_step_deg,
            trim_fraction=self.trim_fraction,
            epsilon=self.epsilon,
            display_percentiles=tuple(self.display_percentiles),
            max_samples=self.max_samples,
        )
