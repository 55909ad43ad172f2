"""Geometric-mean log-chromaticity and reduction to the zero-sum subspace.

Dividing each pixel by the geometric mean of its channels and taking logs
cancels shading and overall light intensity, and yields per-pixel vectors
whose components sum to zero. Those vectors therefore live in an
(N-1)-dimensional subspace orthogonal to the all-ones direction; an
orthonormal basis of that subspace maps them to compact coordinates for
the projection search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NonPositiveInputError
from .image import MultiChannelImage
from .validation import check_channels


@dataclass
class LogChromaticityField:
    """Per-pixel log-chromaticity vectors, one component per channel.

    Components sum to zero at every pixel up to float rounding.
    """

    values: np.ndarray  # (H, W, C)

    @property
    def channels(self) -> int:
        return self.values.shape[2]


@dataclass
class ReducedChromaticityField:
    """Log-chromaticities expressed in (channels - 1) zero-sum coordinates."""

    values: np.ndarray  # (H, W, C - 1)

    @property
    def dims(self) -> int:
        return self.values.shape[2]


@dataclass
class OrthonormalBasis:
    """Rows spanning the zero-sum subspace, each orthogonal to the all-ones vector."""

    rows: np.ndarray  # (C - 1, C)

    @property
    def n_channels(self) -> int:
        return self.rows.shape[1]

    @property
    def dims(self) -> int:
        return self.rows.shape[0]


_BASIS_GENERATORS = {
    3: ((1.0, -1.0, 0.0), (1.0, 1.0, -2.0)),
    4: ((1.0, -1.0, 0.0, 0.0), (1.0, 1.0, -2.0, 0.0), (1.0, 1.0, 1.0, -3.0)),
}


def zero_sum_basis(n_channels: int) -> OrthonormalBasis:
    """Canonical orthonormal basis of the zero-sum subspace.

    Built by Gram-Schmidt over fixed integer generators, so it is
    deterministic across runs and platforms and exactly orthogonal to the
    all-ones vector by construction.
    """
    check_channels(n_channels)
    rows = []
    for gen in _BASIS_GENERATORS[n_channels]:
        v = np.asarray(gen, dtype=np.float64)
        for r in rows:
            v = v - (v @ r) * r
        rows.append(v / np.linalg.norm(v))
    return OrthonormalBasis(np.stack(rows))


def log_chromaticity(image: MultiChannelImage) -> LogChromaticityField:
    """Log of each channel relative to the per-pixel geometric mean.

    Raises :class:`NonPositiveInputError` if any intensity is not strictly
    positive; callers normally apply :meth:`MultiChannelImage.clamped`
    first.
    """
    data = image.data
    if data.min() <= 0.0:
        raise NonPositiveInputError(
            "log-chromaticity needs strictly positive intensities; "
            "clamp the image before calling"
        )
    logs = np.log(data)
    return LogChromaticityField(logs - logs.mean(axis=2, keepdims=True))


def reduce_chromaticity(
    chrom: LogChromaticityField, basis: OrthonormalBasis
) -> ReducedChromaticityField:
    """Express zero-sum chromaticity vectors in the basis coordinates.

    An isometry on the zero-sum subspace: Euclidean norms are preserved.
    """
    if basis.n_channels != chrom.channels:
        raise DimensionMismatchError(
            f"basis is for {basis.n_channels} channels, field has {chrom.channels}"
        )
    return ReducedChromaticityField(chrom.values @ basis.rows.T)


def lift_reduced(reduced: ReducedChromaticityField, basis: OrthonormalBasis) -> np.ndarray:
    """Map reduced coordinates back to full zero-sum channel space."""
    if basis.dims != reduced.dims:
        raise DimensionMismatchError(
            f"basis spans {basis.dims} dims, field has {reduced.dims}"
        )
    return reduced.values @ basis.rows
