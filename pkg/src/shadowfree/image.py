"""Image containers and file I/O.

Images are float64 stacks of shape (height, width, channels) on a linear
radiometric scale. Loaders normalize 8-bit and 16-bit integer files to
[0, 1]; the RGB image and the near-infrared image of a scene arrive as two
separate files, with the NIR file read as single-channel grayscale.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import tifffile
from PIL import Image

from .errors import DecodeError, DimensionMismatchError
from .validation import as_image_array, check_channels

# Smallest intensity fed to the log: half an 8-bit quantization step on a
# 4-channel geometric mean, i.e. 1/(4*255) of full scale.
CHROMA_EPSILON = 1.0 / (4.0 * 255.0)


@dataclass
class MultiChannelImage:
    """A registered stack of 3 (RGB) or 4 (RGBN) channels.

    ``data`` holds nonnegative linear intensities. Files loaded through
    :func:`load_pair` are scaled to [0, 1]; synthetic or rescaled data may
    exceed 1 without breaking any chromaticity operation.
    """

    data: np.ndarray

    def __post_init__(self):
        self.data = as_image_array(self.data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return self.data.shape[2]

    def rgb_only(self) -> "MultiChannelImage":
        """The visible-band subset (first three channels)."""
        return MultiChannelImage(self.data[:, :, :3].copy())

    def clamped(self, epsilon: float = CHROMA_EPSILON) -> "MultiChannelImage":
        """Copy with every intensity raised to at least ``epsilon``."""
        return MultiChannelImage(np.maximum(self.data, float(epsilon)))


def srgb_to_linear(values: np.ndarray) -> np.ndarray:
    """Decode sRGB-encoded values in [0, 1] to linear intensities."""
    v = np.asarray(values, dtype=np.float64)
    return np.where(v <= 0.04045, v / 12.92, ((v + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(values: np.ndarray) -> np.ndarray:
    """Encode linear intensities in [0, 1] with the sRGB transfer curve."""
    v = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    return np.where(v <= 0.0031308, 12.92 * v, 1.055 * v ** (1.0 / 2.4) - 0.055)


def _to_unit_floats(raw: np.ndarray, path: str) -> np.ndarray:
    if raw.dtype == np.uint8:
        arr = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        arr = raw.astype(np.float64) / 65535.0
    elif np.issubdtype(raw.dtype, np.integer):
        info = np.iinfo(raw.dtype)
        arr = raw.astype(np.float64) / float(info.max)
    elif np.issubdtype(raw.dtype, np.floating):
        arr = raw.astype(np.float64)
    else:
        raise DecodeError(f"{path}: unsupported sample type {raw.dtype}")
    return np.clip(arr, 0.0, 1.0)


def read_image(path: str | os.PathLike) -> np.ndarray:
    """Read a PNG or TIFF file into float64 values in [0, 1].

    Returns (H, W) for grayscale files and (H, W, C) otherwise. PNG and
    TIFF at 8 and 16 bits per sample are supported.
    """
    path = os.fspath(path)
    suffix = os.path.splitext(path)[1].lower()
    try:
        if suffix in (".tif", ".tiff"):
            raw = tifffile.imread(path)
        else:
            with Image.open(path) as im:
                if im.mode == "P":
                    im = im.convert("RGB")
                raw = np.asarray(im)
    except (OSError, ValueError) as exc:
        raise DecodeError(f"cannot read image {path}: {exc}") from exc
    raw = np.asarray(raw)
    if raw.ndim not in (2, 3):
        raise DecodeError(f"{path}: unsupported image layout with shape {raw.shape}")
    return _to_unit_floats(raw, path)


def _as_single_channel(arr: np.ndarray, path: str) -> np.ndarray:
    # Gray images are sometimes saved with replicated channels; collapse by mean.
    if arr.ndim == 2:
        return arr
    return arr.mean(axis=2)


def load_pair(
    rgb_source: str | os.PathLike,
    nir_source: str | os.PathLike | None = None,
    *,
    linearize: bool = True,
) -> MultiChannelImage:
    """Load an RGB file, optionally stacked with a registered NIR file.

    Parameters
    ----------
    rgb_source:
        Path of a 3-channel image (a trailing alpha channel is dropped).
    nir_source:
        Optional path of a single-channel NIR image with identical
        dimensions; when given, the result has 4 channels.
    linearize:
        Decode the sRGB transfer curve after scaling to [0, 1]. Pass False
        for data that is already linear (e.g. synthetic renders).
    """
    rgb = read_image(rgb_source)
    if rgb.ndim == 2:
        raise DecodeError(f"{os.fspath(rgb_source)}: expected a color image, got grayscale")
    if rgb.shape[2] == 4:
        rgb = rgb[:, :, :3]
    if rgb.shape[2] != 3:
        raise DecodeError(
            f"{os.fspath(rgb_source)}: expected 3 color channels, got {rgb.shape[2]}"
        )
    planes = rgb
    if nir_source is not None:
        nir = _as_single_channel(read_image(nir_source), os.fspath(nir_source))
        if nir.shape != rgb.shape[:2]:
            raise DimensionMismatchError(
                f"NIR size {nir.shape} does not match RGB size {rgb.shape[:2]}"
            )
        planes = np.dstack([rgb, nir])
    if linearize:
        planes = srgb_to_linear(planes)
    return MultiChannelImage(planes)


def luminance(image: MultiChannelImage) -> np.ndarray:
    """Per-pixel mean of all channels (display-only summary image)."""
    return image.data.mean(axis=2)


def save_png8(values: np.ndarray, path: str | os.PathLike) -> None:
    """Write values in [0, 1] as an 8-bit PNG (grayscale or RGB)."""
    arr = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    quantized = np.round(arr * 255.0).astype(np.uint8)
    if quantized.ndim == 2:
        Image.fromarray(quantized, mode="L").save(os.fspath(path))
    elif quantized.ndim == 3 and quantized.shape[2] == 3:
        Image.fromarray(quantized, mode="RGB").save(os.fspath(path))
    else:
        raise DimensionMismatchError(
            f"PNG output must be (H, W) or (H, W, 3), got {arr.shape}"
        )


def save_tiff16(values: np.ndarray, path: str | os.PathLike) -> None:
    """Write values in [0, 1] as a 16-bit TIFF (grayscale or RGB)."""
    arr = np.clip(np.asarray(values, dtype=np.float64), 0.0, 1.0)
    tifffile.imwrite(os.fspath(path), np.round(arr * 65535.0).astype(np.uint16))


def save_index_png(ids: np.ndarray, path: str | os.PathLike) -> None:
    """Write a small integer label map (e.g. ground-truth masks) losslessly."""
    ids = np.asarray(ids)
    if ids.min() < 0 or ids.max() > 255:
        raise ValueError("label maps must fit in uint8")
    Image.fromarray(ids.astype(np.uint8), mode="L").save(os.fspath(path))
