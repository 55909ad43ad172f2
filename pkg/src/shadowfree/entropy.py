"""Projection directions, trimmed Shannon entropy, and the grid search.

A candidate direction is a unit vector on the reduced-space sphere,
parametrized by polar angles: a single angle theta in [0, 180) degrees for
2 dims, azimuth in [0, 180) plus elevation in [-90, 90] for 3 dims. Only
a half sphere is searched because a direction and its negation produce
mirrored projections with identical entropy.

Entropy of a projection is computed on the central 90% of the samples
(configurable trim), histogrammed over the retained range with Scott's
bin width, and reported in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chromaticity import ReducedChromaticityField
from .errors import (
    DegenerateDistributionError,
    DimensionMismatchError,
    EmptyInputError,
    OutOfRangeError,
)

SCOTT_CONSTANT = 3.49
_POLE_TOL = 1e-12


@dataclass(frozen=True)
class ProjectionDirection:
    """A unit projection vector with its polar-angle parametrization."""

    angles_deg: tuple[float, ...]
    vector: np.ndarray = field(compare=False)

    @property
    def dims(self) -> int:
        return len(self.angles_deg) + 1


def direction_from_angles(angles_deg) -> ProjectionDirection:
    """Build a direction from (theta,) in 2 dims or (azimuth, elevation) in 3.

    At the poles (elevation of +-90 degrees) the azimuth is irrelevant;
    the vector degenerates to the third axis.
    """
    angles = tuple(float(a) for a in np.atleast_1d(angles_deg))
    if len(angles) == 1:
        (theta,) = angles
        if not 0.0 <= theta < 180.0:
            raise OutOfRangeError(f"theta must lie in [0, 180), got {theta}")
        t = math.radians(theta)
        vec = np.array([math.cos(t), math.sin(t)])
    elif len(angles) == 2:
        az, el = angles
        if not 0.0 <= az < 180.0:
            raise OutOfRangeError(f"azimuth must lie in [0, 180), got {az}")
        if not -90.0 <= el <= 90.0:
            raise OutOfRangeError(f"elevation must lie in [-90, 90], got {el}")
        a, e = math.radians(az), math.radians(el)
        vec = np.array(
            [math.cos(e) * math.cos(a), math.cos(e) * math.sin(a), math.sin(e)]
        )
    else:
        raise OutOfRangeError(f"expected 1 or 2 angles, got {len(angles)}")
    return ProjectionDirection(angles, vec)


def direction_from_vector(vec) -> ProjectionDirection:
    """Canonicalize an arbitrary nonzero vector onto the searched half sphere."""
    v = np.asarray(vec, dtype=np.float64)
    norm = np.linalg.norm(v)
    if v.shape not in ((2,), (3,)) or norm == 0.0:
        raise OutOfRangeError(f"need a nonzero vector of length 2 or 3, got {v!r}")
    v = v / norm
    if v.shape == (2,):
        theta = math.degrees(math.atan2(v[1], v[0])) % 180.0
        if theta >= 180.0 - 1e-12:
            theta = 0.0
        return direction_from_angles((theta,))
    x, y, z = v
    tol = 1e-12
    if y < -tol or (abs(y) <= tol and x < -tol) or (abs(y) <= tol and abs(x) <= tol and z < 0):
        x, y, z = -x, -y, -z
    el = math.degrees(math.asin(min(1.0, max(-1.0, z))))
    if abs(el) >= 90.0 - 1e-12:
        return direction_from_angles((0.0, math.copysign(90.0, el)))
    az = math.degrees(math.atan2(y, x))
    if az < 0.0:
        az = 0.0 if az > -1e-9 else az + 180.0
    if az >= 180.0 - 1e-12:
        az = 0.0
    return direction_from_angles((az, el))


def angular_distance_deg(a: ProjectionDirection, b: ProjectionDirection) -> float:
    """Angle between two directions in degrees, identifying q with -q."""
    if a.dims != b.dims:
        raise DimensionMismatchError(f"directions have dims {a.dims} and {b.dims}")
    c = abs(float(a.vector @ b.vector))
    return math.degrees(math.acos(min(1.0, c)))


@dataclass
class HistogramSpec:
    """Configuration of the trimmed Scott-rule histogram.

    ``trim_fraction`` is removed from each tail (default 0.05, keeping the
    central 90%) before binning.
    """

    trim_fraction: float = 0.05

    def __post_init__(self):
        if not 0.0 <= self.trim_fraction < 0.5:
            raise OutOfRangeError(
                f"trim fraction must lie in [0, 0.5), got {self.trim_fraction}"
            )


@dataclass
class Histogram:
    """A computed histogram: counts per bin plus strictly increasing edges."""

    counts: np.ndarray
    edges: np.ndarray

    @property
    def bin_count(self) -> int:
        return len(self.counts)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def project_scalar(reduced: ReducedChromaticityField, direction: ProjectionDirection) -> np.ndarray:
    """Per-pixel dot product of the reduced field with a unit direction."""
    if reduced.dims != direction.dims:
        raise DimensionMismatchError(
            f"field has {reduced.dims} dims, direction has {direction.dims}"
        )
    return reduced.values @ direction.vector


def scotts_bin_width(samples) -> float:
    """Scott's-rule histogram bin width, 3.49 * std(n-1) * n^(-1/3).

    Raises :class:`DegenerateDistributionError` when the spread is zero;
    entropy callers treat that case as a single bin with zero entropy.
    """
    v = np.asarray(samples, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptyInputError("no samples")
    if v.size < 2:
        raise DegenerateDistributionError("need at least 2 samples for a bin width")
    sigma = float(v.std(ddof=1))
    if sigma == 0.0:
        raise DegenerateDistributionError("all samples are equal")
    return SCOTT_CONSTANT * sigma * v.size ** (-1.0 / 3.0)


def _sorted_quantile(v: np.ndarray, q: float) -> float:
    # Linear-interpolation quantile of an ascending array (matches
    # numpy's default percentile method).
    h = (v.size - 1) * q
    i = int(math.floor(h))
    if i + 1 >= v.size:
        return float(v[-1])
    frac = h - i
    return float(v[i] + frac * (v[i + 1] - v[i]))


def _trim_sorted(v: np.ndarray, trim_fraction: float) -> np.ndarray:
    if trim_fraction == 0.0:
        return v
    lo = _sorted_quantile(v, trim_fraction)
    hi = _sorted_quantile(v, 1.0 - trim_fraction)
    i0 = int(np.searchsorted(v, lo, side="left"))
    i1 = int(np.searchsorted(v, hi, side="right"))
    return v[i0:i1]


_RELATIVE_SPAN_FLOOR = 1e-12


def _histogram_sorted(r: np.ndarray) -> Histogram | None:
    """Scott-rule histogram of ascending retained samples; None if degenerate.

    A span below 1e-12 of the sample magnitude counts as degenerate:
    float64 keeps roughly 16 digits, so such spread is rounding residue,
    not structure (binning is otherwise scale-free and would amplify it).
    """
    if r.size < 2 or r[0] == r[-1]:
        return None
    if float(r[-1] - r[0]) <= max(abs(r[0]), abs(r[-1])) * _RELATIVE_SPAN_FLOOR:
        return None
    sigma = float(r.std(ddof=1))
    if sigma == 0.0:
        return None
    width = SCOTT_CONSTANT * sigma * r.size ** (-1.0 / 3.0)
    n_bins = max(1, int(math.ceil((r[-1] - r[0]) / width)))
    edges = np.linspace(r[0], r[-1], n_bins + 1)
    # Samples exactly on an interior edge belong to the right bin; the last
    # bin is closed. searchsorted on sorted data reproduces that rule.
    splits = np.searchsorted(r, edges[1:-1], side="left")
    counts = np.diff(np.concatenate(([0], splits, [r.size])))
    return Histogram(counts, edges)


def _entropy_sorted(v: np.ndarray, trim_fraction: float) -> float:
    hist = _histogram_sorted(_trim_sorted(v, trim_fraction))
    if hist is None:
        return 0.0
    p = hist.counts[hist.counts > 0] / hist.counts.sum()
    return float(-(p * np.log2(p)).sum())


def trimmed_histogram(values, spec: HistogramSpec | None = None) -> Histogram:
    """Histogram of the trimmed samples with Scott's-rule bins.

    Degenerate (zero-spread) data falls back to one unit-width bin centered
    on the common value.
    """
    spec = spec or HistogramSpec()
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptyInputError("no samples to histogram")
    v = np.sort(v)
    r = _trim_sorted(v, spec.trim_fraction)
    hist = _histogram_sorted(r)
    if hist is None:
        center = float(r[0]) if r.size else float(v[0])
        return Histogram(np.array([r.size]), np.array([center - 0.5, center + 0.5]))
    return hist


def trimmed_entropy(values, spec: HistogramSpec | None = None) -> float:
    """Shannon entropy in bits of the trimmed, Scott-binned samples.

    Zero-spread data has zero entropy. The result is bounded by
    log2(bin count) and is invariant under negation of the samples.
    """
    spec = spec or HistogramSpec()
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.size == 0:
        raise EmptyInputError("no samples for entropy")
    return _entropy_sorted(np.sort(v), spec.trim_fraction)


@dataclass
class EntropySurface:
    """Entropy sampled over the direction grid, with its minimizer.

    ``entropy_bits`` has shape (azimuths, elevations) for 3 dims and
    (azimuths,) for 2 dims, where the azimuth axis holds theta.
    """

    azimuth_deg: np.ndarray
    elevation_deg: np.ndarray | None
    entropy_bits: np.ndarray
    grid_step_deg: float
    best: ProjectionDirection
    min_entropy_bits: float

    @property
    def dims(self) -> int:
        return 2 if self.elevation_deg is None else 3


def _grid_axis(start: float, stop_exclusive: float, step: float) -> np.ndarray:
    count = int(math.ceil((stop_exclusive - start) / step - 1e-9))
    return start + step * np.arange(count)


def _subsample(flat: np.ndarray, max_samples: int | None) -> np.ndarray:
    if max_samples is None or flat.shape[0] <= max_samples:
        return flat
    idx = np.unique(np.round(np.linspace(0, flat.shape[0] - 1, max_samples)).astype(int))
    return flat[idx]


def find_min_entropy_direction(
    reduced: ReducedChromaticityField,
    grid_step_deg: float = 1.0,
    spec: HistogramSpec | None = None,
    max_samples: int | None = None,
) -> tuple[ProjectionDirection, EntropySurface]:
    """Exhaustive half-sphere grid search for the minimum-entropy projection.

    Ties are broken toward the smallest azimuth, then the smallest
    elevation, so the result is deterministic. ``max_samples`` optionally
    evaluates entropy on an evenly strided pixel subsample (deterministic)
    to bound the cost on large images.

    Returns the winning direction together with the full entropy surface.
    """
    spec = spec or HistogramSpec()
    if grid_step_deg <= 0.0:
        raise OutOfRangeError(f"grid step must be positive, got {grid_step_deg}")
    flat = reduced.values.reshape(-1, reduced.dims)
    if flat.shape[0] == 0:
        raise EmptyInputError("reduced field has no pixels")
    flat = _subsample(flat, max_samples)
    trim = spec.trim_fraction

    azimuths = _grid_axis(0.0, 180.0, grid_step_deg)

    if reduced.dims == 2:
        entropies = np.empty(azimuths.size)
        for i, theta in enumerate(azimuths):
            q = direction_from_angles((theta,)).vector
            entropies[i] = _entropy_sorted(np.sort(flat @ q), trim)
        k = int(np.argmin(entropies))
        best = direction_from_angles((azimuths[k],))
        surface = EntropySurface(
            azimuths, None, entropies, grid_step_deg, best, float(entropies[k])
        )
        return best, surface

    if reduced.dims != 3:
        raise DimensionMismatchError(f"grid search supports 2 or 3 dims, got {reduced.dims}")

    n_el = int(math.floor(180.0 / grid_step_deg + 1e-9))
    elevations = -90.0 + grid_step_deg * np.arange(n_el + 1)
    elevations = elevations[elevations <= 90.0 + 1e-9]
    entropies = np.empty((azimuths.size, elevations.size))
    for j, el in enumerate(elevations):
        if abs(abs(el) - 90.0) <= _POLE_TOL:
            # Azimuth is irrelevant at a pole: evaluate once, fill the row.
            q = direction_from_angles((0.0, el)).vector
            entropies[:, j] = _entropy_sorted(np.sort(flat @ q), trim)
            continue
        for i, az in enumerate(azimuths):
            q = direction_from_angles((az, el)).vector
            entropies[i, j] = _entropy_sorted(np.sort(flat @ q), trim)
    k = int(np.argmin(entropies.ravel()))
    i, j = divmod(k, elevations.size)
    best = direction_from_angles((azimuths[i], elevations[j]))
    surface = EntropySurface(
        azimuths, elevations, entropies, grid_step_deg, best, float(entropies[i, j])
    )
    return best, surface


def write_surface_csv(surface: EntropySurface, path) -> None:
    """Export the surface as CSV rows in fixed 6-decimal format."""
    lines = []
    if surface.dims == 2:
        lines.append("theta_deg,entropy_bits")
        for theta, h in zip(surface.azimuth_deg, surface.entropy_bits):
            lines.append(f"{theta:.6f},{h:.6f}")
    else:
        lines.append("azimuth_deg,elevation_deg,entropy_bits")
        for i, az in enumerate(surface.azimuth_deg):
            for j, el in enumerate(surface.elevation_deg):
                lines.append(f"{az:.6f},{el:.6f},{surface.entropy_bits[i, j]:.6f}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_surface_heatmap(surface: EntropySurface, path) -> None:
    """Export the surface as a grayscale heatmap (dark = low entropy)."""
    from .image import save_png8

    values = surface.entropy_bits
    if surface.dims == 2:
        grid = np.tile(values, (32, 1))
    else:
        # Rows top-to-bottom span +90..-90 elevation; columns span azimuth.
        grid = values.T[::-1]
    lo, hi = float(grid.min()), float(grid.max())
    if hi - lo <= 0.0:
        save_png8(np.full_like(grid, 0.5), path)
        return
    save_png8((grid - lo) / (hi - lo), path)
