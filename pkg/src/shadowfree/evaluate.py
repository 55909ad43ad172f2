"""Shadow-removal quality: RMSE between paired shadow and lit regions.

A region pair names two same-size rectangles of one surface, one inside a
shadow and one outside. On a good invariant image the two look alike, so
the offset-aligned RMSE of their display-normalized values (reported in
percent) is small. Running the pipeline with and without the NIR channel
on the same pairs quantifies what the extra band buys.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError, RegionOutOfBoundsError, SizeMismatchError
from .image import MultiChannelImage
from .pipeline import run_pipeline
from .render import GrayInvariantImage


@dataclass(frozen=True)
class RegionPair:
    """Two same-size rectangles: one shadowed, one lit, same surface."""

    label: str
    shadow_x: int
    shadow_y: int
    width: int
    height: int
    nonshadow_x: int
    nonshadow_y: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise SizeMismatchError(
                f"region {self.label!r}: width and height must be at least 1"
            )
        if min(self.shadow_x, self.shadow_y, self.nonshadow_x, self.nonshadow_y) < 0:
            raise RegionOutOfBoundsError(
                f"region {self.label!r}: rectangle origins must be nonnegative"
            )


def parse_region_file(path: str | os.PathLike) -> list[RegionPair]:
    """Read region pairs, one per line: label sh_x sh_y w h nsh_x nsh_y.

    Blank lines and lines starting with '#' are skipped.
    """
    pairs = []
    with open(os.fspath(path), "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.strip()
            if not body or body.startswith("#"):
                continue
            parts = body.split()
            if len(parts) != 7:
                raise ValueError(
                    f"{path}:{lineno}: expected 'label sh_x sh_y w h nsh_x nsh_y', "
                    f"got {len(parts)} fields"
                )
            try:
                nums = [int(p) for p in parts[1:]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer coordinate") from exc
            pairs.append(RegionPair(parts[0], *nums))
    return pairs


def _extract(disp: np.ndarray, x: int, y: int, w: int, h: int, label: str) -> np.ndarray:
    height, width = disp.shape
    if x + w > width or y + h > height:
        raise RegionOutOfBoundsError(
            f"region {label!r}: rectangle ({x},{y},{w},{h}) exceeds image {width}x{height}"
        )
    return disp[y:y + h, x:x + w]


def region_rmse(invariant: GrayInvariantImage, pair: RegionPair) -> float:
    """Offset-aligned RMSE (in percent) between the pair's two rectangles.

    Computed on the display-normalized invariant so values are comparable
    across images. Symmetric in the two rectangles.
    """
    disp = invariant.display()
    shadow = _extract(disp, pair.shadow_x, pair.shadow_y, pair.width, pair.height, pair.label)
    lit = _extract(disp, pair.nonshadow_x, pair.nonshadow_y, pair.width, pair.height, pair.label)
    diff = shadow - lit
    return 100.0 * math.sqrt(float((diff * diff).mean()))


@dataclass
class ComparisonReport:
    """Per-pair and aggregate RMSE for the pipeline modes that ran."""

    pair_labels: list[str]
    rmse: dict  # mode name -> list of per-pair RMSE values
    display_percentiles: tuple[float, float]
    grid_step_deg: float
    extras: dict = field(default_factory=dict)

    def aggregate(self, mode: str) -> float:
        values = self.rmse[mode]
        return float(np.mean(values)) if values else float("nan")

    @property
    def modes(self) -> list[str]:
        return list(self.rmse)


def compare_pipelines(
    image: MultiChannelImage,
    pairs: list[RegionPair],
    *,
    grid_step_deg: float = 1.0,
    trim_fraction: float = 0.05,
    display_percentiles: tuple[float, float] = (1.0, 99.0),
    max_samples: int | None = None,
) -> ComparisonReport:
    """Run the full pipeline with and without NIR and score each region pair.

    ``image`` must have 4 channels; the baseline run uses its first three.
    """
    if image.channels != 4:
        raise DimensionMismatchError("pipeline comparison needs a 4-channel image")
    report = ComparisonReport(
        pair_labels=[p.label for p in pairs],
        rmse={},
        display_percentiles=display_percentiles,
        grid_step_deg=grid_step_deg,
    )
    for mode, img in (("rgbn", image), ("rgb", image.rgb_only())):
        outputs = run_pipeline(
            img,
            grid_step_deg=grid_step_deg,
            trim_fraction=trim_fraction,
            display_percentiles=display_percentiles,
            max_samples=max_samples,
        )
        report.rmse[mode] = [region_rmse(outputs.gray, p) for p in pairs]
        report.extras[mode] = {
            "angles_deg": list(outputs.direction.angles_deg),
            "min_entropy_bits": outputs.surface.min_entropy_bits,
        }
    return report


def write_report_csv(report: ComparisonReport, path: str | os.PathLike) -> None:
    """Write per-pair rows plus a MEAN row, one RMSE column per mode."""
    modes = report.modes
    lines = ["label," + ",".join(f"rmse_{m}_pct" for m in modes)]
    for i, label in enumerate(report.pair_labels):
        cells = ",".join(f"{report.rmse[m][i]:.6f}" for m in modes)
        lines.append(f"{label},{cells}")
    mean_cells = ",".join(f"{report.aggregate(m):.6f}" for m in modes)
    lines.append(f"MEAN,{mean_cells}")
    with open(os.fspath(path), "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def format_report_table(report: ComparisonReport) -> str:
    """Human-readable fixed-width table of the report."""
    modes = report.modes
    header = f"{'region':<16}" + "".join(f"{'RMSE ' + m + ' (%)':>18}" for m in modes)
    rows = [header, "-" * len(header)]
    for i, label in enumerate(report.pair_labels):
        rows.append(
            f"{label:<16}" + "".join(f"{report.rmse[m][i]:>18.3f}" for m in modes)
        )
    rows.append("-" * len(header))
    rows.append(f"{'mean':<16}" + "".join(f"{report.aggregate(m):>18.3f}" for m in modes))
    return "\n".join(rows)
