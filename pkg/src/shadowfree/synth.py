"""Synthetic scene generator with analytic ground truth.

Scenes follow a Lambertian narrow-band model under black-body illuminants
in the Wien-approximation regime (2500 K to 10000 K): each channel value
is the product of shading, light intensity, the Wien spectral power at the
band center, surface reflectance, and sensor gain. Under this model the
log-chromaticities of one surface at different temperatures fall on a
line whose direction depends only on the camera, which yields an exact
oracle for the projection search: the true invariant direction is
orthogonal to that line's image in reduced coordinates.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from .chromaticity import OrthonormalBasis, zero_sum_basis
from .entropy import ProjectionDirection, direction_from_vector
from .errors import (
    DegenerateCameraError,
    DimensionMismatchError,
    OutOfRangeError,
)
from .image import MultiChannelImage, save_index_png, save_tiff16
from .validation import check_channels

# Second radiation constant in nm*K; drives the exponential temperature term.
WIEN_A2 = 1.4388e7
WIEN_T_MIN = 2500.0
WIEN_T_MAX = 10000.0

DEFAULT_WAVELENGTHS_NM = (610.0, 540.0, 460.0, 850.0)
DEFAULT_PEAK_VALUE = 0.8


@dataclass(frozen=True)
class CameraModel:
    """Narrow-band camera: one central wavelength and gain per channel."""

    wavelengths_nm: tuple[float, ...] = DEFAULT_WAVELENGTHS_NM
    sensitivities: tuple[float, ...] | None = None

    def __post_init__(self):
        check_channels(len(self.wavelengths_nm))
        if any(w <= 0 for w in self.wavelengths_nm):
            raise OutOfRangeError("wavelengths must be positive")
        if self.sensitivities is None:
            object.__setattr__(self, "sensitivities", (1.0,) * len(self.wavelengths_nm))
        if len(self.sensitivities) != len(self.wavelengths_nm):
            raise DimensionMismatchError("one sensitivity per wavelength required")
        if any(q <= 0 for q in self.sensitivities):
            raise OutOfRangeError("sensitivities must be positive")

    @property
    def n_channels(self) -> int:
        return len(self.wavelengths_nm)

    def rgb_only(self) -> "CameraModel":
        return CameraModel(self.wavelengths_nm[:3], self.sensitivities[:3])


@dataclass(frozen=True)
class SurfaceSpec:
    """A Lambertian surface: reflectance in (0, 1] per camera channel."""

    reflectances: tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        if any(not 0.0 < r <= 1.0 for r in self.reflectances):
            raise OutOfRangeError("reflectances must lie in (0, 1]")


@dataclass(frozen=True)
class IlluminantSpec:
    """A black-body illuminant at temperature T with a scalar intensity."""

    temperature_k: float
    intensity: float = 1.0

    def __post_init__(self):
        if not WIEN_T_MIN <= self.temperature_k <= WIEN_T_MAX:
            raise OutOfRangeError(
                f"temperature must lie in [{WIEN_T_MIN:g}, {WIEN_T_MAX:g}] K, "
                f"got {self.temperature_k}"
            )
        if self.intensity <= 0:
            raise OutOfRangeError("intensity must be positive")


def wien_spd(wavelength_nm: float, temperature_k: float, intensity: float = 1.0,
             scale: float = 1.0) -> float:
    """Black-body spectral power in the Wien regime, arbitrary units.

    ``scale`` is the free overall normalization; scene generation fixes it
    globally so renders stay inside [0, 1].
    """
    if not WIEN_T_MIN <= temperature_k <= WIEN_T_MAX:
        raise OutOfRangeError(
            f"temperature must lie in [{WIEN_T_MIN:g}, {WIEN_T_MAX:g}] K, got {temperature_k}"
        )
    if wavelength_nm <= 0:
        raise OutOfRangeError("wavelength must be positive")
    return (
        intensity
        * scale
        * wavelength_nm ** -5.0
        * math.exp(-WIEN_A2 / (wavelength_nm * temperature_k))
    )


def render_pixel(
    surface: SurfaceSpec,
    illuminant: IlluminantSpec,
    camera: CameraModel,
    shading: float = 1.0,
    scale: float = 1.0,
) -> np.ndarray:
    """Channel values of one surface under one illuminant."""
    if shading <= 0:
        raise OutOfRangeError("shading must be positive")
    if len(surface.reflectances) != camera.n_channels:
        raise DimensionMismatchError("surface reflectance count must match camera channels")
    lam = np.asarray(camera.wavelengths_nm, dtype=np.float64)
    spd = illuminant.intensity * scale * lam ** -5.0 * np.exp(
        -WIEN_A2 / (lam * illuminant.temperature_k)
    )
    return shading * spd * np.asarray(surface.reflectances) * np.asarray(camera.sensitivities)


@dataclass(frozen=True)
class LineModel:
    """Per-surface line of log-chromaticities across temperature.

    ``channel_exponents`` minus the reference exponent gives the line's
    direction (camera-only); the log of ``channel_strengths`` over the
    reference strength gives its offset (surface-only).
    """

    channel_exponents: tuple[float, ...]  # -a2 / wavelength per channel
    reference_exponent: float  # -a2 / (geometric-mean wavelength)
    channel_strengths: tuple[float, ...]  # reflectance * gain * wavelength^-5
    reference_strength: float  # geometric mean of the strengths
    reference_wavelength_nm: float

    def offsets(self) -> np.ndarray:
        """Zero-sum surface signature; distinguishes surfaces, not lights."""
        return np.log(np.asarray(self.channel_strengths) / self.reference_strength)

    def direction_reduced(self, basis: OrthonormalBasis) -> np.ndarray:
        """Unit direction of illumination change in reduced coordinates."""
        e = np.asarray(self.channel_exponents)
        v = basis.rows @ (e - self.reference_exponent)
        norm = np.linalg.norm(v)
        if norm == 0.0:
            raise DegenerateCameraError("all camera bands coincide")
        return v / norm


def line_model(camera: CameraModel, surface: SurfaceSpec) -> LineModel:
    """Analytic line model of a surface's log-chromaticities over temperature."""
    lam = np.asarray(camera.wavelengths_nm, dtype=np.float64)
    lam_ref = float(np.exp(np.log(lam).mean()))
    strengths = (
        np.asarray(surface.reflectances)
        * np.asarray(camera.sensitivities)
        * lam ** -5.0
    )
    return LineModel(
        channel_exponents=tuple(-WIEN_A2 / lam),
        reference_exponent=-WIEN_A2 / lam_ref,
        channel_strengths=tuple(strengths),
        reference_strength=float(np.exp(np.log(strengths).mean())),
        reference_wavelength_nm=lam_ref,
    )


def illumination_direction_reduced(camera: CameraModel, basis: OrthonormalBasis) -> np.ndarray:
    """Unit reduced-space direction along which temperature moves pixels."""
    lam = np.asarray(camera.wavelengths_nm, dtype=np.float64)
    if basis.n_channels != camera.n_channels:
        raise DimensionMismatchError("basis channel count must match camera")
    e = -WIEN_A2 / lam
    v = basis.rows @ (e - e.mean())
    norm = np.linalg.norm(v)
    if norm < 1e-9:
        raise DegenerateCameraError("all camera bands coincide; no illumination direction")
    return v / norm


def true_invariant_direction(
    camera: CameraModel,
    basis: OrthonormalBasis,
    surfaces: tuple[SurfaceSpec, ...] | list[SurfaceSpec] | None = None,
) -> ProjectionDirection:
    """Oracle projection direction orthogonal to illumination change.

    In 2 reduced dims the orthogonal direction is unique up to sign. In 3
    dims the orthogonal complement is a plane; within it the direction
    maximizing the variance of the surfaces' projected signatures is
    chosen (falling back to a fixed in-plane axis when no surfaces are
    given or the spread is isotropic). Projections of noise-free renders
    onto the result are temperature-independent either way.
    """
    v = illumination_direction_reduced(camera, basis)
    if basis.dims == 2:
        return direction_from_vector(np.array([-v[1], v[0]]))

    axes = np.eye(3)
    k0 = int(np.argmin(np.abs(v)))
    p1 = axes[k0] - (axes[k0] @ v) * v
    p1 /= np.linalg.norm(p1)
    p2 = np.cross(v, p1)

    psi = 0.0
    if surfaces:
        pts = []
        for s in surfaces:
            offs = line_model(camera, s).offsets()
            o = basis.rows @ offs
            pts.append((float(o @ p1), float(o @ p2)))
        pts = np.asarray(pts)
        centered = pts - pts.mean(axis=0)
        cov = centered.T @ centered
        evals, evecs = np.linalg.eigh(cov)
        if evals[1] - evals[0] > 1e-12 * max(evals[1], 1.0):
            major = evecs[:, 1]
            psi = math.atan2(float(major[1]), float(major[0]))
    q = math.cos(psi) * p1 + math.sin(psi) * p2
    return direction_from_vector(q)


@dataclass
class SyntheticScene:
    """A rendered image plus everything needed to check the pipeline exactly."""

    image: MultiChannelImage
    surface_ids: np.ndarray  # (H, W) int
    illuminant_ids: np.ndarray  # (H, W) int
    shading: np.ndarray  # (H, W) float
    camera: CameraModel
    surfaces: tuple[SurfaceSpec, ...]
    illuminants: tuple[IlluminantSpec, ...]
    scale: float
    true_direction: ProjectionDirection
    true_direction_rgb: ProjectionDirection | None
    line_models: tuple[LineModel, ...] = field(default_factory=tuple)


def generate_scene(
    surface_ids: np.ndarray,
    illuminant_ids: np.ndarray,
    shading: np.ndarray,
    surfaces,
    illuminants,
    camera: CameraModel = CameraModel(),
    *,
    noise_sigma: float = 0.0,
    seed: int = 0,
    quantize_8bit: bool = False,
    peak_value: float = DEFAULT_PEAK_VALUE,
) -> SyntheticScene:
    """Render a scene from per-pixel surface, illuminant, and shading maps.

    The overall radiometric scale is fixed so the brightest noise-free
    value equals ``peak_value``; being a global intensity factor it leaves
    every chromaticity untouched. Optional Gaussian noise (deterministic
    per seed) and 8-bit quantization roughen the render toward realism.
    """
    surface_ids = np.asarray(surface_ids, dtype=int)
    illuminant_ids = np.asarray(illuminant_ids, dtype=int)
    shading = np.asarray(shading, dtype=np.float64)
    if not (surface_ids.shape == illuminant_ids.shape == shading.shape):
        raise DimensionMismatchError(
            "surface, illuminant, and shading maps must share one shape"
        )
    surfaces = tuple(surfaces)
    illuminants = tuple(illuminants)
    if surface_ids.min() < 0 or surface_ids.max() >= len(surfaces):
        raise OutOfRangeError("surface id map refers to a missing surface")
    if illuminant_ids.min() < 0 or illuminant_ids.max() >= len(illuminants):
        raise OutOfRangeError("illuminant id map refers to a missing illuminant")
    if shading.min() <= 0:
        raise OutOfRangeError("shading must be positive everywhere")
    if not 0.0 < peak_value <= 1.0:
        raise OutOfRangeError("peak_value must lie in (0, 1]")

    table = np.stack(
        [
            [render_pixel(s, ill, camera) for ill in illuminants]
            for s in surfaces
        ]
    )  # (n_surfaces, n_illuminants, channels)
    img = table[surface_ids, illuminant_ids] * shading[:, :, None]
    scale = peak_value / float(img.max())
    img = img * scale

    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        img = np.clip(img + rng.normal(0.0, noise_sigma, img.shape), 0.0, 1.0)
    if quantize_8bit:
        img = np.round(img * 255.0) / 255.0

    basis = zero_sum_basis(camera.n_channels)
    true_dir = true_invariant_direction(camera, basis, surfaces)
    true_rgb = None
    if camera.n_channels == 4:
        rgb_surfaces = tuple(
            SurfaceSpec(s.reflectances[:3], s.label) for s in surfaces
        )
        true_rgb = true_invariant_direction(camera.rgb_only(), zero_sum_basis(3), rgb_surfaces)

    return SyntheticScene(
        image=MultiChannelImage(img),
        surface_ids=surface_ids,
        illuminant_ids=illuminant_ids,
        shading=shading,
        camera=camera,
        surfaces=surfaces,
        illuminants=illuminants,
        scale=scale,
        true_direction=true_dir,
        true_direction_rgb=true_rgb,
        line_models=tuple(line_model(camera, s) for s in surfaces),
    )


# ---------------------------------------------------------------------------
# Scene configuration files (TOML)
# ---------------------------------------------------------------------------

def stripe_map(height: int, width: int, count: int, axis: str = "x", weights=None) -> np.ndarray:
    """Integer id map of parallel stripes; axis 'x' varies along columns."""
    if count < 1:
        raise OutOfRangeError("need at least one stripe")
    extent = width if axis == "x" else height
    w = np.ones(count) if weights is None else np.asarray(weights, dtype=np.float64)
    if w.size != count or (w <= 0).any():
        raise OutOfRangeError("stripe weights must be positive, one per stripe")
    edges = np.concatenate(([0], np.round(np.cumsum(w) / w.sum() * extent))).astype(int)
    edges[-1] = extent
    line = np.zeros(extent, dtype=int)
    for i in range(count):
        line[edges[i]:edges[i + 1]] = i
    if axis == "x":
        return np.tile(line, (height, 1))
    if axis == "y":
        return np.tile(line[:, None], (1, width))
    raise OutOfRangeError(f"axis must be 'x' or 'y', got {axis!r}")


def checker_map(height: int, width: int, rows: int, cols: int, count: int) -> np.ndarray:
    """Integer id map cycling ids over a rows x cols patch grid."""
    r = np.minimum(np.arange(height) * rows // height, rows - 1)
    c = np.minimum(np.arange(width) * cols // width, cols - 1)
    cell = r[:, None] * cols + c[None, :]
    return cell % count


def shading_map(height: int, width: int, kind: str = "constant",
                low: float = 1.0, high: float = 1.0) -> np.ndarray:
    """Per-pixel shading factor: constant, or a linear ramp along x or y."""
    if low <= 0 or high <= 0:
        raise OutOfRangeError("shading bounds must be positive")
    if kind == "constant":
        return np.full((height, width), low)
    if kind == "linear_x":
        ramp = np.linspace(low, high, width)
        return np.tile(ramp, (height, 1))
    if kind == "linear_y":
        ramp = np.linspace(low, high, height)
        return np.tile(ramp[:, None], (1, width))
    raise OutOfRangeError(f"unknown shading kind {kind!r}")


def _id_map_from_config(section: dict, height: int, width: int, count: int,
                        default_pattern: str) -> np.ndarray:
    pattern = section.get("pattern", default_pattern)
    if pattern in ("stripes_x", "bands_x"):
        return stripe_map(height, width, count, "x", section.get("weights"))
    if pattern in ("stripes_y", "bands_y"):
        return stripe_map(height, width, count, "y", section.get("weights"))
    if pattern == "checker":
        rows = int(section.get("rows", 2))
        cols = int(section.get("cols", 2))
        return checker_map(height, width, rows, cols, count)
    raise OutOfRangeError(f"unknown layout pattern {pattern!r}")


def scene_from_config(config: dict | str | os.PathLike) -> SyntheticScene:
    """Build a scene from a TOML file or an equivalent mapping.

    See the README for the documented schema: image size, camera bands,
    a list of surfaces, the illuminant set and its spatial pattern, the
    shading ramp, and optional noise settings.
    """
    if not isinstance(config, dict):
        with open(os.fspath(config), "rb") as fh:
            config = tomllib.load(fh)

    height = int(config["height"])
    width = int(config["width"])
    cam_cfg = config.get("camera", {})
    camera = CameraModel(
        tuple(cam_cfg.get("wavelengths_nm", DEFAULT_WAVELENGTHS_NM)),
        tuple(cam_cfg["sensitivities"]) if "sensitivities" in cam_cfg else None,
    )
    surfaces = tuple(
        SurfaceSpec(tuple(s["reflectances"]), str(s.get("label", i)))
        for i, s in enumerate(config["surfaces"])
    )
    ill_cfg = config.get("illumination", {})
    temps = ill_cfg.get("temperatures_k", [6500.0])
    intensities = ill_cfg.get("intensities", [1.0] * len(temps))
    if len(intensities) != len(temps):
        raise DimensionMismatchError("one intensity per temperature required")
    illuminants = tuple(
        IlluminantSpec(float(t), float(i)) for t, i in zip(temps, intensities)
    )

    surface_ids = _id_map_from_config(
        config.get("layout", {}), height, width, len(surfaces), "stripes_x"
    )
    illuminant_ids = _id_map_from_config(
        ill_cfg, height, width, len(illuminants), "bands_y"
    )
    shade_cfg = config.get("shading", {})
    shading = shading_map(
        height,
        width,
        shade_cfg.get("kind", "constant"),
        float(shade_cfg.get("low", 1.0)),
        float(shade_cfg.get("high", shade_cfg.get("low", 1.0))),
    )
    noise_cfg = config.get("noise", {})
    return generate_scene(
        surface_ids,
        illuminant_ids,
        shading,
        surfaces,
        illuminants,
        camera,
        noise_sigma=float(noise_cfg.get("sigma", 0.0)),
        seed=int(noise_cfg.get("seed", 0)),
        quantize_8bit=bool(noise_cfg.get("quantize_8bit", False)),
        peak_value=float(config.get("peak_value", DEFAULT_PEAK_VALUE)),
    )


def _direction_record(direction: ProjectionDirection | None) -> dict | None:
    if direction is None:
        return None
    return {
        "angles_deg": list(direction.angles_deg),
        "vector": [float(x) for x in direction.vector],
    }


def save_scene(scene: SyntheticScene, out_dir: str | os.PathLike, stem: str = "scene") -> dict:
    """Write the render (RGB + NIR TIFF pair), ground-truth masks, and sidecar.

    Returns a mapping of artifact names to paths. 16-bit TIFFs quantize
    the render slightly; exact values live in the in-memory scene.
    """
    out = os.fspath(out_dir)
    os.makedirs(out, exist_ok=True)
    paths = {}

    data = scene.image.data
    rgb_path = os.path.join(out, f"{stem}_rgb.tiff")
    save_tiff16(data[:, :, :3], rgb_path)
    paths["rgb"] = rgb_path
    if scene.image.channels == 4:
        nir_path = os.path.join(out, f"{stem}_nir.tiff")
        save_tiff16(data[:, :, 3], nir_path)
        paths["nir"] = nir_path

    surf_path = os.path.join(out, f"{stem}_surface_ids.png")
    save_index_png(scene.surface_ids, surf_path)
    paths["surface_ids"] = surf_path
    ill_path = os.path.join(out, f"{stem}_illuminant_ids.png")
    save_index_png(scene.illuminant_ids, ill_path)
    paths["illuminant_ids"] = ill_path

    sidecar = {
        "camera": {
            "wavelengths_nm": list(scene.camera.wavelengths_nm),
            "sensitivities": list(scene.camera.sensitivities),
        },
        "surfaces": [
            {"label": s.label, "reflectances": list(s.reflectances)}
            for s in scene.surfaces
        ],
        "illuminants": [
            {"temperature_k": i.temperature_k, "intensity": i.intensity}
            for i in scene.illuminants
        ],
        "radiometric_scale": scene.scale,
        "true_direction": _direction_record(scene.true_direction),
        "true_direction_rgb": _direction_record(scene.true_direction_rgb),
        "line_models": [
            {
                "channel_exponents": list(m.channel_exponents),
                "reference_exponent": m.reference_exponent,
                "channel_strengths": list(m.channel_strengths),
                "reference_strength": m.reference_strength,
                "reference_wavelength_nm": m.reference_wavelength_nm,
                "offsets": [float(x) for x in m.offsets()],
            }
            for m in scene.line_models
        ],
    }
    sidecar_path = os.path.join(out, f"{stem}_truth.json")
    with open(sidecar_path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["truth"] = sidecar_path
    return paths
