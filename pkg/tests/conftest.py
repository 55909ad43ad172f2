"""Shared fixtures: oracle cameras and engineered synthetic scenes.

The "aligned" camera is constructed so that the reduced-space direction of
illumination change points exactly along the second reduced axis (azimuth
90, elevation 0). Its orthogonal complement is then sampled exactly by
the azimuth-0 grid column and the poles, which makes direction-recovery
assertions sharp instead of grid-limited. Solving for band centers under
that constraint forces the first two bands to coincide; the camera is a
math rig, not a plausible sensor.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from shadowfree import (
    CameraModel,
    IlluminantSpec,
    SurfaceSpec,
    generate_scene,
    zero_sum_basis,
)
from shadowfree.synth import WIEN_A2, stripe_map


def aligned_camera() -> CameraModel:
    ebar = -WIEN_A2 / 600.0
    shift = 8000.0 * np.array([1.0, 1.0, -2.0, 0.0]) / math.sqrt(6.0)
    wavelengths = -WIEN_A2 / (ebar + shift)
    return CameraModel(tuple(wavelengths))


def balanced_illuminants(camera: CameraModel, temperatures) -> tuple:
    """Illuminants with intensities equalizing the peak channel response.

    Keeps every rendered value well above the chromaticity clamp across
    the whole temperature range; being per-light scale factors, the
    intensities leave all chromaticities untouched.
    """
    lam = np.asarray(camera.wavelengths_nm)
    gains = np.asarray(camera.sensitivities)
    specs = []
    for t in temperatures:
        peak = float((lam ** -5.0 * np.exp(-WIEN_A2 / (lam * t)) * gains).max())
        specs.append(IlluminantSpec(float(t), 1.0 / peak))
    return tuple(specs)


def striped_scene(
    camera: CameraModel,
    reflectances: np.ndarray,
    temperatures,
    *,
    widths=None,
    size=(64, 64),
    noise_sigma: float = 0.0,
    seed: int = 0,
    quantize_8bit: bool = False,
    shading=None,
):
    """Vertical surface stripes crossed with horizontal illumination bands."""
    height, width = size
    surfaces = tuple(SurfaceSpec(tuple(r)) for r in np.atleast_2d(reflectances))
    illuminants = balanced_illuminants(camera, temperatures)
    surface_ids = stripe_map(height, width, len(surfaces), "x", widths)
    illuminant_ids = stripe_map(height, width, len(illuminants), "y")
    shading = np.ones((height, width)) if shading is None else shading
    return generate_scene(
        surface_ids,
        illuminant_ids,
        shading,
        surfaces,
        illuminants,
        camera,
        noise_sigma=noise_sigma,
        seed=seed,
        quantize_8bit=quantize_8bit,
    )


RECOVERY_REFLECTANCES = np.array(
    [
        [0.55, 0.74, 0.52, 0.62],
        [0.62, 0.68, 0.38, 0.45],
        [0.45, 0.41, 0.60, 0.52],
        [0.70, 0.52, 0.44, 0.58],
    ]
)
RECOVERY_TEMPERATURES = (2500.0, 5000.0, 10000.0)


@pytest.fixture(scope="session")
def recovery_scene():
    """Noise-free 4-surface x 3-temperature scene with an exact oracle."""
    return striped_scene(
        aligned_camera(), RECOVERY_REFLECTANCES, RECOVERY_TEMPERATURES, size=(64, 64)
    )


def nir_discriminative_surfaces(camera: CameraModel, g, phi_deg, radii, off_line):
    """Surfaces whose RGB log-reflectances are collinear while NIR varies.

    The visible bands of all surfaces move along one direction ``g`` in
    log-reflectance space, so the RGB-only entropy search sees an ambiguous
    landscape and locks onto the direction that collapses the surface
    spread instead of the temperature spread. In-plane targets are chosen
    so the 4-channel search still has a clean minimum in the invariant
    plane: the first three surfaces line up along an in-plane direction at
    angle ``phi_deg`` (radii given by ``radii``) and the fourth sits at
    ``off_line``.
    """
    basis = zero_sum_basis(4)
    g_dir = basis.rows @ np.array([g[0], g[1], g[2], 0.0])
    nir_dir = basis.rows @ np.array([0.0, 0.0, 0.0, 1.0])
    mix = np.array([[g_dir[0], nir_dir[0]], [g_dir[2], nir_dir[2]]])
    phi = math.radians(phi_deg)
    line = np.array([-math.sin(phi), math.cos(phi)])
    targets = [r * line for r in radii] + [np.asarray(off_line, dtype=float)]

    log_s = np.zeros((len(targets), 4))
    for i, target in enumerate(targets):
        t, nu = np.linalg.solve(mix, target)
        rgb = t * np.asarray(g)
        gray_shift = math.log(0.72) - rgb.max()
        log_s[i, :3] = rgb + gray_shift
        log_s[i, 3] = nu + gray_shift
    log_s[:, 3] += math.log(0.70) - log_s[:, 3].max()
    return np.exp(log_s)


NIR_SCENE_PARAMS = (
    dict(g=(0.12, -0.20, 0.08), phi_deg=-60.4, radii=(0.0, 0.25, 0.55),
         off_line=(0.30, -0.35), widths=(0.4, 0.3, 0.2, 0.1),
         temperatures=(2800.0, 8000.0)),
    dict(g=(-0.15, 0.10, 0.10), phi_deg=-42.7, radii=(0.0, 0.30, 0.62),
         off_line=(-0.32, 0.30), widths=(0.38, 0.32, 0.18, 0.12),
         temperatures=(3000.0, 9000.0)),
    dict(g=(0.18, -0.14, -0.06), phi_deg=-71.3, radii=(0.0, 0.22, 0.48),
         off_line=(0.35, 0.28), widths=(0.42, 0.28, 0.19, 0.11),
         temperatures=(2600.0, 7500.0)),
)


def nir_discriminative_scene(params, size=(96, 96)):
    camera = aligned_camera()
    reflectances = nir_discriminative_surfaces(
        camera, params["g"], params["phi_deg"], params["radii"], params["off_line"]
    )
    return striped_scene(
        camera,
        reflectances,
        params["temperatures"],
        widths=params["widths"],
        size=size,
    )


def band_region_pairs(scene, *, margin=2, box_height=10):
    """One same-surface region pair per stripe across the two illumination bands."""
    from shadowfree import RegionPair

    height, width = scene.surface_ids.shape
    pairs = []
    for sid in np.unique(scene.surface_ids):
        cols = np.where(scene.surface_ids[0] == sid)[0]
        x0 = int(cols.min()) + 1
        w = int(cols.max()) - x0  # stays clear of stripe borders
        pairs.append(
            RegionPair(
                label=f"surface{sid}",
                shadow_x=x0,
                shadow_y=height - margin - box_height,
                width=max(w, 1),
                height=box_height,
                nonshadow_x=x0,
                nonshadow_y=margin,
            )
        )
    return pairs
