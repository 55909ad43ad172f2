"""Synthetic black-body scenes and their analytic ground truth."""

import json
import math

import numpy as np
import pytest

from shadowfree import (
    CameraModel,
    DegenerateCameraError,
    DimensionMismatchError,
    IlluminantSpec,
    MultiChannelImage,
    OutOfRangeError,
    SurfaceSpec,
    find_min_entropy_direction,
    generate_scene,
    line_model,
    log_chromaticity,
    project_scalar,
    reduce_chromaticity,
    render_pixel,
    save_scene,
    scene_from_config,
    true_invariant_direction,
    wien_spd,
    zero_sum_basis,
)
from shadowfree.chromaticity import ReducedChromaticityField
from shadowfree.synth import WIEN_A2, checker_map, shading_map, stripe_map

from conftest import balanced_illuminants

CAMERA = CameraModel()  # default bands (610, 540, 460, 850) nm
SURFACE = SurfaceSpec((0.6, 0.5, 0.4, 0.7))


def chroma_of_pixel(pixel):
    img = MultiChannelImage(np.asarray(pixel).reshape(1, 1, -1))
    return log_chromaticity(img).values[0, 0]


class TestWien:
    def test_hand_computed_exponential(self):
        # lambda = 610 nm, T = 6500 K: exponent is -1.4388e7 / (610 * 6500).
        value = wien_spd(610.0, 6500.0)
        expected = 610.0 ** -5.0 * math.exp(-1.4388e7 / (610.0 * 6500.0))
        assert value == pytest.approx(expected, rel=1e-12)
        assert math.exp(-WIEN_A2 / (610.0 * 6500.0)) == pytest.approx(0.02655, abs=2e-5)

    def test_monotone_in_temperature(self):
        assert wien_spd(610.0, 7000.0) > wien_spd(610.0, 6000.0)

    def test_linear_in_intensity(self):
        assert wien_spd(610.0, 6500.0, intensity=2.0) == pytest.approx(
            2.0 * wien_spd(610.0, 6500.0), rel=1e-15
        )

    @pytest.mark.parametrize("temp", [2000.0, 12000.0])
    def test_temperature_window_enforced(self, temp):
        with pytest.raises(OutOfRangeError):
            wien_spd(610.0, temp)


class TestRenderPixel:
    def test_linear_in_shading(self):
        ill = IlluminantSpec(5000.0)
        one = render_pixel(SURFACE, ill, CAMERA, shading=1.0)
        two = render_pixel(SURFACE, ill, CAMERA, shading=2.0)
        np.testing.assert_allclose(two, 2.0 * one, rtol=1e-15)

    def test_unit_surface_samples_the_spd(self):
        ill = IlluminantSpec(6500.0)
        flat = SurfaceSpec((1.0, 1.0, 1.0, 1.0))
        values = render_pixel(flat, ill, CAMERA)
        expected = [wien_spd(w, 6500.0) for w in CAMERA.wavelengths_nm]
        np.testing.assert_allclose(values, expected, rtol=1e-12)

    def test_chromaticity_shift_parallel_to_line_direction(self):
        # One surface under two temperatures: the chromaticity difference
        # must be collinear with the camera's line direction.
        a = chroma_of_pixel(render_pixel(SURFACE, IlluminantSpec(2800.0), CAMERA))
        b = chroma_of_pixel(render_pixel(SURFACE, IlluminantSpec(6500.0), CAMERA))
        shift = b - a
        model = line_model(CAMERA, SURFACE)
        e = np.asarray(model.channel_exponents)
        direction = e - e.mean()
        cosine = shift @ direction / (np.linalg.norm(shift) * np.linalg.norm(direction))
        assert abs(abs(cosine) - 1.0) < 1e-9


class TestLineModel:
    def test_reference_wavelength_is_geometric_mean(self):
        model = line_model(CAMERA, SURFACE)
        expected = math.exp(np.log(np.asarray(CAMERA.wavelengths_nm)).mean())
        assert model.reference_wavelength_nm == pytest.approx(expected, rel=1e-12)
        assert model.reference_wavelength_nm == pytest.approx(599.1, abs=0.1)

    def test_offsets_sum_to_zero_and_distinguish_surfaces(self):
        other = SurfaceSpec((0.3, 0.7, 0.5, 0.4))
        m1, m2 = line_model(CAMERA, SURFACE), line_model(CAMERA, other)
        assert abs(m1.offsets().sum()) < 1e-12
        assert not np.allclose(m1.offsets(), m2.offsets())
        same = line_model(CAMERA, SurfaceSpec(SURFACE.reflectances))
        np.testing.assert_allclose(same.offsets(), m1.offsets(), atol=0)

    def test_direction_shared_across_surfaces(self):
        basis = zero_sum_basis(4)
        d1 = line_model(CAMERA, SURFACE).direction_reduced(basis)
        d2 = line_model(CAMERA, SurfaceSpec((0.2, 0.9, 0.6, 0.3))).direction_reduced(basis)
        assert abs(abs(d1 @ d2) - 1.0) < 1e-12


class TestTrueDirection:
    def test_orthogonal_to_illumination_direction(self):
        basis = zero_sum_basis(4)
        q = true_invariant_direction(CAMERA, basis)
        v = line_model(CAMERA, SURFACE).direction_reduced(basis)
        assert abs(q.vector @ v) < 1e-12

    def test_projection_constant_per_surface_across_temperature(self):
        basis = zero_sum_basis(4)
        surfaces = (SURFACE, SurfaceSpec((0.25, 0.45, 0.65, 0.35)))
        q = true_invariant_direction(CAMERA, basis, surfaces)
        for surface in surfaces:
            values = []
            for temp in np.linspace(2500.0, 10000.0, 7):
                pixel = render_pixel(surface, IlluminantSpec(float(temp)), CAMERA)
                chroma = chroma_of_pixel(pixel)
                values.append(float(basis.rows @ chroma @ q.vector))
            assert max(values) - min(values) < 1e-9

    def test_two_dim_unique_direction(self):
        basis = zero_sum_basis(3)
        camera = CAMERA.rgb_only()
        q = true_invariant_direction(camera, basis)
        v = line_model(camera, SurfaceSpec(SURFACE.reflectances[:3])).direction_reduced(basis)
        assert abs(q.vector @ v) < 1e-12

    def test_degenerate_camera_rejected(self):
        with pytest.raises(DegenerateCameraError):
            true_invariant_direction(
                CameraModel((500.0, 500.0, 500.0, 500.0)), zero_sum_basis(4)
            )


class TestMaps:
    def test_stripe_map_covers_all_ids(self):
        ids = stripe_map(8, 10, 3, "x")
        assert ids.shape == (8, 10)
        assert set(np.unique(ids)) == {0, 1, 2}
        assert (ids[:, 0] == 0).all() and (ids[:, -1] == 2).all()

    def test_stripe_weights_control_extent(self):
        ids = stripe_map(4, 100, 2, "x", weights=[3, 1])
        assert (ids[:, :75] == 0).all() and (ids[:, 75:] == 1).all()

    def test_checker_map_cycles(self):
        ids = checker_map(4, 4, 2, 2, 3)
        assert ids[0, 0] == 0 and ids[0, -1] == 1 and ids[-1, 0] == 2 and ids[-1, -1] == 0

    def test_shading_ramp(self):
        ramp = shading_map(2, 5, "linear_x", 0.5, 1.0)
        np.testing.assert_allclose(ramp[0], np.linspace(0.5, 1.0, 5), atol=1e-15)
        with pytest.raises(OutOfRangeError):
            shading_map(2, 2, "spherical")


class TestGenerateScene:
    def _scene(self, **kwargs):
        surfaces = (SURFACE, SurfaceSpec((0.3, 0.6, 0.5, 0.45)))
        illuminants = balanced_illuminants(CAMERA, (2800.0, 6500.0))
        sid = stripe_map(16, 16, 2, "x")
        tid = stripe_map(16, 16, 2, "y")
        shading = shading_map(16, 16, "linear_x", 0.6, 1.0)
        return generate_scene(sid, tid, shading, surfaces, illuminants, CAMERA, **kwargs)

    def test_pixels_match_direct_rendering(self):
        scene = self._scene()
        y, x = 3, 12
        direct = render_pixel(
            scene.surfaces[scene.surface_ids[y, x]],
            scene.illuminants[scene.illuminant_ids[y, x]],
            CAMERA,
            shading=scene.shading[y, x],
        )
        np.testing.assert_allclose(
            scene.image.data[y, x], scene.scale * direct, rtol=1e-12
        )

    def test_peak_normalization(self):
        scene = self._scene()
        assert scene.image.data.max() == pytest.approx(0.8, abs=1e-12)

    def test_noise_deterministic_per_seed(self):
        a = self._scene(noise_sigma=0.01, seed=5)
        b = self._scene(noise_sigma=0.01, seed=5)
        c = self._scene(noise_sigma=0.01, seed=6)
        assert np.array_equal(a.image.data, b.image.data)
        assert not np.array_equal(a.image.data, c.image.data)

    def test_quantization_snaps_to_8bit_grid(self):
        scene = self._scene(quantize_8bit=True)
        np.testing.assert_allclose(
            scene.image.data, np.round(scene.image.data * 255) / 255, atol=0
        )

    def test_map_shape_mismatch_rejected(self):
        surfaces = (SURFACE,)
        ill = balanced_illuminants(CAMERA, (5000.0,))
        with pytest.raises(DimensionMismatchError):
            generate_scene(
                np.zeros((4, 4), int),
                np.zeros((4, 5), int),
                np.ones((4, 4)),
                surfaces,
                ill,
                CAMERA,
            )

    def test_single_surface_single_light_is_flat(self):
        ill = balanced_illuminants(CAMERA, (5000.0,))
        scene = generate_scene(
            np.zeros((8, 8), int),
            np.zeros((8, 8), int),
            shading_map(8, 8, "linear_y", 0.4, 1.0),
            (SURFACE,),
            ill,
            CAMERA,
        )
        basis = zero_sum_basis(4)
        reduced = reduce_chromaticity(log_chromaticity(scene.image.clamped()), basis)
        spread = reduced.values.reshape(-1, 3)
        assert np.abs(spread - spread[0]).max() < 1e-12
        _, surface = find_min_entropy_direction(reduced, grid_step_deg=30.0)
        assert surface.entropy_bits.max() == 0.0


class TestModelValidation:
    def test_surface_reflectance_range(self):
        with pytest.raises(OutOfRangeError):
            SurfaceSpec((0.5, 1.2, 0.3, 0.4))
        with pytest.raises(OutOfRangeError):
            SurfaceSpec((0.0, 0.5, 0.3, 0.4))

    def test_illuminant_window_and_intensity(self):
        with pytest.raises(OutOfRangeError):
            IlluminantSpec(1000.0)
        with pytest.raises(OutOfRangeError):
            IlluminantSpec(5000.0, intensity=0.0)

    def test_camera_validation(self):
        with pytest.raises(OutOfRangeError):
            CameraModel((610.0, -540.0, 460.0))
        with pytest.raises(DimensionMismatchError):
            CameraModel((610.0, 540.0, 460.0), (1.0, 1.0))


class TestOracleScenes:
    def test_invariant_equal_across_two_illuminants_at_true_direction(self):
        from conftest import RECOVERY_REFLECTANCES, aligned_camera, striped_scene
        from shadowfree import grayscale_invariant

        scene = striped_scene(
            aligned_camera(), RECOVERY_REFLECTANCES, (2800.0, 6500.0), size=(48, 48)
        )
        basis = zero_sum_basis(4)
        reduced = reduce_chromaticity(log_chromaticity(scene.image.clamped()), basis)
        inv = grayscale_invariant(reduced, scene.true_direction)
        for sid in np.unique(scene.surface_ids):
            values = inv.raw[scene.surface_ids == sid]
            assert (values.max() - values.min()) / values.mean() < 1e-6

    def test_shading_gradient_invisible_in_invariant(self):
        from conftest import aligned_camera, striped_scene
        from shadowfree import grayscale_invariant

        scene = striped_scene(
            aligned_camera(),
            np.array([[0.6, 0.5, 0.4, 0.7], [0.3, 0.6, 0.5, 0.45]]),
            (5000.0,),
            size=(32, 32),
            shading=shading_map(32, 32, "linear_x", 0.4, 1.0),
        )
        basis = zero_sum_basis(4)
        reduced = reduce_chromaticity(log_chromaticity(scene.image.clamped()), basis)
        inv = grayscale_invariant(reduced, scene.true_direction)
        for sid in np.unique(scene.surface_ids):
            values = inv.raw[scene.surface_ids == sid]
            assert (values.max() - values.min()) / values.mean() < 1e-9

    def test_checkerboard_scene_recovers_direction_within_grid(self):
        # 2-surface checkerboard under two lights, 3-channel camera whose
        # invariant direction falls on the grid; cells cycle over a 3x3
        # grid so the two surface areas differ and the minimum is unique.
        from conftest import aligned_camera, balanced_illuminants
        from shadowfree import angular_distance_deg, generate_scene, run_pipeline

        camera = CameraModel(aligned_camera().wavelengths_nm[:3])
        surfaces = (SurfaceSpec((0.62, 0.45, 0.55)), SurfaceSpec((0.4, 0.58, 0.36)))
        illuminants = balanced_illuminants(camera, (2800.0, 7000.0))
        scene = generate_scene(
            checker_map(48, 48, 3, 3, 2),
            stripe_map(48, 48, 2, "y"),
            np.ones((48, 48)),
            surfaces,
            illuminants,
            camera,
        )
        outputs = run_pipeline(scene.image, grid_step_deg=2.0)
        distance = angular_distance_deg(outputs.direction, scene.true_direction)
        assert distance <= 1.5 * 2.0


class TestSceneConfig:
    CONFIG = {
        "width": 12,
        "height": 10,
        "camera": {"wavelengths_nm": [610.0, 540.0, 460.0, 850.0]},
        "surfaces": [
            {"reflectances": [0.6, 0.5, 0.4, 0.7]},
            {"reflectances": [0.3, 0.6, 0.5, 0.45], "label": "grass"},
        ],
        "layout": {"pattern": "stripes_x"},
        "illumination": {
            "temperatures_k": [2800.0, 6500.0],
            "intensities": [2.0e15, 1.0e15],
            "pattern": "bands_y",
        },
        "shading": {"kind": "linear_x", "low": 0.7, "high": 1.0},
        "noise": {"sigma": 0.0, "seed": 3},
    }

    def test_builds_from_mapping(self):
        scene = scene_from_config(self.CONFIG)
        assert scene.image.data.shape == (10, 12, 4)
        assert scene.surfaces[1].label == "grass"
        assert scene.illuminants[0].intensity == 2.0e15

    def test_builds_from_toml_file(self, tmp_path):
        lines = [
            "width = 12",
            "height = 10",
            "[camera]",
            "wavelengths_nm = [610.0, 540.0, 460.0, 850.0]",
            "[[surfaces]]",
            "reflectances = [0.6, 0.5, 0.4, 0.7]",
            "[[surfaces]]",
            "reflectances = [0.3, 0.6, 0.5, 0.45]",
            "[illumination]",
            "temperatures_k = [2800.0, 6500.0]",
            "intensities = [2.0e15, 1.0e15]",
        ]
        path = tmp_path / "scene.toml"
        path.write_text("\n".join(lines) + "\n")
        scene = scene_from_config(path)
        assert scene.image.data.shape == (10, 12, 4)
        assert scene.true_direction.dims == 3
        assert scene.true_direction_rgb.dims == 2

    def test_save_scene_artifacts_round_trip(self, tmp_path):
        scene = scene_from_config(self.CONFIG)
        paths = save_scene(scene, tmp_path, "demo")
        for key in ("rgb", "nir", "surface_ids", "illuminant_ids", "truth"):
            assert key in paths

        from shadowfree import load_pair, read_image

        reloaded = load_pair(paths["rgb"], paths["nir"], linearize=False)
        assert reloaded.channels == 4
        np.testing.assert_allclose(
            reloaded.data, scene.image.data, atol=1.0 / 65535.0
        )
        ids = read_image(paths["surface_ids"]) * 255.0
        np.testing.assert_array_equal(np.round(ids).astype(int), scene.surface_ids)
        truth = json.loads((tmp_path / "demo_truth.json").read_text())
        assert truth["camera"]["wavelengths_nm"] == [610.0, 540.0, 460.0, 850.0]
        assert len(truth["line_models"]) == 2
        np.testing.assert_allclose(
            truth["true_direction"]["vector"],
            scene.true_direction.vector,
            atol=1e-12,
        )
