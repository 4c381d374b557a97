import math
import shutil
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from soundfield.acoustics.bank import RirBank, SimulatingSceneProvider, generate_rir_bank, simulate_scene
from soundfield.acoustics.geometry import SOURCE_DISTANCE_RANGE, WALL_MARGIN, Room, sample_scene_geometry
from soundfield.acoustics.image_source import enumerate_image_sources, image_lattice, image_source_field, path_spectrum
from soundfield.acoustics.materials import (
    Material,
    absorptive_presets,
    design_material,
    load_absorption_tables,
    material_bank,
    resolve_surfaces,
    zero_phase_response,
)
from soundfield.acoustics.simulator import (
    SimulationConfig,
    band_limited_peak,
    hermitian_residue,
    periodic_sinc_oracle,
    simulate_rir,
    simulate_rir_spectrum,
)
from soundfield.exceptions import ConfigurationError, GeometryError, RirLengthError

from .helpers import FS, SLOW_TESTS, small_simulation

RECEIVER = np.array([5.0, 5.0, 5.0])
BIG_ROOM = Room((10.0, 10.0, 10.0))


def free_field(source, rir_length=1024):
    cfg = SimulationConfig(max_order=0, jitter=0.0, fs=FS, rir_length=rir_length, engine='exact')
    return simulate_rir(BIG_ROOM, source, RECEIVER, cfg)


def relative_error(estimate, reference):
    return np.linalg.norm(estimate - reference) / np.linalg.norm(reference)


class ImageSourceTests(SimpleTestCase):
    def test_image_counts(self):
        self.assertEqual([len(image_lattice(k)) for k in (0, 1, 2, 3)], [1, 7, 25, 63])
        assert_array_equal(image_lattice(2)[0], [0, 0, 0])

    def test_paths_sorted_by_order(self):
        paths = enumerate_image_sources(BIG_ROOM, (6.0, 5.0, 5.0), RECEIVER, 2)
        self.assertEqual(len(paths), 25)
        self.assertEqual([p.order for p in paths], sorted(p.order for p in paths))
        self.assertAlmostEqual(paths[0].distance, 1.0)
        self.assertAlmostEqual(paths[0].delay_s, 1.0 / 343.0)

    def test_wall_sequences(self):
        field = image_source_field(BIG_ROOM, (6.0, 5.0, 5.0), RECEIVER, 2)
        sequences = {tuple(field.indices[i]): field.path(i).wall_sequence for i in range(len(field))}
        self.assertEqual(sequences[(1, 0, 0)], (3,))
        self.assertEqual(sequences[(-1, 0, 0)], (2,))
        self.assertEqual(sequences[(0, 0, -1)], (0,))
        self.assertEqual(sequences[(0, 2, 0)], (5, 4))
        self.assertEqual(sequences[(1, 0, 1)], (3, 1))

    def test_jitter_bounds_and_determinism(self):
        src = (3.0, 6.0, 4.0)
        reference = image_source_field(BIG_ROOM, src, RECEIVER, 3)
        first = image_source_field(BIG_ROOM, src, RECEIVER, 3, jitter=0.2, rng=np.random.default_rng(11))
        again = image_source_field(BIG_ROOM, src, RECEIVER, 3, jitter=0.2, rng=np.random.default_rng(11))
        displacement = np.linalg.norm(first.positions - reference.positions, axis=1)
        self.assertEqual(displacement[0], 0.0)
        self.assertTrue(np.all(displacement <= 0.2 * reference.orders + 1e-12))
        self.assertTrue(np.any(displacement > 0.0))
        assert_array_equal(first.positions, again.positions)

    def test_jitter_needs_generator(self):
        with self.assertRaises(ConfigurationError):
            image_source_field(BIG_ROOM, (6.0, 5.0, 5.0), RECEIVER, 1, jitter=0.1)

    def test_degenerate_geometry(self):
        with self.assertRaises(GeometryError):
            image_source_field(BIG_ROOM, RECEIVER, RECEIVER, 1)
        with self.assertRaises(GeometryError):
            image_source_field(BIG_ROOM, (11.0, 5.0, 5.0), RECEIVER, 1)

    def test_rigid_path_spectrum_is_a_delay(self):
        bank = material_bank(FS)
        path = enumerate_image_sources(BIG_ROOM, (6.0, 5.0, 5.0), RECEIVER, 1)[3]
        freqs = np.linspace(0.0, FS / 2.0, 65)
        expected = path.gain * np.exp(-2j * np.pi * freqs * path.delay_s)
        assert_allclose(path_spectrum(path, freqs, BIG_ROOM, bank), expected, atol=1e-12)
        with self.assertRaises(ConfigurationError):
            path_spectrum(path, [FS], BIG_ROOM, bank)


class MaterialTests(SimpleTestCase):
    def test_presets_are_passive(self):
        freqs = np.linspace(0.0, FS / 2.0, 8193)
        for name, material in material_bank(FS).items():
            with self.subTest(material=name):
                self.assertLessEqual(np.max(np.abs(material.amplitude(freqs))), 1.0)

    def test_rigid_is_a_centred_impulse(self):
        rigid = material_bank(FS)['rigid']
        self.assertTrue(rigid.is_rigid())
        assert_allclose(rigid.amplitude([0.0, 1000.0, FS / 2.0]), 1.0)
        self.assertNotIn('rigid', absorptive_presets())

    def test_absorption_shapes_response(self):
        carpet = material_bank(FS)['carpet']
        low, high = carpet.amplitude([125.0, 4000.0])
        self.assertGreater(low, high)
        self.assertAlmostEqual(high, math.sqrt(1.0 - 0.65), delta=0.1)

    def test_invalid_materials(self):
        with self.assertRaises(ConfigurationError):
            Material('even', np.ones(10) / 10, FS)
        with self.assertRaises(ConfigurationError):
            Material('loud', np.pad([2.0], 8), FS)
        with self.assertRaises(ConfigurationError):
            Material('long', np.pad([1.0], 32), FS)
        with self.assertRaises(ConfigurationError):
            resolve_surfaces(('rigid',) * 5 + ('unobtainium',), material_bank(FS))

    def test_longest_reflection_filter(self):
        self.assertEqual(Material('edge', np.pad([1.0], 31), FS).reflection_fir.size, 63)
        self.assertEqual(material_bank(FS, taps=64)['carpet'].reflection_fir.size, 63)

    def test_zero_phase_response_of_symmetric_fir(self):
        fir = np.array([0.25, 0.5, 0.25])
        assert_allclose(zero_phase_response(fir, FS, [0.0, FS / 2.0]), [1.0, 0.0], atol=1e-15)


class FreeFieldTests(SimpleTestCase):
    def test_frontal_source(self):
        rir = free_field((6.0, 5.0, 5.0))
        peak, position = band_limited_peak(rir.channel('W'))
        self.assertAlmostEqual(peak, 1.0, delta=1e-3)
        self.assertEqual(round(position), round(FS / 343.0))
        assert_allclose(rir.channel('X'), rir.channel('W'), atol=1e-12)
        w_peak = np.max(np.abs(rir.channel('W')))
        self.assertLessEqual(np.max(np.abs(rir.channel('Y'))), 1e-6 * w_peak)
        self.assertLessEqual(np.max(np.abs(rir.channel('Z'))), 1e-6 * w_peak)

    def test_zenith_source(self):
        rir = free_field((5.0, 5.0, 7.0))
        w_peak, position = band_limited_peak(rir.channel('W'))
        z_peak, _ = band_limited_peak(rir.channel('Z'))
        self.assertAlmostEqual(w_peak, 0.5, delta=1e-3)
        self.assertAlmostEqual(z_peak, 0.5, delta=1e-3)
        self.assertEqual(round(position), round(2.0 * FS / 343.0))

    def test_direct_path_energy_split(self):
        rir = free_field((6.0, 6.0, 5.5))
        peaks = [band_limited_peak(rir.channel(c))[0] for c in 'WYZX']
        self.assertAlmostEqual(peaks[1] ** 2 + peaks[2] ** 2 + peaks[3] ** 2, peaks[0] ** 2, delta=1e-6 * peaks[0] ** 2)

    def test_short_rir_length_reports_requirement(self):
        with self.assertRaises(RirLengthError) as ctx:
            free_field((6.0, 5.0, 5.0), rir_length=20)
        self.assertEqual(ctx.exception.required_samples, math.floor(FS / 343.0) + 1)

    def test_duration_limit_drops_late_paths(self):
        cfg = SimulationConfig(max_order=2, jitter=0.0, fs=FS, rir_length=4096, max_duration_s=0.01, engine='exact')
        rir = simulate_rir(BIG_ROOM, (6.0, 5.0, 5.0), RECEIVER, cfg)
        self.assertEqual(rir.path_count, 1)
        self.assertEqual(rir.num_samples, 4096)


class SimulatorTests(SimpleTestCase):
    def test_oracle_equivalence_in_rigid_rooms(self):
        """20 random rigid rooms: the spectral RIR equals the periodic-sinc sum within 1 %."""
        for seed in range(20):
            rng = np.random.default_rng(seed)
            geometry = sample_scene_geometry(rng, 1, ['rigid'])
            cfg = SimulationConfig(max_order=int(rng.integers(0, 3)), jitter=0.0, fs=FS, rir_length=4096, engine='exact')
            spectrum, n_fft, length, field = simulate_rir_spectrum(geometry.room, geometry.sources[0].position, geometry.receiver, cfg)
            rir = np.fft.irfft(spectrum, n=n_fft, axis=-1)[:, :length]
            oracle = periodic_sinc_oracle(field, FS, n_fft, length)
            for c in range(4):
                with self.subTest(seed=seed, channel=c):
                    if np.linalg.norm(oracle[c]) > 1e-9:
                        self.assertLessEqual(relative_error(rir[c], oracle[c]), 0.01)
                    else:
                        self.assertLessEqual(np.max(np.abs(rir[c])), 1e-9)

    def test_spectrum_is_hermitian(self):
        rng = np.random.default_rng(4)
        geometry = sample_scene_geometry(rng, 1)
        spectrum, n_fft, _, _ = simulate_rir_spectrum(
            geometry.room, geometry.sources[0].position, geometry.receiver,
            small_simulation(jitter=0.05), rng=rng,
        )
        self.assertLessEqual(hermitian_residue(spectrum, n_fft), 1e-10)

    def test_engines_agree_in_rigid_room(self):
        room = Room((6.0, 4.5, 3.2))
        src, recv = (1.3, 2.2, 1.7), (3.9, 2.5, 1.4)
        exact = simulate_rir(room, src, recv, small_simulation(max_order=4, rir_length=2048, engine='exact'))
        fast = simulate_rir(room, src, recv, small_simulation(max_order=4, rir_length=2048, engine='fast'))
        self.assertLessEqual(relative_error(fast.samples, exact.samples), 1e-8)

    def test_engines_agree_with_absorptive_walls(self):
        room = Room((6.0, 4.5, 3.2), ('carpet', 'plaster', 'glass', 'curtain', 'concrete', 'glass'))
        src, recv = (1.3, 2.2, 1.7), (3.9, 2.5, 1.4)
        exact = simulate_rir(room, src, recv, small_simulation(max_order=3, engine='exact'))
        fast = simulate_rir(room, src, recv, small_simulation(max_order=3, engine='fast'))
        self.assertEqual(exact.num_samples, fast.num_samples)
        self.assertLessEqual(relative_error(fast.samples, exact.samples), 1e-2)

    def test_absorptive_tail_decays(self):
        bands, _ = load_absorption_tables()
        foam = design_material('foam', (0.9,) * len(bands), bands, FS, 33)
        room = Room((4.0, 5.0, 3.0), ('foam',) * 6)
        rir = simulate_rir(room, (1.0, 1.5, 1.2), (2.1, 2.4, 1.6), small_simulation(max_order=10, max_duration_s=1.5),
                           bank={'foam': foam})
        energy = np.sum(rir.samples ** 2, axis=0)
        tail = energy[int(0.9 * energy.size):].sum()
        self.assertLess(tail, 0.01 * energy.sum())

    def test_jittered_simulation_is_reproducible(self):
        cfg = small_simulation(jitter=0.1)
        room = Room((6.0, 4.5, 3.2))
        first = simulate_rir(room, (1.3, 2.2, 1.7), (3.9, 2.5, 1.4), cfg, rng=np.random.default_rng(5))
        again = simulate_rir(room, (1.3, 2.2, 1.7), (3.9, 2.5, 1.4), cfg, rng=np.random.default_rng(5))
        assert_array_equal(first.samples, again.samples)

    def test_config_validation(self):
        for bad in ({'max_order': -1}, {'jitter': -0.1}, {'engine': 'magic'}, {'rir_length': 0}):
            with self.subTest(**bad):
                with self.assertRaises(ConfigurationError):
                    SimulationConfig(**bad)
        cfg = SimulationConfig(max_order=3, engine='exact')
        self.assertEqual(SimulationConfig.from_dict(cfg.to_dict()), cfg)


class SceneGeometryTests(SimpleTestCase):
    def test_sampled_scenes_respect_ranges(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            geometry = sample_scene_geometry(rng, 4)
            size = geometry.room.size
            with self.subTest(seed=seed):
                self.assertTrue(np.all((size >= 2.0) & (size <= 15.0)))
                self.assertTrue(np.all(np.abs(geometry.receiver - size / 2.0) <= 0.1 * size + 1e-12))
                self.assertEqual(geometry.target_index, 0)
                for source in geometry.sources:
                    self.assertTrue(0.6 <= source.distance <= 5.0)
                    self.assertTrue(geometry.room.contains(source.position, margin=0.1))
                    assert_allclose(geometry.receiver + source.distance * source.direction.unit_vector(),
                                    source.position, atol=1e-9)
                self.assertTrue(set(geometry.room.surface_materials) <= set(absorptive_presets()))

    def test_source_distances_and_margins_over_many_scenes(self):
        """Distances short enough to fit every direction are never rejected, so they stay uniform."""
        rng = np.random.default_rng(2024)
        low, high = SOURCE_DISTANCE_RANGE
        fractions = []
        for _ in range(10_000 if SLOW_TESTS else 2_000):
            geometry = sample_scene_geometry(rng, 4)
            size = geometry.room.size
            safe = min(np.min(geometry.receiver), np.min(size - geometry.receiver)) - WALL_MARGIN
            top = min(high, safe)
            for source in geometry.sources:
                self.assertTrue(np.all(source.position >= WALL_MARGIN))
                self.assertTrue(np.all(source.position <= size - WALL_MARGIN))
                if source.distance <= top:
                    fractions.append((source.distance - low) / (top - low))

        counts, _ = np.histogram(fractions, bins=5, range=(0.0, 1.0))
        n, p = len(fractions), 1.0 / 5
        self.assertGreater(n, 1000)
        bound = 3.0 * math.sqrt(n * p * (1.0 - p))
        for k, count in enumerate(counts):
            with self.subTest(bin=k):
                self.assertLessEqual(abs(count - n * p), bound)

    def test_placement_cap_raises(self):
        with self.assertRaises(GeometryError):
            sample_scene_geometry(np.random.default_rng(0), 1, dims_range=(1.0, 1.0), max_tries=50)

    def test_invalid_rooms(self):
        with self.assertRaises(GeometryError):
            Room((0.0, 3.0, 3.0))
        with self.assertRaises(ConfigurationError):
            Room((3.0, 3.0, 3.0), ('rigid',) * 5)


class RirBankTests(SimpleTestCase):
    cfg = small_simulation(max_order=1, max_duration_s=0.1, jitter=0.05)

    def make_bank(self, workers=1):
        root = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, root, ignore_errors=True)
        generate_rir_bank(root, count=6, seed=21, cfg=self.cfg, n_sources=2, materials=['concrete', 'carpet'],
                          workers=workers, progress=False)
        return root

    def test_bank_round_trip(self):
        root = self.make_bank()
        bank = RirBank.load(root)
        self.assertEqual(len(bank), 3)
        self.assertEqual(bank.sources_per_scene, 2)
        stored = bank.scene(1)
        fresh = simulate_scene(21, 1, self.cfg, 2, ['concrete', 'carpet'])
        self.assertEqual(stored.scene_id, 'scene_000001')
        for a, b in zip(stored.rirs, fresh.rirs):
            assert_array_equal(a.samples, b.samples.astype(np.float32))
        self.assertEqual(stored.geometry.room, fresh.geometry.room)

    def test_bank_is_byte_identical_across_worker_counts(self):
        serial, parallel = self.make_bank(workers=1), self.make_bank(workers=2)
        files = sorted(p.relative_to(serial) for p in serial.rglob('*') if p.is_file())
        self.assertEqual(files, sorted(p.relative_to(parallel) for p in parallel.rglob('*') if p.is_file()))
        for name in files:
            with self.subTest(file=str(name)):
                self.assertEqual((serial / name).read_bytes(), (parallel / name).read_bytes())

    def test_count_is_a_number_of_rirs(self):
        root = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, root, ignore_errors=True)
        manifest = generate_rir_bank(root, count=5, seed=21, cfg=self.cfg, n_sources=2,
                                     materials=['concrete', 'carpet'], workers=1, progress=False)
        self.assertEqual(manifest['count'], 5)
        self.assertEqual(len(manifest['rirs']), 5)
        self.assertEqual(manifest['scene_count'], 3)
        self.assertEqual(len(list(root.rglob('src_*.wav'))), 5)
        self.assertEqual([e['sources'] for e in manifest['scenes']], [2, 2, 1])
        for row in manifest['rirs']:
            self.assertTrue((root / row['path']).is_file())

        trimmed = RirBank.load(root).scene(2)
        full = simulate_scene(21, 2, self.cfg, 2, ['concrete', 'carpet'])
        self.assertEqual(len(trimmed.geometry.sources), 1)
        assert_array_equal(trimmed.rirs[0].samples, full.rirs[0].samples.astype(np.float32))

    def test_empty_bank(self):
        root = Path(tempfile.mkdtemp())
        self.addCleanup(shutil.rmtree, root, ignore_errors=True)
        manifest = generate_rir_bank(root, count=0, seed=1, cfg=self.cfg, progress=False)
        self.assertEqual((manifest['rirs'], manifest['scenes']), ([], []))
        self.assertEqual(len(RirBank.load(root)), 0)

    def test_simulating_provider_follows_stream(self):
        provider = SimulatingSceneProvider(self.cfg, n_sources=2, materials=['concrete'])
        first = provider.draw(np.random.default_rng(9))
        again = provider.draw(np.random.default_rng(9))
        assert_array_equal(first.rirs[1].samples, again.rirs[1].samples)
        self.assertEqual(len(first.rirs), 2)
