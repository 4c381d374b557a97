import math
import shutil
import tempfile
import unittest
from pathlib import Path

import numpy as np
import pandas as pd
import soundfile as sf
from django.test import SimpleTestCase
from numpy.testing import assert_allclose, assert_array_equal

from soundfield.acoustics.bank import generate_rir_bank
from soundfield.ambisonics.directions import Direction, great_circle_distance, sample_uniform_direction
from soundfield.ambisonics.encoding import FoaSignal, sh_eval
from soundfield.exceptions import (
    ConfigurationError,
    DataIntegrityError,
    DegenerateInputError,
    PoolExhaustedError,
    SignalFormatError,
)
from soundfield.mixing import (
    ClipPool,
    FoaSegmentPool,
    build_pair,
    build_remix_pair,
    close_secondary_from_meta,
    draw_pair_spec,
    fit_clip_length,
    import_clips,
    load_pair,
    mix_scene,
    place_near_target,
    render_pair,
    render_source,
    rotate_remix,
)
from soundfield.mixing.clips import rms_dbfs
from soundfield.mixing.dataset import dataset_job, generate_dataset, list_pairs, make_pair, write_pair
from soundfield.mixing.scene import HEADROOM_PEAK
from soundfield.mixing.segments import SegmentRecord
from soundfield.utils.audio_io import write_foa_wav
from soundfield.utils.manifests import dump_json, load_json

from .helpers import (
    DESCRIPTIONS,
    FS,
    SLOW_TESTS,
    anechoic_bank,
    anechoic_scene,
    clip_pool,
    degrees,
    impulse_rir,
    mixer_config,
    noise,
    plane_wave,
    small_simulation,
)


def temp_dir(test):
    path = Path(tempfile.mkdtemp())
    test.addCleanup(shutil.rmtree, path, ignore_errors=True)
    return path


def wrapped_degrees(angle):
    return (angle + 180.0) % 360.0 - 180.0


def close_fraction(cfg, count, seed=0, scenes=None):
    pool = clip_pool()
    provider = anechoic_bank(scenes or count, seed=seed)
    job = {'seed': seed, 'mixer': cfg.to_dict()}
    return np.mean([make_pair(job, i, pool, provider).meta['close_secondary'] for i in range(count)])


def write_source_clips(root, rate=22050):
    """Stereo noise files, one per description, plus a silent one."""
    root.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(0)
    rows = []
    for k, description in enumerate(DESCRIPTIONS):
        name = f'take_{k}.wav'
        sf.write(str(root / name), 0.3 * rng.standard_normal((rate, 2)), rate)
        rows.append({'filename': name, 'description': description})
    sf.write(str(root / 'silence.wav'), np.zeros(rate), rate)
    csv = root / 'descriptions.csv'
    pd.DataFrame(rows[:-1]).to_csv(csv, index=False)
    return csv


class ClipTests(SimpleTestCase):
    def test_long_clip_is_cropped(self):
        clip = np.arange(100.0)
        assert_array_equal(fit_clip_length(clip, 10, offset=30), clip[30:40])
        cropped = fit_clip_length(clip, 10, rng=np.random.default_rng(0))
        self.assertEqual(cropped.size, 10)
        assert_array_equal(np.diff(cropped), np.ones(9))

    def test_short_clip_is_looped_with_crossfade(self):
        clip = np.ones(50)
        looped = fit_clip_length(clip, 300, crossfade=10)
        self.assertEqual(looped.size, 300)
        # Raised-cosine fades of a constant sum to the constant
        assert_allclose(looped, 1.0, atol=1e-12)
        assert_array_equal(fit_clip_length(np.arange(3.0), 7), [0, 1, 2, 0, 1, 2, 0])

    def test_empty_clip_rejected(self):
        with self.assertRaises(DegenerateInputError):
            fit_clip_length(np.array([]), 10)

    def test_import_clips(self):
        source, out = temp_dir(self) / 'raw', temp_dir(self)
        csv = write_source_clips(source)
        pool = import_clips(source, out, descriptions_csv=csv, sample_rate=FS, target_dbfs=-25.0)
        self.assertEqual(len(pool), len(DESCRIPTIONS))
        reloaded = ClipPool.load(out)
        self.assertEqual([r.description for r in reloaded.records], list(DESCRIPTIONS[:-1]) + ['take_5'])
        for record in reloaded.records:
            with self.subTest(clip=record.clip_id):
                samples = reloaded.audio(record.clip_id)
                self.assertEqual(record.sample_rate, FS)
                self.assertEqual(samples.size, FS)
                self.assertAlmostEqual(rms_dbfs(samples), -25.0, places=3)

    def test_import_needs_source_directory(self):
        with self.assertRaises(FileNotFoundError):
            import_clips(temp_dir(self) / 'missing', temp_dir(self))


class PlacementTests(SimpleTestCase):
    def test_near_draws_stay_in_box(self):
        rng = np.random.default_rng(0)
        target = Direction(0.0, 0.0)
        draws = [place_near_target(target, rng) for _ in range(10_000)]
        az = np.array([wrapped_degrees(d.to_degrees()[0]) for d in draws])
        el = np.array([d.to_degrees()[1] for d in draws])
        self.assertTrue(np.all(np.abs(az) <= 15.0 + 1e-9))
        self.assertTrue(np.all(np.abs(el) <= 15.0 + 1e-9))
        widest = max(math.degrees(great_circle_distance(target, d)) for d in draws)
        self.assertLessEqual(widest, 21.2)
        # Roughly uniform over the box
        self.assertAlmostEqual(float(np.mean(az > 0)), 0.5, delta=0.03)

    def test_near_draws_clamp_elevation(self):
        rng = np.random.default_rng(1)
        target = Direction.from_degrees(40.0, 80.0)
        elevations = [place_near_target(target, rng).elevation for _ in range(2000)]
        self.assertLessEqual(max(elevations), math.pi / 2)
        self.assertGreater(max(elevations), math.radians(89.0))


class RenderTests(SimpleTestCase):
    def test_render_impulse(self):
        mono = noise(0, 200)
        rir = impulse_rir(degrees(90), delay=5)
        out = render_source(mono, rir, 6.0, FS, num_samples=200)
        gain = 10.0 ** (6.0 / 20.0)
        assert_allclose(out.channel('Y')[5:], gain * mono[:195], atol=1e-12)
        assert_allclose(out.channel('X'), 0.0, atol=1e-12)
        assert_allclose(out.channel('W')[:5], 0.0, atol=1e-12)

    def test_render_rate_mismatch(self):
        with self.assertRaises(SignalFormatError):
            render_source(noise(0, 100), impulse_rir(degrees(0)), 0.0, 8000)

    def test_silent_target_rejected(self):
        pool = clip_pool()
        scene = anechoic_scene([degrees(0), degrees(90)])
        spec = draw_pair_spec(np.random.default_rng(0), pool, scene, mixer_config(near_prob=0.0))
        silent = [FoaSignal.zeros(100, FS), plane_wave(degrees(90), noise(1, 100))]
        with self.assertRaises(DegenerateInputError):
            mix_scene(spec.sources, silent, FS)


class PairTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.pool = clip_pool()
        cls.bank = anechoic_bank(20, seed=3)

    def pair(self, seed, **overrides):
        return build_pair(np.random.default_rng(seed), self.pool, self.bank, mixer_config(**overrides))

    def test_mixture_identity_is_exact(self):
        for seed in range(10):
            pair = self.pair(seed)
            with self.subTest(seed=seed):
                assert_array_equal(pair.mixture.samples, pair.target.samples + pair.residual.samples)
                assert_array_equal(pair.mixture.samples.astype(np.float32), pair.mixture.samples)
                self.assertEqual(pair.identity_error(), 0.0)

    def test_energy_sanity(self):
        for seed in range(5):
            pair = self.pair(seed)
            self.assertLessEqual(pair.mixture.rms(), pair.target.rms() + pair.residual.rms() + 1e-12)

    def test_loud_pairs_are_scaled_below_full_scale(self):
        pair = self.pair(4, gain_db_range=(30.0, 30.0))
        self.assertLess(pair.meta['peak_scale'], 1.0)
        self.assertLessEqual(np.max(np.abs(pair.mixture.samples)), HEADROOM_PEAK)
        assert_array_equal(pair.mixture.samples, pair.target.samples + pair.residual.samples)

    def test_full_length_pair(self):
        pair = self.pair(9, num_samples=65536)
        self.assertEqual(pair.mixture.num_samples, 65536)
        self.assertEqual(pair.meta['num_samples'], 65536)
        self.assertEqual(pair.identity_error(), 0.0)
        self.assertGreater(pair.target.rms(), 0.0)

    def test_same_stream_same_pair(self):
        first, again = self.pair(12), self.pair(12)
        assert_array_equal(first.mixture.samples, again.mixture.samples)
        self.assertEqual(first.meta, again.meta)

    def test_two_stage_build(self):
        rng = np.random.default_rng(8)
        scene = self.bank.draw(rng)
        cfg = mixer_config()
        spec = draw_pair_spec(rng, self.pool, scene, cfg)
        staged = render_pair(spec, scene, self.pool, cfg)
        assert_array_equal(staged.mixture.samples, self.pair(8).mixture.samples)

    def test_metadata(self):
        pair = self.pair(2)
        meta = pair.meta
        self.assertEqual(meta['kind'], 'rir_mixture')
        self.assertEqual(len(meta['secondaries']), 3)
        self.assertIn(meta['target']['description'], DESCRIPTIONS)
        self.assertFalse(meta['target']['silenced'])
        self.assertEqual(close_secondary_from_meta(meta), meta['close_secondary'])
        clip_ids = [meta['target']['clip_id']] + [s['clip_id'] for s in meta['secondaries']]
        self.assertEqual(len(set(clip_ids)), 4)

    def test_full_silencing_leaves_target_only(self):
        pair = self.pair(6, silence_prob=1.0, near_prob=0.0)
        self.assertTrue(all(s['silenced'] for s in pair.meta['secondaries']))
        self.assertEqual(pair.residual.energy(), 0.0)
        self.assertFalse(pair.meta['close_secondary'])

    def test_near_placement(self):
        """near_prob = 1: one unsilenced secondary with another description inside the box."""
        for seed in range(20):
            meta = self.pair(seed, near_prob=1.0, silence_prob=1.0).meta
            target_dir = Direction.from_dict(meta['target']['direction'])
            near = [s for s in meta['secondaries'] if s['near']]
            with self.subTest(seed=seed):
                self.assertTrue(meta['near_placed'])
                self.assertEqual(len(near), 1)
                self.assertFalse(near[0]['silenced'])
                self.assertNotEqual(near[0]['description'].casefold(), meta['target']['description'].casefold())
                d_az, d_el = np.subtract(Direction.from_dict(near[0]['direction']).to_degrees(), target_dir.to_degrees())
                self.assertLessEqual(abs(wrapped_degrees(d_az)), 15.0 + 1e-9)
                self.assertLessEqual(abs(d_el), 15.0 + 1e-9)

    def test_near_secondary_rir_is_rotated(self):
        rng = np.random.default_rng(5)
        scene = self.bank.draw(rng)
        cfg = mixer_config(near_prob=1.0, silence_prob=0.0)
        spec = draw_pair_spec(rng, self.pool, scene, cfg)
        near = next(s for s in spec.secondaries if s.near)
        original = scene.geometry.sources[near.geometry].direction
        rotated = np.array(near.rotation) @ sh_eval(original).coefficients
        assert_allclose(rotated, sh_eval(near.direction).coefficients, atol=1e-10)
        pair = render_pair(spec, scene, self.pool, cfg)
        self.assertTrue(any(s['rotation'] is not None for s in pair.meta['secondaries']))

    def test_target_exclusion(self):
        for seed in range(20):
            meta = self.pair(seed, exclude_target=('dog', 'PIANO')).meta
            self.assertNotIn(meta['target']['description'], ('dog barking', 'piano'))

    def test_pool_cannot_place_near(self):
        same = clip_pool(descriptions=('speech',) * 6)
        with self.assertRaises(PoolExhaustedError):
            build_pair(np.random.default_rng(0), same, self.bank, mixer_config(near_prob=1.0))
        with self.assertRaises(PoolExhaustedError):
            build_pair(np.random.default_rng(0), clip_pool(descriptions=('a', 'b')), self.bank, mixer_config())

    def test_close_fraction_without_near_placement(self):
        self.assertLessEqual(close_fraction(mixer_config(near_prob=0.0), 300), 0.08)

    def test_close_fraction_with_near_placement(self):
        # Box corners fall outside the 15 degree cap, so the expected fraction sits just under 0.5
        self.assertTrue(0.45 <= close_fraction(mixer_config(near_prob=0.5), 1000) <= 0.55)

    def test_mixer_config_validation(self):
        for bad in ({'near_prob': 1.5}, {'silence_prob': -0.1}, {'gain_db_range': (5, -5)}, {'num_samples': 0}):
            with self.subTest(**{k: str(v) for k, v in bad.items()}):
                with self.assertRaises(ConfigurationError):
                    mixer_config(**bad)


class SegmentRemixTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        records, audio = [], {}
        for k, (description, az, el) in enumerate((('speech', 0, 0), ('piano', 90, 30), ('rain', 200, -20))):
            direction = degrees(az, el)
            records.append(SegmentRecord(f'seg_{k}', f'seg_{k}.wav', description, direction))
            audio[f'seg_{k}'] = plane_wave(direction, 0.05 * noise(k, 5000))
        cls.pool = FoaSegmentPool(records, audio=audio, sample_rate=FS)

    def test_rotate_remix_moves_the_source(self):
        known, new = degrees(10, 5), degrees(250, -40)
        mono = noise(2, 64)
        rotated, direction = rotate_remix(plane_wave(known, mono), known, np.random.default_rng(0), new_dir=new)
        self.assertEqual(direction, new)
        assert_allclose(rotated.samples, plane_wave(new, mono).samples, atol=1e-12)
        _, drawn = rotate_remix(plane_wave(known, mono), known, np.random.default_rng(0))
        self.assertEqual(drawn, sample_uniform_direction(np.random.default_rng(0)))

    def test_remix_pair(self):
        for seed in range(10):
            pair = build_remix_pair(np.random.default_rng(seed), self.pool, mixer_config())
            target_dir = Direction.from_dict(pair.meta['target']['direction'])
            with self.subTest(seed=seed):
                assert_array_equal(pair.mixture.samples, pair.target.samples + pair.residual.samples)
                w = pair.target.channel('W')
                expected = np.outer(sh_eval(target_dir).coefficients, w)
                assert_allclose(pair.target.samples, expected, atol=1e-6)
                self.assertEqual(pair.meta['kind'], 'segment_remix')
                self.assertEqual(close_secondary_from_meta(pair.meta), pair.meta['close_secondary'])

    def test_near_remix_uses_another_description(self):
        for seed in range(10):
            meta = build_remix_pair(np.random.default_rng(seed), self.pool, mixer_config(near_prob=1.0)).meta
            self.assertTrue(meta['near_placed'])
            self.assertNotEqual(meta['secondaries'][0]['description'], meta['target']['description'])

    def test_remix_needs_two_segments(self):
        single = FoaSegmentPool(self.pool.records[:1], audio={'seg_0': self.pool.audio(self.pool.records[0])}, sample_rate=FS)
        with self.assertRaises(PoolExhaustedError):
            build_remix_pair(np.random.default_rng(0), single, mixer_config())


class DatasetTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.root = Path(tempfile.mkdtemp())
        source = cls.root / 'raw'
        csv = write_source_clips(source)
        import_clips(source, cls.root / 'clips', descriptions_csv=csv, sample_rate=FS)
        generate_rir_bank(cls.root / 'rirs', count=16, seed=1, cfg=small_simulation(max_order=1, max_duration_s=0.05),
                          n_sources=4, workers=1, progress=False)

    @classmethod
    def tearDownClass(cls):
        shutil.rmtree(cls.root, ignore_errors=True)
        super().tearDownClass()

    def build(self, name, seed=17, count=6, workers=1, **mixer):
        job = dataset_job(self.root / name, seed, mixer_config(**mixer),
                          clips_dir=self.root / 'clips', rir_dir=self.root / 'rirs')
        return job, generate_dataset(job, count, workers=workers, progress=False)

    def test_pairs_round_trip(self):
        _, manifest = self.build('round_trip')
        pair_dirs = list_pairs(self.root / 'round_trip')
        self.assertEqual(len(pair_dirs), 6)
        for entry, pair_dir in zip(manifest['pairs'], pair_dirs):
            pair = load_pair(pair_dir, tolerance=0.0)
            with self.subTest(pair=entry['pair_id']):
                self.assertEqual(pair.meta['pair_id'], entry['pair_id'])
                self.assertEqual(pair.mixture.num_samples, 4096)
                self.assertEqual(close_secondary_from_meta(pair.meta), entry['close_secondary'])
        stats = manifest['stats']
        self.assertEqual(stats['close_secondary_count'], sum(e['close_secondary'] for e in manifest['pairs']))
        self.assertEqual(load_json(self.root / 'round_trip' / 'manifest.json'), manifest)

    def test_regeneration_is_byte_identical(self):
        self.build('first')
        self.build('second', workers=2)
        first, second = self.root / 'first', self.root / 'second'
        files = sorted(p.relative_to(first) for p in first.rglob('*') if p.is_file())
        self.assertEqual(files, sorted(p.relative_to(second) for p in second.rglob('*') if p.is_file()))
        for name in files:
            with self.subTest(file=str(name)):
                self.assertEqual((first / name).read_bytes(), (second / name).read_bytes())

    def test_different_seed_differs(self):
        self.build('seed_a', seed=1, count=2)
        self.build('seed_b', seed=2, count=2)
        self.assertNotEqual(
            (self.root / 'seed_a/pairs/pair_000000/mixture.wav').read_bytes(),
            (self.root / 'seed_b/pairs/pair_000000/mixture.wav').read_bytes(),
        )

    def test_tampered_pair_is_refused(self):
        self.build('tampered', count=1)
        pair_dir = self.root / 'tampered/pairs/pair_000000'
        pair = load_pair(pair_dir)
        write_foa_wav(pair_dir / 'mixture.wav', pair.mixture.scaled(0.5))
        with self.assertRaises(DataIntegrityError):
            load_pair(pair_dir)

    def test_job_needs_a_pool(self):
        with self.assertRaises(ConfigurationError):
            dataset_job(self.root / 'none', 0, mixer_config())

    def test_segment_dataset(self):
        segments = self.root / 'segments'
        entries = []
        for k, (description, az, el) in enumerate((('speech', 0, 0), ('piano', 90, 30), ('rain', 200, -20))):
            write_foa_wav(segments / f'seg_{k}.wav', plane_wave(degrees(az, el), 0.05 * noise(k, 6000)))
            entries.append({'segment_id': f'seg_{k}', 'file': f'seg_{k}.wav', 'description': description,
                            'azimuth_deg': az, 'elevation_deg': el})
        dump_json(segments / 'segments.json', {'schema_version': 1, 'kind': 'foa_segments', 'sample_rate': FS,
                                               'segments': entries})
        job = dataset_job(self.root / 'remix', 3, mixer_config(), segments_dir=segments)
        manifest = generate_dataset(job, 3, workers=1, progress=False)
        self.assertEqual(manifest['count'], 3)
        for pair_dir in list_pairs(self.root / 'remix'):
            self.assertEqual(load_pair(pair_dir, tolerance=0.0).meta['kind'], 'segment_remix')

    def test_write_pair_keeps_identity_on_disk(self):
        pair = build_pair(np.random.default_rng(3), clip_pool(), anechoic_bank(4), mixer_config())
        out = temp_dir(self) / 'pair'
        write_pair(pair, out)
        self.assertEqual(load_pair(out, tolerance=0.0).identity_error(), 0.0)


@unittest.skipUnless(SLOW_TESTS, 'set SOUNDFIELD_SLOW_TESTS=1 for acceptance-scale checks')
class DatasetContractSlowTests(SimpleTestCase):
    def test_thousand_pairs(self):
        root = temp_dir(self)
        source = root / 'raw'
        csv = write_source_clips(source)
        import_clips(source, root / 'clips', descriptions_csv=csv, sample_rate=FS)
        generate_rir_bank(root / 'rirs', count=200, seed=2, cfg=small_simulation(max_order=6, engine='fast', jitter=0.05),
                          n_sources=4, progress=False)
        job = dataset_job(root / 'pairs', 99, mixer_config(near_prob=0.5), clips_dir=root / 'clips', rir_dir=root / 'rirs')
        manifest = generate_dataset(job, 1000, progress=False)
        for pair_dir in list_pairs(root / 'pairs'):
            self.assertEqual(load_pair(pair_dir, tolerance=0.0).identity_error(), 0.0)
        # 1000 pairs: three binomial sigmas around the large-sample fraction
        self.assertAlmostEqual(manifest['stats']['close_secondary_fraction'], 0.467, delta=0.047)

        again = dataset_job(root / 'again', 99, mixer_config(near_prob=0.5), clips_dir=root / 'clips', rir_dir=root / 'rirs')
        generate_dataset(again, 1000, workers=1, progress=False)
        for name in ('pair_000000', 'pair_000500', 'pair_000999'):
            for file in ('mixture.wav', 'target.wav', 'residual.wav', 'meta.json'):
                self.assertEqual((root / 'pairs/pairs' / name / file).read_bytes(),
                                 (root / 'again/pairs' / name / file).read_bytes())

    def test_close_fraction_at_scale(self):
        self.assertTrue(0.45 <= close_fraction(mixer_config(near_prob=0.5), 3000) <= 0.55)
        self.assertLessEqual(close_fraction(mixer_config(near_prob=0.0), 1000), 0.07)
