"""
Scenes of simulated RIRs, on disk and in memory.

Bank layout::

    <root>/manifest.json
    <root>/scenes/scene_<index>/scene.json
    <root>/scenes/scene_<index>/src_<k>.wav    (4-channel float32, one per source)

A scene's RIRs all come from one room so a mixture can draw every source from it.
A bank of `count` RIRs holds ceil(count / sources_per_scene) scenes; the last one keeps
only the sources needed to reach `count`.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..conf import get_setting
from ..exceptions import ConfigurationError, DataIntegrityError
from ..utils.audio_io import read_foa_wav, write_foa_wav
from ..utils.manifests import dump_json, load_json, load_manifest
from ..utils.parallel import celery_map, ordered_map
from ..utils.seeding import item_rng
from .geometry import SceneGeometry, sample_scene_geometry
from .simulator import AmbisonicRir, SimulationConfig, simulate_rir

logger = logging.getLogger(__name__)

SCENE_STREAM = 1
MANIFEST_NAME = 'manifest.json'
SCENE_FILE = 'scene.json'


def scene_name(index):
    return f'scene_{int(index):06d}'


@dataclass(frozen=True, eq=False)
class SceneRirs:
    scene_id: str
    geometry: SceneGeometry
    rirs: tuple
    seed: int = None
    index: int = None
    simulation: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'rirs', tuple(self.rirs))
        if len(self.rirs) != len(self.geometry.sources):
            raise DataIntegrityError(
                f"Scene {self.scene_id}: {len(self.rirs)} RIRs for {len(self.geometry.sources)} sources"
            )

    @property
    def sample_rate(self):
        return self.rirs[0].sample_rate

    def rir_ref(self, k):
        return f'{self.scene_id}/src_{k}.wav'

    def to_dict(self):
        return {
            'scene_id': self.scene_id,
            'seed': self.seed,
            'index': self.index,
            'geometry': self.geometry.to_dict(),
            'simulation': self.simulation,
            'rirs': [
                {
                    'file': f'src_{k}.wav',
                    'num_samples': rir.num_samples,
                    'max_delay_samples': rir.max_delay_samples,
                    'path_count': rir.path_count,
                }
                for k, rir in enumerate(self.rirs)
            ],
        }


def simulate_scene(seed, index, cfg, n_sources, materials=None, keep=None):
    """Sample and simulate scene `index` of the batch seeded with `seed`.

    With `keep`, only the first `keep` sources are simulated. Their RIRs match those of
    the full scene.
    """
    rng = item_rng(seed, index, stream=SCENE_STREAM)
    geometry = sample_scene_geometry(rng, n_sources, materials)
    if keep is not None and keep < n_sources:
        if keep < 1:
            raise ConfigurationError(f"A scene keeps at least one source, got {keep}")
        geometry = replace(geometry, sources=geometry.sources[:keep])
    rirs = tuple(
        simulate_rir(geometry.room, source.position, geometry.receiver, cfg, rng=rng)
        for source in geometry.sources
    )
    return SceneRirs(scene_name(index), geometry, rirs, seed=seed, index=index, simulation=cfg.to_dict())


def write_scene(scene, root):
    scene_dir = Path(root) / 'scenes' / scene.scene_id
    for k, rir in enumerate(scene.rirs):
        write_foa_wav(scene_dir / f'src_{k}.wav', rir)
    dump_json(scene_dir / SCENE_FILE, scene.to_dict())
    return {
        'scene_id': scene.scene_id,
        'index': scene.index,
        'path': f'scenes/{scene.scene_id}',
        'sources': len(scene.rirs),
        'rir_samples': [rir.num_samples for rir in scene.rirs],
    }


def read_scene(scene_dir):
    scene_dir = Path(scene_dir)
    data = load_json(scene_dir / SCENE_FILE)
    geometry = SceneGeometry.from_dict(data['geometry'])
    rirs = []
    for entry in data['rirs']:
        foa = read_foa_wav(scene_dir / entry['file'])
        if foa.num_samples != entry['num_samples']:
            raise DataIntegrityError(f"{scene_dir / entry['file']}: length differs from {SCENE_FILE}")
        rirs.append(AmbisonicRir(
            foa.samples, foa.sample_rate,
            max_delay_samples=entry['max_delay_samples'],
            path_count=entry['path_count'],
        ))
    return SceneRirs(data['scene_id'], geometry, rirs, data.get('seed'), data.get('index'), data.get('simulation', {}))


def simulate_and_write(job):
    """Simulate one scene job tuple and write it; returns its manifest entry."""
    seed, index, cfg_dict, n_sources, materials, root, keep = job
    try:
        scene = simulate_scene(seed, index, SimulationConfig.from_dict(cfg_dict), n_sources, materials, keep)
        return write_scene(scene, root)
    except Exception:
        logger.error(f"Scene {index} failed", exc_info=True)
        raise


def generate_rir_bank(root, count, seed, cfg, n_sources=None, materials=None,
                      workers=None, use_celery=False, progress=True):
    """Simulate `count` RIRs, grouped in scenes of `n_sources`, into `root` and write the manifest."""
    count = int(count)
    if count < 0:
        raise ConfigurationError(f"count must be >= 0, got {count}")
    n_sources = int(n_sources or get_setting('SOURCES_PER_SCENE'))
    if n_sources < 1:
        raise ConfigurationError(f"sources per scene must be >= 1, got {n_sources}")
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    materials = list(materials) if materials else None
    num_scenes = math.ceil(count / n_sources)
    jobs = [
        (seed, i, cfg.to_dict(), n_sources, materials, str(root), min(n_sources, count - i * n_sources))
        for i in range(num_scenes)
    ]

    if use_celery:
        from ..tasks import simulate_scene_task
        entries = celery_map(simulate_scene_task, jobs)
    else:
        entries = ordered_map(simulate_and_write, jobs, workers=workers, desc='RIR scenes', progress=progress)

    manifest = {
        'schema_version': get_setting('SCHEMA_VERSION'),
        'kind': 'rir_bank',
        'seed': seed,
        'count': count,
        'sources_per_scene': n_sources,
        'materials': materials,
        'simulation': cfg.to_dict(),
        'scene_count': num_scenes,
        'scenes': entries,
        'rirs': [
            {'scene_id': e['scene_id'], 'source': k, 'path': f"{e['path']}/src_{k}.wav", 'num_samples': n}
            for e in entries
            for k, n in enumerate(e['rir_samples'])
        ],
    }
    dump_json(root / MANIFEST_NAME, manifest)
    logger.info(f"Wrote {count} RIRs in {num_scenes} scenes to {root}")
    return manifest


class RirBank:
    """Read-only view over a bank written by `generate_rir_bank`."""

    def __init__(self, root, manifest):
        self.root = Path(root)
        self.manifest = manifest
        self.entries = manifest['scenes']

    @classmethod
    def load(cls, root):
        root = Path(root)
        return cls(root, load_manifest(root / MANIFEST_NAME, 'rir_bank'))

    def __len__(self):
        return len(self.entries)

    @property
    def sources_per_scene(self):
        return int(self.manifest['sources_per_scene'])

    def scene(self, i):
        return read_scene(self.root / self.entries[i]['path'])

    def draw(self, rng):
        if not self.entries:
            raise ConfigurationError(f"RIR bank {self.root} is empty")
        return self.scene(int(rng.integers(0, len(self.entries))))


class InMemorySceneBank:
    def __init__(self, scenes):
        self.scenes = list(scenes)

    def __len__(self):
        return len(self.scenes)

    def scene(self, i):
        return self.scenes[i]

    def draw(self, rng):
        if not self.scenes:
            raise ConfigurationError("Scene bank is empty")
        return self.scenes[int(rng.integers(0, len(self.scenes)))]


class SimulatingSceneProvider:
    """Simulates a fresh scene for every draw, from the caller's stream."""

    def __init__(self, cfg, n_sources=None, materials=None):
        self.cfg = cfg
        self.n_sources = int(n_sources or get_setting('SOURCES_PER_SCENE'))
        self.materials = materials

    def draw(self, rng):
        geometry = sample_scene_geometry(rng, self.n_sources, self.materials)
        rirs = tuple(
            simulate_rir(geometry.room, s.position, geometry.receiver, self.cfg, rng=rng)
            for s in geometry.sources
        )
        return SceneRirs('simulated', geometry, rirs, simulation=self.cfg.to_dict())
