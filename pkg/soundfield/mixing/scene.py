"""
Mixture pairs: one target and several secondary sources rendered through the RIRs of
one simulated room.

Building a pair happens in two stages. `draw_pair_spec` makes every random decision
(clips, crops, gains, silencing, near-target placement) and returns plain metadata;
`render_pair` turns that metadata into signals without touching the random stream.

Target and residual are rounded onto a 2**-24 grid below full scale before they are
summed, so mixture = target + residual holds exactly in float64 and in float32 on disk.
"""

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import signal

from ..ambisonics.directions import Direction, great_circle_distance
from ..ambisonics.encoding import FoaSignal
from ..ambisonics.rotation import FoaRotation, apply_rotation, rotation_between
from ..conf import get_setting
from ..exceptions import ConfigurationError, DegenerateInputError, PoolExhaustedError, SignalFormatError
from .clips import crossfade_samples, draw_offset, fit_clip_length, same_description

logger = logging.getLogger(__name__)

PAIR_STREAM = 2
QUANTUM = 2.0 ** -24
# Peak ceiling below which every multiple of QUANTUM is a float32 value
HEADROOM_PEAK = 0.99


@dataclass(frozen=True)
class MixerConfig:
    sample_rate: int = 16000
    num_samples: int = 65536
    gain_db_range: tuple = (-10.0, 10.0)
    silence_prob: float = 0.2
    near_prob: float = 0.5
    near_box_deg: float = 15.0
    close_cap_deg: float = 15.0
    crossfade_ms: float = 10.0
    exclude_target: tuple = ()

    def __post_init__(self):
        low, high = (float(g) for g in self.gain_db_range)
        if low > high:
            raise ConfigurationError(f"Gain range {self.gain_db_range} is empty")
        object.__setattr__(self, 'gain_db_range', (low, high))
        object.__setattr__(self, 'exclude_target', tuple(self.exclude_target))
        for name in ('silence_prob', 'near_prob'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigurationError(f"{name} must lie in [0, 1], got {value}")
        if self.num_samples <= 0 or self.sample_rate <= 0:
            raise ConfigurationError("Sample rate and segment length must be positive")
        if not 0.0 <= self.near_box_deg <= 180.0:
            raise ConfigurationError(f"near_box_deg must lie in [0, 180], got {self.near_box_deg}")

    @classmethod
    def from_settings(cls, **overrides):
        values = {
            'sample_rate': get_setting('SAMPLE_RATE'),
            'num_samples': get_setting('SEGMENT_SAMPLES'),
            'gain_db_range': tuple(get_setting('GAIN_DB_RANGE')),
            'silence_prob': get_setting('SILENCE_PROB'),
            'near_prob': get_setting('NEAR_PROB'),
            'near_box_deg': get_setting('NEAR_BOX_DEG'),
            'close_cap_deg': get_setting('CLOSE_CAP_DEG'),
            'crossfade_ms': get_setting('CROSSFADE_MS'),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def to_dict(self):
        data = asdict(self)
        data['gain_db_range'] = list(self.gain_db_range)
        data['exclude_target'] = list(self.exclude_target)
        return data

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['gain_db_range'] = tuple(data['gain_db_range'])
        data['exclude_target'] = tuple(data.get('exclude_target', ()))
        return cls(**data)


@dataclass(frozen=True)
class SourceSpec:
    clip_ref: str
    gain_db: float
    geometry: int
    description: str
    is_target: bool
    silenced: bool
    direction: Direction
    offset: int = 0
    near: bool = False
    rotation: tuple = None

    def to_dict(self):
        return {
            'clip_id': self.clip_ref,
            'gain_db': self.gain_db,
            'source_index': self.geometry,
            'description': self.description,
            'is_target': self.is_target,
            'silenced': self.silenced,
            'direction': self.direction.to_dict(),
            'offset': self.offset,
            'near': self.near,
            'rotation': [list(row) for row in self.rotation] if self.rotation is not None else None,
        }


@dataclass(frozen=True, eq=False)
class PairSpec:
    sources: tuple
    scene_id: str
    scene: dict = field(default_factory=dict)
    near_placed: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'sources', tuple(self.sources))
        targets = [s for s in self.sources if s.is_target]
        if len(targets) != 1:
            raise ConfigurationError(f"A pair needs exactly one target, got {len(targets)}")
        if targets[0].silenced:
            raise ConfigurationError("The target source cannot be silenced")

    @property
    def target(self):
        return next(s for s in self.sources if s.is_target)

    @property
    def secondaries(self):
        return [s for s in self.sources if not s.is_target]


@dataclass(frozen=True, eq=False)
class MixturePair:
    mixture: FoaSignal
    target: FoaSignal
    residual: FoaSignal
    meta: dict = field(default_factory=dict)

    def identity_error(self):
        """Largest |mixture - (target + residual)| over all samples."""
        return float(np.max(np.abs(self.mixture.samples - self.target.samples - self.residual.samples), initial=0.0))

    @property
    def target_direction(self):
        return Direction.from_dict(self.meta['target']['direction'])


def place_near_target(target_dir, rng, box_deg=15.0):
    """Uniform draw from the +/- box_deg azimuth/elevation box around `target_dir`."""
    box = np.radians(box_deg)
    d_az, d_el = rng.uniform(-box, box, size=2)
    elevation = float(np.clip(target_dir.elevation + d_el, -np.pi / 2.0, np.pi / 2.0))
    return Direction(target_dir.azimuth + d_az, elevation)


def render_source(mono, rir, gain_db, clip_rate, num_samples=None):
    """Convolve a mono clip with a 4-channel RIR, fit to `num_samples` and apply the gain."""
    if int(clip_rate) != rir.sample_rate:
        raise SignalFormatError(f"Clip is {clip_rate} Hz but the RIR is {rir.sample_rate} Hz")
    mono = np.asarray(mono, dtype=float).reshape(-1)
    if not np.all(np.isfinite(mono)):
        raise DegenerateInputError("Clip contains NaN or Inf samples")
    num_samples = int(num_samples or mono.size)
    wet = signal.fftconvolve(mono[None, :], rir.samples, axes=1)[:, :num_samples]
    if wet.shape[1] < num_samples:
        wet = np.pad(wet, ((0, 0), (0, num_samples - wet.shape[1])))
    return FoaSignal(wet * 10.0 ** (gain_db / 20.0), rir.sample_rate)


def quantize(samples):
    return np.round(np.asarray(samples) / QUANTUM) * QUANTUM


def mix_scene(sources, renders, sample_rate):
    """Sum rendered sources into a MixturePair.

    `renders[i]` belongs to `sources[i]`; silenced secondaries are left out. The pair
    is scaled down as a whole when its peak would exceed HEADROOM_PEAK.
    """
    target = None
    residual = np.zeros_like(renders[0].samples)
    for spec, render in zip(sources, renders):
        if spec.is_target:
            target = render.samples
        elif not spec.silenced:
            residual = residual + render.samples
    if target is None:
        raise ConfigurationError("No target among the sources")
    if not np.any(target):
        raise DegenerateInputError("Target render has zero energy")

    peak = max(np.max(np.abs(target)), np.max(np.abs(residual)), np.max(np.abs(target + residual)))
    scale = HEADROOM_PEAK / peak if peak > HEADROOM_PEAK else 1.0
    target_q = quantize(target * scale)
    residual_q = quantize(residual * scale)
    pair = MixturePair(
        mixture=FoaSignal(target_q + residual_q, sample_rate),
        target=FoaSignal(target_q, sample_rate),
        residual=FoaSignal(residual_q, sample_rate),
        meta={'peak_scale': scale},
    )
    return pair


def _eligible_targets(pool, cfg):
    excluded = [e.strip().casefold() for e in cfg.exclude_target if e.strip()]
    return [r for r in pool.records if not any(e in r.description.casefold() for e in excluded)]


def draw_pair_spec(rng, pool, scene, cfg):
    """All random decisions for one pair, as metadata."""
    sources = scene.geometry.sources
    n_sources = len(sources)
    if len(pool) < n_sources:
        raise PoolExhaustedError(f"Pool has {len(pool)} clips, a scene needs {n_sources}")

    targets = _eligible_targets(pool, cfg)
    if not targets:
        raise PoolExhaustedError("Every clip is excluded as a target")
    target_record = targets[int(rng.integers(0, len(targets)))]
    others = [r for r in pool.records if r.clip_id != target_record.clip_id]
    picks = rng.choice(len(others), size=n_sources - 1, replace=False) if n_sources > 1 else []
    records = [target_record] + [others[i] for i in picks]

    near_slot = None
    near_dir = None
    target_dir = sources[scene.geometry.target_index].direction
    if n_sources > 1 and rng.random() < cfg.near_prob:
        differing = [k for k in range(1, n_sources) if not same_description(records[k].description, target_record.description)]
        if differing:
            near_slot = differing[int(rng.integers(0, len(differing)))]
        else:
            used = {r.clip_id for r in records}
            spare = [r for r in others if r.clip_id not in used
                     and not same_description(r.description, target_record.description)]
            if not spare:
                raise PoolExhaustedError(
                    f"No clip with a description other than '{target_record.description}' for near placement"
                )
            near_slot = 1
            records[1] = spare[int(rng.integers(0, len(spare)))]
        near_dir = place_near_target(target_dir, rng, cfg.near_box_deg)

    low, high = cfg.gain_db_range
    gains = rng.uniform(low, high, size=n_sources)
    silenced = rng.random(n_sources) < cfg.silence_prob
    offsets = [draw_offset(rng, r.num_samples, cfg.num_samples) for r in records]

    # The target source is index target_index of the scene; secondaries fill the rest in order
    geometry_order = [scene.geometry.target_index] + [k for k in range(n_sources) if k != scene.geometry.target_index]
    specs = []
    for slot, (record, source_index) in enumerate(zip(records, geometry_order)):
        is_target = slot == 0
        direction = sources[source_index].direction
        rotation = None
        if slot == near_slot:
            rotation = tuple(tuple(float(v) for v in row) for row in rotation_between(direction, near_dir).matrix)
            direction = near_dir
        specs.append(SourceSpec(
            clip_ref=record.clip_id,
            gain_db=float(gains[slot]),
            geometry=source_index,
            description=record.description,
            is_target=is_target,
            silenced=bool(silenced[slot]) and not is_target and slot != near_slot,
            direction=direction,
            offset=offsets[slot],
            near=slot == near_slot,
            rotation=rotation,
        ))
    return PairSpec(specs, scene.scene_id, scene.geometry.to_dict(), near_placed=near_slot is not None)


def close_secondary(target_dir, secondaries, cap_deg):
    """True when an active secondary lies within `cap_deg` great-circle degrees of the target."""
    cap = np.radians(cap_deg)
    return any(
        not s['silenced'] and great_circle_distance(target_dir, Direction.from_dict(s['direction'])) <= cap
        for s in secondaries
    )


def pair_meta(spec, scene, cfg, peak_scale):
    target = spec.target.to_dict()
    target['rir'] = scene.rir_ref(spec.target.geometry)
    secondaries = []
    for s in spec.secondaries:
        entry = s.to_dict()
        entry['rir'] = scene.rir_ref(s.geometry)
        secondaries.append(entry)
    return {
        'kind': 'rir_mixture',
        'sample_rate': cfg.sample_rate,
        'num_samples': cfg.num_samples,
        'target': target,
        'secondaries': secondaries,
        'scene_id': spec.scene_id,
        'scene': spec.scene,
        'near_placed': spec.near_placed,
        'peak_scale': peak_scale,
        'close_secondary': close_secondary(spec.target.direction, secondaries, cfg.close_cap_deg),
    }


def render_pair(spec, scene, pool, cfg):
    fade = crossfade_samples(cfg.sample_rate, cfg.crossfade_ms)
    renders = []
    for s in spec.sources:
        rir = scene.rirs[s.geometry]
        if s.rotation is not None:
            rir = apply_rotation(rir, FoaRotation(np.array(s.rotation)))
        mono = fit_clip_length(pool.audio(s.clip_ref), cfg.num_samples, crossfade=fade, offset=s.offset)
        renders.append(render_source(mono, rir, s.gain_db, pool.sample_rate, cfg.num_samples))
    pair = mix_scene(spec.sources, renders, cfg.sample_rate)
    meta = pair_meta(spec, scene, cfg, pair.meta['peak_scale'])
    return MixturePair(pair.mixture, pair.target, pair.residual, meta)


def build_pair(rng, clip_pool, scene_provider, cfg):
    """Draw a scene from `scene_provider`, then draw and render one pair in it."""
    scene = scene_provider.draw(rng)
    spec = draw_pair_spec(rng, clip_pool, scene, cfg)
    return render_pair(spec, scene, clip_pool, cfg)
