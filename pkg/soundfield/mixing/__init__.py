from .clips import ClipPool, ClipRecord, fit_clip_length, import_clips
from .dataset import close_secondary_from_meta, generate_dataset, load_pair, write_pair
from .scene import (
    MixerConfig,
    MixturePair,
    PairSpec,
    SourceSpec,
    build_pair,
    draw_pair_spec,
    mix_scene,
    place_near_target,
    render_pair,
    render_source,
)
from .segments import FoaSegmentPool, build_remix_pair, rotate_remix

__all__ = [
    'ClipPool',
    'ClipRecord',
    'FoaSegmentPool',
    'MixerConfig',
    'MixturePair',
    'PairSpec',
    'SourceSpec',
    'build_pair',
    'build_remix_pair',
    'close_secondary_from_meta',
    'draw_pair_spec',
    'fit_clip_length',
    'generate_dataset',
    'import_clips',
    'load_pair',
    'mix_scene',
    'place_near_target',
    'render_pair',
    'render_source',
    'rotate_remix',
    'write_pair',
]
