from .bank import InMemorySceneBank, RirBank, SceneRirs, SimulatingSceneProvider, generate_rir_bank, simulate_scene
from .geometry import Room, SceneGeometry, SceneSource, sample_scene_geometry
from .image_source import ImagePath, enumerate_image_sources, path_spectrum
from .materials import Material, material_bank
from .simulator import AmbisonicRir, SimulationConfig, simulate_rir

__all__ = [
    'AmbisonicRir',
    'ImagePath',
    'InMemorySceneBank',
    'Material',
    'RirBank',
    'Room',
    'SceneGeometry',
    'SceneRirs',
    'SceneSource',
    'SimulatingSceneProvider',
    'SimulationConfig',
    'enumerate_image_sources',
    'generate_rir_bank',
    'material_bank',
    'path_spectrum',
    'sample_scene_geometry',
    'simulate_rir',
    'simulate_scene',
]
