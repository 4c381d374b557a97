"""
JSON manifests and sidecars.

Files are written with sorted keys and no timestamps, so regenerating an artifact with
the same seed and configuration reproduces it byte for byte.
"""

import json
from pathlib import Path

from ..conf import get_setting
from ..exceptions import DataIntegrityError


def dump_json(path, data):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')


def load_json(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise DataIntegrityError(f"{path} is not valid JSON: {e}") from e


def load_manifest(path, kind):
    """Load a manifest, checking its kind and schema version."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"No manifest at {path}")
    manifest = load_json(path)
    if manifest.get('kind') != kind:
        raise DataIntegrityError(f"{path} is not a {kind} manifest")
    if manifest.get('schema_version') != get_setting('SCHEMA_VERSION'):
        raise DataIntegrityError(f"{path}: unsupported schema_version {manifest.get('schema_version')}")
    return manifest
