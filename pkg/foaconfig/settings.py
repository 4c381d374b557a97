"""
Django settings for the foaconfig project.

The project hosts the `soundfield` app: first-order ambisonics encoding, image-source
room simulation, mixture dataset generation, target extraction baselines and their
evaluation. There is no web surface; everything runs through management commands.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
import dj_database_url
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('SECRET_KEY', 'django-insecure-foa-toolkit-local-only-key')


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    # Local apps
    'soundfield',
]

MIDDLEWARE = []


# Database
# Run provenance only; generated artifacts never depend on it.

DATABASES = {
    'default': dj_database_url.config(
        default=os.environ.get('DATABASE_URL', f"sqlite:///{BASE_DIR / 'db.sqlite3'}"),
        conn_max_age=600,
    )
}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Default primary key field type
DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# --- Logging ---
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'default': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'default',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'soundfield': {
            'handlers': ['console'],
            'level': os.environ.get('SOUNDFIELD_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# --- Sound field toolkit defaults ---
# Every key can be overridden with an environment variable SOUNDFIELD_<KEY>.
def _env_float(name, default):
    return float(os.environ.get(f'SOUNDFIELD_{name}', default))


def _env_int(name, default):
    return int(os.environ.get(f'SOUNDFIELD_{name}', default))


SOUNDFIELD = {
    'SAMPLE_RATE': _env_int('SAMPLE_RATE', 16000),
    'SEGMENT_SAMPLES': _env_int('SEGMENT_SAMPLES', 65536),
    'SPEED_OF_SOUND': _env_float('SPEED_OF_SOUND', 343.0),
    # Image-source simulation
    'MAX_ORDER': _env_int('MAX_ORDER', 40),
    'MAX_RIR_SECONDS': _env_float('MAX_RIR_SECONDS', 1.5),
    'JITTER_M': _env_float('JITTER_M', 0.05),
    'MIN_DISTANCE_M': _env_float('MIN_DISTANCE_M', 0.1),
    'MATERIAL_TAPS': _env_int('MATERIAL_TAPS', 33),
    'SIM_ENGINE': os.environ.get('SOUNDFIELD_SIM_ENGINE', 'fast'),
    'SOURCES_PER_SCENE': _env_int('SOURCES_PER_SCENE', 4),
    # Mixing
    'GAIN_DB_RANGE': (
        _env_float('GAIN_DB_MIN', -10.0),
        _env_float('GAIN_DB_MAX', 10.0),
    ),
    'SILENCE_PROB': _env_float('SILENCE_PROB', 0.2),
    'NEAR_PROB': _env_float('NEAR_PROB', 0.5),
    'NEAR_BOX_DEG': _env_float('NEAR_BOX_DEG', 15.0),
    'CLOSE_CAP_DEG': _env_float('CLOSE_CAP_DEG', 15.0),
    'CLIP_RMS_DBFS': _env_float('CLIP_RMS_DBFS', -25.0),
    'CROSSFADE_MS': _env_float('CROSSFADE_MS', 10.0),
    # Extraction baselines
    'CAP_SPREAD_DEG': _env_float('CAP_SPREAD_DEG', 60.0),
    'LOUDNESS_OUT_GAIN': _env_float('LOUDNESS_OUT_GAIN', 0.0),
    'GRID_SIZE': _env_int('GRID_SIZE', 36),
    # Metrics
    'STFT_FFT': _env_int('STFT_FFT', 1024),
    'STFT_HOP': _env_int('STFT_HOP', 256),
    'SDR_CLAMP_DB': _env_float('SDR_CLAMP_DB', 100.0),
    'SCHEMA_VERSION': 1,
    'MATERIALS_FILE': os.environ.get('SOUNDFIELD_MATERIALS_FILE', str(BASE_DIR / 'data' / 'materials.json')),
}


# --- Celery Configuration ---
# Only used by `--celery` batch mode. Redis is the broker and result backend.
CELERY_BROKER_URL = os.environ.get('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.environ.get('CELERY_BROKER_URL', 'redis://localhost:6379/0')

# Run tasks in-process (no broker) when set, handy for local runs
CELERY_TASK_ALWAYS_EAGER = os.environ.get('CELERY_TASK_ALWAYS_EAGER', 'False') == 'True'

# Use JSON for serialization
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'

CELERY_TASK_TRACK_STARTED = True

# A single RIR scene or mixture pair never takes this long
CELERY_TASK_TIME_LIMIT = 600 # seconds
# --- End Celery Configuration ---
