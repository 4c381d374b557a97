from django.apps import AppConfig


class SoundfieldConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'soundfield'
    verbose_name = 'Ambisonic sound field toolkit'
