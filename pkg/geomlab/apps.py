from django.apps import AppConfig


class GeomlabConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'geomlab'
    verbose_name = 'Model Chart Numerical Oracle'
