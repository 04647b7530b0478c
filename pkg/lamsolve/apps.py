from django.apps import AppConfig


class LamsolveConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'lamsolve'
    verbose_name = 'Lagrangian Disk Potentials'
