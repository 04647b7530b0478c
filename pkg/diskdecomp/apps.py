from django.apps import AppConfig


class DiskdecompConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'diskdecomp'
    verbose_name = 'Singular and Regular Disk Decomposition'
