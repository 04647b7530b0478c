from django.apps import AppConfig


class PlumbingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'plumbing'
    verbose_name = 'Plumbing Graphs'
