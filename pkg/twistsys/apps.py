from django.apps import AppConfig


class TwistsysConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'twistsys'
    verbose_name = 'Twist Words and Branched Tracks'
