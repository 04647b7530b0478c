import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "penner.settings")
django.setup()
