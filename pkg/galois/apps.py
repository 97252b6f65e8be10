from django.apps import AppConfig


class GaloisConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'galois'
    verbose_name = 'Adelic Galois images of CM elliptic curves'

    def ready(self):
        # Registers the CM_ADELIC_* defaults with django.conf.settings.
        from . import conf  # noqa: F401
