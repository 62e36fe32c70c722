from django.apps import AppConfig


class ApproxConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'approx'
    verbose_name = "Stable approximation toolkit"

    def ready(self):
        import approx.signals  # noqa: F401
