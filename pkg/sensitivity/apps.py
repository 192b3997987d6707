from django.apps import AppConfig


class SensitivityConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "sensitivity"
