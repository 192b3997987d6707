from django.apps import AppConfig


class LocalizabilityConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "localizability"
