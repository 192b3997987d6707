from django.apps import AppConfig


class BearingsConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "bearings"
