from django.contrib import admin

from .models import SavedNetwork


@admin.register(SavedNetwork)
class SavedNetworkAdmin(admin.ModelAdmin):
    list_display = ("name", "dimension", "digest", "created_at")
    search_fields = ("name", "digest")
