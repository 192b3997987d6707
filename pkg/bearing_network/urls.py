from django.contrib import admin
from django.urls import path
from ninja import NinjaAPI

from localizability.api import router as localizability_router
from networks.api import router as network_router
from protocols.api import router as protocol_router
from rigidity.api import router as rigidity_router
from sensitivity.api import router as sensitivity_router

api = NinjaAPI(title="Bearing network localization")


api.add_router("/networks", network_router)
api.add_router("/rigidity", rigidity_router)
api.add_router("/localizability", localizability_router)
api.add_router("/protocols", protocol_router)
api.add_router("/sensitivity", sensitivity_router)

urlpatterns = [
    path("admin/", admin.site.urls),
    path("api/v1/", api.urls),
]
