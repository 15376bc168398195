"""
URL configuration for the coverage_toolkit project.

Only the Django admin is served; it lists recorded runs and their
cross-validation scores.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
