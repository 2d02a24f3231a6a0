"""
URL configuration for core project.

Only the admin is exposed; it lists recorded certification runs.
"""
from django.contrib import admin
from django.urls import path


urlpatterns = [
    path('admin/', admin.site.urls),
]
