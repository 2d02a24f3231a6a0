from django.apps import AppConfig


class SatoCertifyConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'satoCertify'
    verbose_name = "Series certification"
