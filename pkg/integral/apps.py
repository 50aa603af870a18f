from django.apps import AppConfig


class IntegralConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'integral'
    verbose_name = 'Cohomología entera de las secciones de cúspide'
