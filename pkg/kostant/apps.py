from django.apps import AppConfig


class KostantConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'kostant'
    verbose_name = 'Complejo de Kostant y borde'
