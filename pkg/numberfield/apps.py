from django.apps import AppConfig


class NumberfieldConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'numberfield'
    verbose_name = 'Cuerpos de números'
