"""
Utilidades para las pruebas: carga de los cuerpos de ejemplo en data/fields.
"""
from functools import lru_cache

from django.conf import settings

from core.serialization import load_json_document

from .fields import load_field


def field_path(name):
    return str(settings.CUSPTOR_DATA_DIR / 'fields' / f'{name}.json')


def field_document(name):
    return load_json_document(field_path(name))


@lru_cache(maxsize=None)
def example_field(name):
    return load_field(field_document(name))
