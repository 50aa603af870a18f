"""
Django settings for the cusptor project.

Solo se usan comandos de gestión y el ORM para el archivo de informes;
no hay superficie web.
"""

from pathlib import Path

from decouple import config

# Cargar variables de entorno (opcional)
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # dotenv no está instalado, continuar sin él
    pass

BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='cusptor-local-only-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []


INSTALLED_APPS = [
    # Aplicaciones del proyecto
    'core',
    'numberfield',
    'congruence',
    'kostant',
    'integral',
    'growth',
]

MIDDLEWARE = []


# Base de datos: solo guarda el archivo de informes
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / config('DATABASE_NAME', default='cusptor.sqlite3'),
    }
}


LANGUAGE_CODE = 'es-es'

TIME_ZONE = 'Europe/Madrid'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Parámetros de cálculo
CUSPTOR_THREADS = config('CUSPTOR_THREADS', default=1, cast=int)
CUSPTOR_ENUMERATION_BOUND = config('CUSPTOR_ENUMERATION_BOUND', default=10_000, cast=int)
CUSPTOR_FLOAT_PRECISION = config('CUSPTOR_FLOAT_PRECISION', default=64, cast=int)
CUSPTOR_COMPLEX_DIMENSION_CAP = config('CUSPTOR_COMPLEX_DIMENSION_CAP', default=1_000_000, cast=int)
CUSPTOR_LATTICE_RANK_CAP = config('CUSPTOR_LATTICE_RANK_CAP', default=512, cast=int)
CUSPTOR_AXIOM_SAMPLE = config('CUSPTOR_AXIOM_SAMPLE', default=4096, cast=int)

# Documentos de ejemplo (cuerpos, niveles, representaciones)
CUSPTOR_DATA_DIR = BASE_DIR / "data"


LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': 'DEBUG',
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': config('CUSPTOR_LOG_LEVEL', default='INFO'),
    },
}
