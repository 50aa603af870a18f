"""
Reparto de tareas independientes entre procesos.
"""
import logging
from concurrent.futures import ProcessPoolExecutor

import django
from django.conf import settings

logger = logging.getLogger(__name__)


def _init_worker():
    django.setup()


def parallel_map(function, items, threads=None):
    """
    Aplica `function` a cada elemento conservando el orden.

    Con un solo hilo (o una sola tarea) se evalúa en el proceso actual;
    la función debe ser de nivel de módulo para poder serializarse. El
    número de procesos nunca supera CUSPTOR_THREADS.
    """
    items = list(items)
    threads = min(threads or settings.CUSPTOR_THREADS, settings.CUSPTOR_THREADS)
    if threads <= 1 or len(items) <= 1:
        return [function(item) for item in items]
    logger.debug(f"Repartiendo {len(items)} tareas en {threads} procesos")
    with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker) as executor:
        return list(executor.map(function, items))
