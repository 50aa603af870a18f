"""
Barrido de comprobaciones sobre una malla de pesos para una signatura.
"""
import itertools
import logging

from core.error_handling import ComputationError, DimensionOverflow, NotFredholm
from core.parallel import parallel_map

from .boundary import (
    binomial_pairing,
    binomial_weighted_sum,
    boundary_cohomology,
    fredholm_and_l2b_kernel,
    is_supported,
    ker_eth_S,
)
from .complex import build_dC, hodge_kernel_dC, weight_commutes
from .weights import Weight

logger = logging.getLogger(__name__)

CHECKS = ('kernel_dC', 'weight_commutes', 'kernel_S', 'fredholm_gate', 'l2b_kernel', 'duality', 'binomial')
PASS, FAIL, SKIPPED = 'pass', 'fail', 'skipped'


def weight_grid(signature, max_weight):
    r1, r2 = signature
    entries = range(max_weight + 1)
    for values in itertools.product(entries, repeat=r1 + 2 * r2):
        m = values[:r1]
        n = values[r1:r1 + r2]
        nbar = values[r1 + r2:]
        yield Weight(tuple(m), tuple(n), tuple(nbar))


def _outcome(check, ok, detail=None):
    return (check, PASS if ok else FAIL, detail)


def verify_cell(cell):
    """Comprobaciones de un peso; devuelve [(comprobación, resultado, detalle)]."""
    signature, weight = cell
    r1, r2 = signature
    outcomes = []
    try:
        complex_ = build_dC(signature, weight)
    except DimensionOverflow as e:
        return [('kernel_dC', SKIPPED, str(e)), ('weight_commutes', SKIPPED, str(e))]
    else:
        try:
            kernel = hodge_kernel_dC(complex_)
            outcomes.append(_outcome('kernel_dC', len(kernel) == 2 ** r1 * 4 ** r2, str(weight)))
        except ComputationError as e:
            outcomes.append(('kernel_dC', FAIL, f"{weight}: {e}"))
        outcomes.append(_outcome('weight_commutes', weight_commutes(complex_), str(weight)))

    if not is_supported(signature, weight):
        return outcomes + [(name, SKIPPED, None) for name in ('kernel_S', 'fredholm_gate', 'l2b_kernel', 'duality')]

    try:
        record = ker_eth_S(signature, weight)
        outcomes.append(_outcome('kernel_S', True))
    except ComputationError as e:
        return outcomes + [('kernel_S', FAIL, f"{weight}: {e}")]

    expects_not_fredholm = r1 == 0 and not any(weight.n)
    try:
        kernel = fredholm_and_l2b_kernel(signature, weight)
    except NotFredholm:
        outcomes.append(_outcome('fredholm_gate', expects_not_fredholm, str(weight)))
        outcomes.append(('l2b_kernel', SKIPPED, None))
    except ComputationError as e:
        outcomes.append(('fredholm_gate', PASS, None))
        outcomes.append(('l2b_kernel', FAIL, f"{weight}: {e}"))
    else:
        outcomes.append(_outcome('fredholm_gate', not expects_not_fredholm, str(weight)))
        outcomes.append(_outcome('l2b_kernel', kernel.dimension == record.total_dimension, str(weight)))

    try:
        boundary_cohomology(signature, weight)
        outcomes.append(_outcome('duality', True))
    except ComputationError as e:
        outcomes.append(('duality', FAIL, f"{weight}: {e}"))
    return outcomes


def verify_binomial(signature, max_p=12, max_k=8):
    r1, r2 = signature
    d_K = r1 + 2 * r2
    failures = [
        f"p={p}, k={k}" for k in range(2, max_k + 1) for p in range(max_p + 1)
        if binomial_weighted_sum(p, k) != 0
    ]
    failures += [
        f"p={p}, k=1" for p in range(max_p + 1) if binomial_weighted_sum(p, 1) != (-1) ** (p + 1)
    ]
    if d_K % 2 == 0:
        failures += [f"par p={p}" for p in range(d_K + 2) if binomial_pairing(p, d_K) != 0]
    return failures


def verify_grid(r1, r2, max_weight, threads=None):
    """
    Recorre todos los pesos con entradas ≤ max_weight y cuenta, por
    comprobación, los casos correctos, fallidos y omitidos.
    """
    if r1 < 0 or r2 < 0 or r1 + r2 == 0:
        raise ValueError("La signatura debe tener al menos un lugar")
    if max_weight < 0:
        raise ValueError("max_weight debe ser no negativo")
    signature = (r1, r2)
    cells = [(signature, weight) for weight in weight_grid(signature, max_weight)]
    logger.info(f"Verificando {len(cells)} pesos para la signatura {signature}")
    counters = {name: {PASS: 0, FAIL: 0, SKIPPED: 0} for name in CHECKS}
    mismatches = []
    for outcomes in parallel_map(verify_cell, cells, threads):
        for check, result, detail in outcomes:
            counters[check][result] += 1
            if result == FAIL:
                mismatches.append({'check': check, 'detail': detail})
                logger.error(f"Comprobación {check} fallida: {detail}")
    binomial_failures = verify_binomial(signature)
    counters['binomial'][PASS if not binomial_failures else FAIL] += 1
    mismatches.extend({'check': 'binomial', 'detail': d} for d in binomial_failures)
    return {
        'signature': list(signature),
        'max_weight': max_weight,
        'weights': len(cells),
        'counters': counters,
        'mismatches': mismatches,
        'passed': not mismatches,
    }
