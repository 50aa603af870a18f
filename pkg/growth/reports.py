"""
Informes de crecimiento de la torsión: cota inferior predicha a partir de
t^(2) y vol(X_1) ingeridos, y cantidades parciales por nivel.
"""
import logging
import math
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import xlsxwriter
from django.conf import settings
from sympy import Integer, log as sym_log

from congruence.cusps import cusp_count, negligibility_sums
from congruence.levels import index, make_level
from core.error_handling import MalformedDocument, WrongSign
from core.serialization import exact_and_float, exact_str, parse_exact_rational

logger = logging.getLogger(__name__)

ACYCLIC = 'ACYCLIC'
SELF_DUAL_LATTICE = 'SELF_DUAL_LATTICE'
MODES = {'acyclic': ACYCLIC, 'selfdual': SELF_DUAL_LATTICE}

COLUMNS = ('norm', 'index', 'cusps', 'cusp_sum', 'log_sum', 'bound_x_index', 'measured')


def parse_mode(value):
    key = str(value).lower()
    if key in MODES:
        return MODES[key]
    if value in MODES.values():
        return value
    raise MalformedDocument(f"Modo desconocido {value!r}: acyclic o selfdual")


def parse_constant(value, name):
    try:
        return parse_exact_rational(value)
    except ValueError as e:
        raise MalformedDocument(f"{name}: {e}", errors={name: str(e)}) from e


def growth_bound(signature, t2, vol1, mode):
    """
    Constante de la cota inferior del liminf.

    δ = r2 ≠ 1 fuerza la cota 0. Con r2 = 1 se exige (−1)^{r1+1}·t2 > 0.
    """
    r1, r2 = signature
    if vol1 <= 0:
        raise MalformedDocument(f"vol(X_1) debe ser positivo, no {vol1}")
    if r2 != 1:
        logger.info(f"Rango fundamental {r2} ≠ 1: cota 0")
        return Fraction(0), {'fundamental_rank': r2, 'sign_gate': 'skipped'}
    sign = (-1) ** (r1 + 1)
    if sign * t2 <= 0:
        raise WrongSign(f"(−1)^(r1+1)·t2 = {exact_str(sign * Fraction(t2))} no es positivo")
    value = sign * Fraction(t2) * Fraction(vol1)
    if mode == ACYCLIC:
        value *= 2
    return value, {'fundamental_rank': r2, 'sign_gate': 'passed'}


def measured_torsion(table, r1, level_index):
    """Σ_{q + r1 par} log|H^q_tor| / índice."""
    product = 1
    for entry in table.degrees:
        if (entry.degree + r1) % 2 == 0:
            product *= entry.torsion_order
    return sym_log(Integer(product)) / level_index


@dataclass(frozen=True)
class LevelRow:
    norm: int
    index: int
    cusps: int
    cusp_sum: Fraction
    log_sum: object
    bound_x_index: Fraction
    measured: object = None

    def values(self, digits):
        return {
            'norm': self.norm,
            'index': self.index,
            'cusps': self.cusps,
            'cusp_sum': float(self.cusp_sum),
            'log_sum': float(self.log_sum.evalf(digits)),
            'bound_x_index': float(self.bound_x_index),
            'measured': float(self.measured.evalf(digits)) if self.measured is not None else None,
        }

    def to_json(self, precision):
        digits = max(1, int(precision * math.log10(2)))
        data = {
            'norm': self.norm,
            'index': self.index,
            'cusps': self.cusps,
            'cusp_sum': exact_and_float(self.cusp_sum, precision),
            'log_sum': {'exact': str(self.log_sum), 'float': str(self.log_sum.evalf(digits))},
            'bound_x_index': exact_and_float(self.bound_x_index, precision),
        }
        if self.measured is not None:
            data['measured'] = {'exact': str(self.measured), 'float': str(self.measured.evalf(digits))}
        return data


@dataclass(frozen=True)
class GrowthReport:
    field: object
    mode: str
    t2: Fraction
    vol1: Fraction
    bound: Fraction
    gate: dict
    rows: tuple
    provenance: dict = dataclass_field(default_factory=dict)

    def to_json(self, precision=None):
        precision = precision or settings.CUSPTOR_FLOAT_PRECISION
        return {
            'field': {'name': self.field.name, 'signature': list(self.field.signature), 'degree': self.field.degree},
            'mode': self.mode,
            't2': exact_and_float(self.t2, precision),
            'vol1': exact_and_float(self.vol1, precision),
            'provenance': self.provenance,
            'gate': self.gate,
            'predicted_bound': exact_and_float(self.bound, precision),
            'levels': [row.to_json(precision) for row in self.rows],
        }

    def text_table(self, precision=None):
        digits = max(1, int((precision or settings.CUSPTOR_FLOAT_PRECISION) * math.log10(2)))
        shown = min(digits, 8)
        header = f"{'N(n)':>8} {'índice':>10} {'cúspides':>9} {'Σ1/P':>12} {'Σlog P/P':>12} {'cota·índice':>14} {'medido':>12}"
        lines = [
            f"Cuerpo {self.field.name}, modo {self.mode}, cota predicha {float(self.bound):.{shown}g}",
            header,
            '-' * len(header),
        ]
        for row in self.rows:
            values = row.values(digits)
            measured = f"{values['measured']:.{shown}g}" if values['measured'] is not None else '-'
            lines.append(
                f"{values['norm']:>8} {values['index']:>10} {values['cusps']:>9} "
                f"{values['cusp_sum']:>12.{shown}g} {values['log_sum']:>12.{shown}g} "
                f"{values['bound_x_index']:>14.{shown}g} {measured:>12}"
            )
        return "\n".join(lines) + "\n"

    def write_xlsx(self, path, precision=None):
        digits = max(1, int((precision or settings.CUSPTOR_FLOAT_PRECISION) * math.log10(2)))
        workbook = xlsxwriter.Workbook(str(path))
        worksheet = workbook.add_worksheet('Crecimiento')
        header = workbook.add_format({'bold': True, 'font_color': 'white', 'bg_color': '#366092'})

        worksheet.write(0, 0, 'Cuerpo')
        worksheet.write(0, 1, self.field.name)
        worksheet.write(1, 0, 'Modo')
        worksheet.write(1, 1, self.mode)
        worksheet.write(2, 0, 'Cota predicha')
        worksheet.write_number(2, 1, float(self.bound))

        for col, name in enumerate(COLUMNS):
            worksheet.write(4, col, name, header)
        for offset, row in enumerate(self.rows, 5):
            values = row.values(digits)
            for col, name in enumerate(COLUMNS):
                if values[name] is None:
                    worksheet.write_blank(offset, col, None)
                else:
                    worksheet.write_number(offset, col, values[name])

        worksheet.set_column(0, len(COLUMNS) - 1, 15)
        workbook.close()
        logger.info(f"Tabla de crecimiento escrita en {path}")
        return path


def growth_lower_bound(field, ideals, t2, vol1, mode, tables=None, bound=None, threads=None, provenance=None):
    """
    Informe con la cota predicha y, por cada n_i, índice [Γ(n1):Γ(n_i)],
    número de cúspides, sumas de despreciabilidad y cota·índice.
    """
    if not ideals:
        raise MalformedDocument("La sucesión de ideales está vacía")
    if tables is not None and len(tables) != len(ideals):
        raise MalformedDocument(f"Hay {len(tables)} tablas para {len(ideals)} niveles")
    value, gate = growth_bound(field.signature, t2, vol1, mode)
    level1 = make_level(field, ideals[0])
    terms = negligibility_sums(level1, ideals, bound, threads)
    rows = []
    for position, (ideal, term) in enumerate(zip(ideals, terms)):
        level = make_level(field, ideal)
        level_index = index(level1, level, bound)
        measured = None
        if tables is not None and tables[position] is not None:
            measured = measured_torsion(tables[position], field.r1, level_index)
        rows.append(LevelRow(
            norm=ideal.norm,
            index=level_index,
            cusps=cusp_count(level, bound),
            cusp_sum=term.cusp_sum,
            log_sum=term.log_sum,
            bound_x_index=value * level_index,
            measured=measured,
        ))
    logger.info(f"Informe de crecimiento: {len(rows)} niveles, cota {value}")
    return GrowthReport(
        field=field,
        mode=mode,
        t2=Fraction(t2),
        vol1=Fraction(vol1),
        bound=value,
        gate=gate,
        rows=tuple(rows),
        provenance=provenance or {},
    )
