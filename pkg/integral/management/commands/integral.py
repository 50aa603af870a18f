from django.core.management.base import CommandError

from core.commands import ReportCommand, add_common_arguments
from core.error_handling import EXIT_INPUT, UnsupportedSignature, handle_errors
from core.serialization import exact_and_float

from congruence.cusps import infinity_cusp
from congruence.levels import load_level
from integral.cohomology import parse_table, pm_split_integral, smith_cohomology, wang_sequence_oracle
from integral.complexes import total_complex
from integral.reps import build_rep_external, build_rep_symd
from integral.torsion import (
    cheeger_torsion,
    covolume_bounds,
    parse_inequality_document,
    relative_torsion_bound,
    symbolic_json,
)
from numberfield.fields import load_field


def _is_mapping_torus(rep):
    """Coeficientes triviales sobre T^d ⋊ Z: basta la sucesión de Wang."""
    trivial = ((1,),)
    return (
        rep.rank == 1 and rep.base_rank == 1
        and all(t == trivial for t in rep.fiber_gens)
        and rep.base_gens[0] == trivial
    )


class Command(ReportCommand):
    help = 'Cohomología entera de Y_η y contabilidad de torsión'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(title='acciones', dest='action', required=True)

        cohom = subparsers.add_parser('cohom', help='Tabla de cohomología entera del complejo total')
        cohom.add_argument('--rep', help='Documento JSON {"rank", "fiber_gens", "base_gens", "conj"}')
        cohom.add_argument('--field', help='Documento JSON del cuerpo (con --level y --symd)')
        cohom.add_argument('--level', help='Nivel n de Γ(n)')
        cohom.add_argument('--symd', type=int, help='Potencia simétrica d de O_K²')
        add_common_arguments(cohom)

        cheeger = subparsers.add_parser('cheeger', help='τ² de Cheeger a partir de una tabla')
        cheeger.add_argument('--table', required=True, help='Tabla de cohomología JSON')
        cheeger.add_argument('--inequality', help='Datos de la desigualdad de torsión relativa')
        add_common_arguments(cheeger)

    @handle_errors
    def handle(self, *args, **options):
        if options['action'] == 'cheeger':
            inputs = {'table': options['table'], 'inequality': options.get('inequality')}
            self.emit_report('integral cheeger', inputs, {}, options, self.compute_cheeger)
            return
        if options.get('rep'):
            inputs = {'rep': options['rep']}
        elif options.get('field') and options.get('level') and options.get('symd') is not None:
            inputs = {'field': options['field'], 'level': options['level']}
        else:
            raise CommandError("Hace falta --rep o bien --field, --level y --symd", returncode=EXIT_INPUT)
        self.emit_report('integral cohom', inputs, {'symd': options.get('symd')}, options, self.compute_cohom)

    def load_rep(self, config):
        if 'rep' in config.inputs:
            return build_rep_external(self.load_document(config.inputs['rep']))
        field = load_field(self.load_document(config.inputs['field']))
        level = load_level(field, self.load_document(config.inputs['level']))
        return build_rep_symd(field, config.options['symd'], infinity_cusp(level), level)

    def compute_cohom(self, config):
        rep = self.load_rep(config)
        complex_ = total_complex(rep)
        table = smith_cohomology(complex_)
        tau = cheeger_torsion(table)
        report = {
            'rep': {
                'rank': rep.rank,
                'fiber_rank': rep.fiber_rank,
                'base_rank': rep.base_rank,
                'signature': list(rep.signature),
                'provenance': rep.provenance,
            },
            'term_ranks': list(complex_.dims),
            'table': table.to_json(),
            'cheeger_torsion': exact_and_float(tau, config.precision_bits),
        }
        verified = table.euler_characteristic == 0
        try:
            report['pm_split'] = pm_split_integral(table).to_json()
        except UnsupportedSignature as e:
            report['pm_split'] = {'skipped': str(e)}
        if _is_mapping_torus(rep):
            oracle = wang_sequence_oracle([list(row) for row in rep.conj[0]])
            computed = [(entry.free, entry.torsion) for entry in table.degrees]
            agrees = oracle == computed
            report['wang_oracle'] = {
                'groups': [{'free': f, 'torsion': [str(t) for t in tor]} for f, tor in oracle],
                'agrees': agrees,
            }
            verified = verified and agrees
        self.stderr.write(f"H^*: libres {table.free_ranks}, τ² = {tau}")
        return report, verified

    def compute_cheeger(self, config):
        table = parse_table(self.load_document(config.inputs['table']))
        tau = cheeger_torsion(table)
        report = {
            'table': table.to_json(),
            'cheeger_torsion': exact_and_float(tau, config.precision_bits),
        }
        if 'inequality' not in config.inputs:
            return report, True
        r1, relative, absolute, covolumes, bounds = parse_inequality_document(
            self.load_document(config.inputs['inequality'])
        )
        outcome = relative_torsion_bound(r1, relative, covolumes, absolute)
        precision = config.precision_bits
        report['relative_torsion_bound'] = {
            'r1': r1,
            'relative_torsion': [str(t) for t in relative],
            'absolute_torsion': [str(t) for t in outcome['absolute_torsion']],
            'covolumes': covolumes.to_json(precision),
            'lhs_min': symbolic_json(outcome['lhs_min'], precision),
            'lhs_max': symbolic_json(outcome['lhs_max'], precision),
            'rhs': symbolic_json(outcome['rhs'], precision),
            'slack': symbolic_json(outcome['slack'], precision),
            'holds': outcome['holds'],
        }
        report['covolume_bounds'] = []
        for entry in bounds:
            values = covolume_bounds(entry['vol'], entry['dual_vol'], entry['index'], entry['b'])
            report['covolume_bounds'].append({
                'index': entry['index'],
                'b': entry['b'],
                'upper': symbolic_json(values['upper'], precision),
                'lower': symbolic_json(values['lower'], precision),
            })
        return report, outcome['holds']
