import math

from core.commands import ReportCommand
from core.error_handling import handle_errors
from core.serialization import require_list

from congruence.cusps import negligibility_sums
from congruence.levels import load_level
from numberfield.fields import load_field, parse_ideal


class Command(ReportCommand):
    help = 'Sumas de despreciabilidad de las cúspides a lo largo de una torre de niveles'

    def add_arguments(self, parser):
        parser.add_argument('field', help='Documento JSON del cuerpo')
        parser.add_argument('--level', required=True, help='Nivel base n1')
        parser.add_argument('--sequence', required=True, help='Documento JSON {"ideals": [...]}')
        super().add_arguments(parser)

    @handle_errors
    def handle(self, *args, **options):
        inputs = {'field': options['field'], 'level': options['level'], 'sequence': options['sequence']}
        self.emit_report('negligibility', inputs, {}, options, self.compute)

    def compute(self, config):
        field = load_field(self.load_document(config.inputs['field']))
        level1 = load_level(field, self.load_document(config.inputs['level']))
        sequence = self.load_document(config.inputs['sequence'])
        ideals = [parse_ideal(field, raw) for raw in require_list(sequence.get('ideals'), 'ideals')]
        terms = negligibility_sums(level1, ideals, config.enumeration_bound, config.threads)
        digits = max(1, int(config.precision_bits * math.log10(2)))
        cusp_sums = [t.cusp_sum for t in terms]
        report = {
            'level1': level1.to_json(),
            'terms': [t.to_json(digits) for t in terms],
            'cusp_sum_weakly_decreasing': all(a >= b for a, b in zip(cusp_sums, cusp_sums[1:])),
        }
        positive = all(t.cusp_sum > 0 for t in terms)
        return report, positive and report['cusp_sum_weakly_decreasing']
