from core.commands import ReportCommand
from core.error_handling import TooLarge, handle_errors

from congruence.cusps import check_fiber_identity, cusp_fiber_count, infinity_cusp, parabolic_index
from congruence.levels import index, load_level
from numberfield.fields import load_field


class Command(ReportCommand):
    help = 'Índice [Γ(n1):Γ(n2)], índice parabólico y número de cúspides por fibra'

    def add_arguments(self, parser):
        parser.add_argument('field', help='Documento JSON del cuerpo')
        parser.add_argument('--level1', required=True, help='Nivel n1')
        parser.add_argument('--level2', required=True, help='Nivel n2 ⊆ n1')
        super().add_arguments(parser)

    @handle_errors
    def handle(self, *args, **options):
        inputs = {'field': options['field'], 'level1': options['level1'], 'level2': options['level2']}
        self.emit_report('index', inputs, {}, options, self.compute)

    def compute(self, config):
        field = load_field(self.load_document(config.inputs['field']))
        level1 = load_level(field, self.load_document(config.inputs['level1']))
        level2 = load_level(field, self.load_document(config.inputs['level2']))
        bound = config.enumeration_bound
        cusp = infinity_cusp(level1)
        report = {
            'level1': level1.to_json(),
            'level2': level2.to_json(),
            'index': index(level1, level2, bound),
            'parabolic_index': parabolic_index(level1, level2, cusp, bound),
            'cusp_fiber_count': cusp_fiber_count(level1, level2, cusp, bound),
        }
        try:
            direct, mismatches = check_fiber_identity(level1, level2, bound)
        except TooLarge:
            report['direct_enumeration'] = None
            return report, True
        report['direct_enumeration'] = {
            'fibers': [{'cusp': c.to_json(), 'count': n} for c, n in direct],
            'mismatches': mismatches,
        }
        return report, not mismatches
