from core.commands import ReportCommand
from core.error_handling import TooLarge, handle_errors

from congruence.cusps import cusp_count, cusp_set, parabolic_stabilizer
from congruence.levels import level_order, load_level
from numberfield.fields import load_field


class Command(ReportCommand):
    help = 'Enumera las cúspides de Γ(n) y las contrasta con la fórmula cerrada'

    def add_arguments(self, parser):
        parser.add_argument('field', help='Documento JSON del cuerpo')
        parser.add_argument('--level', required=True, help='Documento JSON del nivel')
        parser.add_argument('--stabilizers', action='store_true', help='Incluir los datos de Γ(n)_η')
        super().add_arguments(parser)

    @handle_errors
    def handle(self, *args, **options):
        inputs = {'field': options['field'], 'level': options['level']}
        self.emit_report('cusps', inputs, {'stabilizers': options['stabilizers']}, options, self.compute)

    def compute(self, config):
        field = load_field(self.load_document(config.inputs['field']))
        level = load_level(field, self.load_document(config.inputs['level']))
        bound = config.enumeration_bound
        expected = cusp_count(level, bound)
        report = {
            'level': level.to_json(),
            'sl2_order': level_order(level, bound),
            'cusp_count_formula': expected,
        }
        try:
            cusps = cusp_set(level, bound)
        except TooLarge:
            report['cusps'] = None
            report['warning'] = 'Nivel fuera de la cota de enumeración: solo fórmula'
            return report, True
        report['cusps'] = [c.to_json() for c in cusps]
        report['cusp_count'] = len(cusps)
        if config.options.get('stabilizers'):
            report['stabilizers'] = [parabolic_stabilizer(level, c).to_json() for c in cusps[:field.class_number]]
        return report, len(cusps) == expected
