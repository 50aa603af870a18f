from core.commands import ReportCommand, add_common_arguments
from core.error_handling import handle_errors
from core.serialization import require_list

from growth.ledger import boundary_basis_ledger
from growth.reports import growth_lower_bound, parse_constant, parse_mode
from growth.weights import generate_acyclic_weights, parse_galois_action
from integral.cohomology import parse_table
from kostant.weights import parse_weight
from numberfield.fields import load_field, parse_ideal


class Command(ReportCommand):
    help = 'Cotas inferiores del crecimiento de la torsión y pesos acíclicos'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(title='acciones', dest='action', required=True)

        report = subparsers.add_parser('report', help='Informe de crecimiento a lo largo de una torre de niveles')
        report.add_argument('--field', required=True, help='Documento JSON del cuerpo')
        report.add_argument('--ideals', required=True, help='Documento JSON {"ideals": [...]}; el primero es n1')
        report.add_argument('--t2', required=True, help='t^(2) ingerido (racional exacto)')
        report.add_argument('--vol', required=True, help='vol(X_1) ingerido (racional exacto)')
        report.add_argument('--mode', choices=['acyclic', 'selfdual'], default='acyclic')
        report.add_argument('--t2-provenance', default='ingerido', help='Procedencia de t^(2)')
        report.add_argument('--vol-provenance', default='ingerido', help='Procedencia de vol(X_1)')
        report.add_argument('--tables', help='Documento JSON {"tables": [tabla | null, ...]} por nivel')
        report.add_argument('--xlsx', help='Hoja de cálculo donde escribir la tabla por niveles')
        add_common_arguments(report)

        weights = subparsers.add_parser('weights', help='Pesos acíclicos y sus constituyentes')
        weights.add_argument('--field', required=True, help='Documento JSON del cuerpo')
        weights.add_argument('--max-entry', type=int, default=3, help='Cota de las entradas d_σ')
        weights.add_argument('--galois', help='Documento JSON {"permutations": [...]}')
        add_common_arguments(weights)

        ledger = subparsers.add_parser('ledger', help='Bases μ_± de la cohomología del borde')
        ledger.add_argument('--weight', required=True, help='Documento JSON {"m", "n", "nbar"}')
        add_common_arguments(ledger)

    @handle_errors
    def handle(self, *args, **options):
        action = options['action']
        if action == 'report':
            inputs = {'field': options['field'], 'ideals': options['ideals'], 'tables': options.get('tables')}
            parameters = {
                't2': options['t2'],
                'vol': options['vol'],
                'mode': options['mode'],
                'xlsx': options.get('xlsx'),
                'provenance': {'t2': options['t2_provenance'], 'vol1': options['vol_provenance']},
            }
            self.emit_report('growth report', inputs, parameters, options, self.compute_report)
        elif action == 'weights':
            inputs = {'field': options['field'], 'galois': options.get('galois')}
            self.emit_report('growth weights', inputs, {'max_entry': options['max_entry']}, options, self.compute_weights)
        else:
            self.emit_report('growth ledger', {'weight': options['weight']}, {}, options, self.compute_ledger)

    def compute_report(self, config):
        field = load_field(self.load_document(config.inputs['field']))
        sequence = self.load_document(config.inputs['ideals'])
        ideals = [parse_ideal(field, raw) for raw in require_list(sequence.get('ideals'), 'ideals')]
        tables = None
        if 'tables' in config.inputs:
            document = self.load_document(config.inputs['tables'])
            tables = [
                parse_table(entry) if entry is not None else None
                for entry in require_list(document.get('tables'), 'tables')
            ]
        report = growth_lower_bound(
            field,
            ideals,
            parse_constant(config.options['t2'], 't2'),
            parse_constant(config.options['vol'], 'vol'),
            parse_mode(config.options['mode']),
            tables=tables,
            bound=config.enumeration_bound,
            threads=config.threads,
            provenance=config.options['provenance'],
        )
        # Con --output la tabla va a stdout; si no, stdout lleva el JSON
        (self.stdout if config.output else self.stderr).write(report.text_table(config.precision_bits), ending='')
        if config.options.get('xlsx'):
            report.write_xlsx(config.options['xlsx'], config.precision_bits)
        return report.to_json(config.precision_bits), True

    def compute_weights(self, config):
        field = load_field(self.load_document(config.inputs['field']))
        action = None
        if 'galois' in config.inputs:
            action = parse_galois_action(self.load_document(config.inputs['galois']), field.degree)
        specs = generate_acyclic_weights(field, config.options['max_entry'], action)
        constituents = [c for spec in specs for c in spec['constituents']]
        report = {
            'signature': list(field.signature),
            'default_galois_action': action is None,
            'weights': specs,
            'constituent_count': len(constituents),
        }
        return report, True

    def compute_ledger(self, config):
        weight = parse_weight(self.load_document(config.inputs['weight']))
        return boundary_basis_ledger(weight.signature, weight), True
