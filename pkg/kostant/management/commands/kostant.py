from core.commands import ReportCommand, add_common_arguments
from core.error_handling import MalformedDocument, NotFredholm, handle_errors
from core.serialization import parse_exact_integer

from kostant.boundary import (
    acyclicity_status,
    boundary_cohomology,
    fredholm_and_l2b_kernel,
    ker_eth_S,
    l2_halfline_cohomology,
    small_rank,
)
from kostant.verification import verify_grid
from kostant.weights import parse_weight


class Command(ReportCommand):
    help = 'Comprobaciones del complejo de Kostant y cohomología del borde'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(title='acciones', dest='action', required=True)

        verify = subparsers.add_parser('verify', help='Recorre la malla de pesos de una signatura')
        verify.add_argument('--r1', type=int, required=True, help='Número de lugares reales')
        verify.add_argument('--r2', type=int, required=True, help='Número de lugares complejos')
        verify.add_argument('--max-weight', type=int, default=2, help='Cota de las entradas del peso')
        add_common_arguments(verify)

        boundary = subparsers.add_parser('boundary', help='Cohomología del borde de un peso')
        boundary.add_argument('--weight', required=True, help='Documento JSON {"m", "n", "nbar"}')
        boundary.add_argument('--l2-dim', type=int, help='dim ker_L² para el rango de autovalores pequeños')
        boundary.add_argument('--cusps', type=int, default=1, help='Número de cúspides')
        add_common_arguments(boundary)

    @handle_errors
    def handle(self, *args, **options):
        if options['action'] == 'verify':
            parameters = {'r1': options['r1'], 'r2': options['r2'], 'max_weight': options['max_weight']}
            self.emit_report('kostant verify', {}, parameters, options, self.compute_verify)
        else:
            parameters = {'l2_dim': options.get('l2_dim'), 'cusps': options['cusps']}
            self.emit_report('kostant boundary', {'weight': options['weight']}, parameters, options, self.compute_boundary)

    def compute_verify(self, config):
        report = verify_grid(
            config.options['r1'], config.options['r2'], config.options['max_weight'], config.threads,
        )
        self.stderr.write(f"{report['weights']} pesos, {len(report['mismatches'])} discrepancias")
        return report, report['passed']

    def compute_boundary(self, config):
        document = self.load_document(config.inputs['weight'])
        weight = parse_weight(document)
        signature = weight.signature
        if 'signature' in document:
            declared = tuple(parse_exact_integer(x) for x in document['signature'])
            if declared != signature:
                raise MalformedDocument(f"La signatura {declared} no corresponde al peso {weight}")
        weight.check_signature(signature)

        record = ker_eth_S(signature, weight)
        cohomology = boundary_cohomology(signature, weight)
        status = acyclicity_status(signature, weight)
        report = {
            'kernel_S': record.to_json(),
            'boundary_cohomology': cohomology.to_json(),
            'l2_halfline': l2_halfline_cohomology(signature, weight),
            'acyclicity': status.to_json(),
        }
        try:
            report['l2b_kernel'] = fredholm_and_l2b_kernel(signature, weight).to_json()
        except NotFredholm as e:
            report['l2b_kernel'] = {'is_fredholm': False, 'reason': str(e)}
            report['small_rank'] = None
            return report, True
        l2_dim = config.options.get('l2_dim')
        if l2_dim is None and status.status != 'L2_ACYCLIC_AND_BOUNDARY':
            report['small_rank'] = None
        else:
            report['small_rank'] = small_rank(signature, weight, l2_dim, config.options['cusps'])
        return report, True
