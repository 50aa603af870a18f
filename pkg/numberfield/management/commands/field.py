from core.commands import ReportCommand, add_common_arguments
from core.error_handling import TooLarge, handle_errors
from core.serialization import require_list

from numberfield.fields import load_field, parse_ideal, real_root_count
from numberfield.residues import residue_ring, unit_image_order


class Command(ReportCommand):
    help = 'Valida un documento de cuerpo de números y, opcionalmente, una lista de ideales'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(title='acciones', dest='action', required=True)
        validate = subparsers.add_parser('validate', help='Valida el cuerpo y calcula normas y anillos de restos')
        validate.add_argument('field', help='Documento JSON del cuerpo')
        validate.add_argument('--ideals', help='Documento JSON {"ideals": [...]}')
        add_common_arguments(validate)

    @handle_errors
    def handle(self, *args, **options):
        inputs = {'field': options['field'], 'ideals': options.get('ideals')}
        self.emit_report('field validate', inputs, {}, options, self.compute)

    def compute(self, config):
        field = load_field(self.load_document(config.inputs['field']))
        report = {
            'field': field.to_json(),
            'real_roots': real_root_count(field.defining_polynomial),
            'provenance': field.provenance,
            'ideals': [],
        }
        verified = True
        if 'ideals' in config.inputs:
            document = self.load_document(config.inputs['ideals'])
            for raw in require_list(document.get('ideals'), 'ideals'):
                ideal = parse_ideal(field, raw)
                entry = {'hnf': ideal.to_json(), 'norm': ideal.norm}
                try:
                    ring = residue_ring(field, ideal, config.enumeration_bound)
                except TooLarge:
                    entry['residue_ring'] = None
                else:
                    axioms = ring.verify_ring_axioms()
                    verified = verified and axioms and len(ring.elements) == ideal.norm
                    entry['residue_ring'] = {
                        'cardinality': len(ring.elements),
                        'units': len(ring.units),
                        'ring_axioms': axioms,
                        'unit_image_order': unit_image_order(field, ideal, config.enumeration_bound),
                    }
                report['ideals'].append(entry)
        self.stderr.write(f"Cuerpo validado: grado {field.degree}, signatura {field.signature}")
        return report, verified
