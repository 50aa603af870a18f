import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from sympy import Poly, symbols

from core.error_handling import (
    MalformedBasis,
    MalformedDocument,
    NonUnitGenerator,
    NotAnIdeal,
    NotNested,
    SignatureMismatch,
    TooLarge,
    UnitRankMismatch,
)

from .fields import load_field, real_root_count
from .ideals import (
    IdealHNF,
    enumerate_ideals,
    ideal_contains,
    ideal_from_generators,
    ideal_norm,
    ideal_product,
    principal_ideal,
    unit_ideal,
)
from .residues import residue_ring, unit_index_mod
from .testing import example_field, field_document, field_path


class LoadFieldTests(SimpleTestCase):
    """Ingesta y validación de documentos de cuerpos"""

    def test_gaussian_field_is_accepted(self):
        field = example_field('gaussian')
        self.assertEqual(field.degree, 2)
        self.assertEqual(field.signature, (0, 1))
        self.assertEqual(field.unit_rank, 0)
        self.assertEqual(field.class_number, 1)

    def test_sqrt2_unit_has_norm_minus_one(self):
        field = example_field('sqrt2')
        self.assertEqual(field.signature, (2, 0))
        self.assertEqual(field.norm(field.unit_generators[0]), -1)

    def test_quartic_field_has_two_real_roots(self):
        field = example_field('quartic_283')
        self.assertEqual(field.signature, (2, 1))
        self.assertEqual(field.unit_rank, 2)
        self.assertEqual(real_root_count(field.defining_polynomial), 2)

    def test_sturm_count_matches_sympy_and_numeric_roots(self):
        x = symbols('x')
        for name in ('gaussian', 'sqrt2', 'sqrt3', 'quartic_283', 'sqrt_minus5'):
            field = example_field(name)
            poly = Poly(list(field.defining_polynomial), x)
            numeric = sum(1 for root in poly.nroots() if abs(root.as_real_imag()[1]) < 1e-12)
            with self.subTest(field=name):
                self.assertEqual(real_root_count(field.defining_polynomial), poly.count_roots())
                self.assertEqual(real_root_count(field.defining_polynomial), numeric)

    def test_declared_signature_must_match_sturm_count(self):
        document = field_document('gaussian')
        document['signature'] = [2, 0]
        with self.assertRaises(SignatureMismatch):
            load_field(document)

    def test_unit_count_must_match_dirichlet_rank(self):
        document = field_document('sqrt2')
        document['units'] = []
        with self.assertRaises(UnitRankMismatch):
            load_field(document)

    def test_non_unit_generator_is_rejected(self):
        document = field_document('sqrt2')
        document['units'] = [[1, 2]]
        with self.assertRaises(NonUnitGenerator):
            load_field(document)

    def test_non_integral_basis_is_rejected(self):
        document = field_document('gaussian')
        document['integral_basis'] = [["1", "1/2"], ["0", "1/2"]]
        with self.assertRaises(MalformedBasis):
            load_field(document)

    def test_half_integral_basis_is_accepted(self):
        field = load_field({
            'poly': [1, 0, -5],
            'signature': [2, 0],
            'integral_basis': [["1", "1/2"], ["0", "1/2"]],
            'units': [[0, 1]],
            'torsion_order': 2,
            'disc': 5,
        })
        golden = (0, 1)
        # ((1 + √5)/2)² = 1 + (1 + √5)/2
        self.assertEqual(field.mul(golden, golden), (1, 1))
        self.assertEqual(field.norm(golden), -1)

    def test_discriminant_cross_check(self):
        document = field_document('sqrt2')
        document['disc'] = 4
        with self.assertRaises(MalformedBasis):
            load_field(document)

    def test_torsion_generator_is_required_and_checked(self):
        document = field_document('gaussian')
        del document['torsion_gen']
        with self.assertRaises(MalformedDocument):
            load_field(document)
        document['torsion_gen'] = [-1, 0]
        with self.assertRaises(MalformedDocument):
            load_field(document)

    def test_class_group_representatives(self):
        field = example_field('sqrt_minus5')
        self.assertEqual(field.class_number, 2)
        self.assertEqual(field.class_group[1].ideal.norm, 2)

    def test_missing_fields_are_reported(self):
        with self.assertRaises(MalformedDocument) as ctx:
            load_field({'poly': [1, 0, 1]})
        self.assertIn('signature', ctx.exception.errors)


class IdealTests(SimpleTestCase):
    """Normas, cierre multiplicativo y enumeración de ideales"""

    def setUp(self):
        self.gaussian = example_field('gaussian')

    def test_norms_in_gaussian_integers(self):
        field = self.gaussian
        self.assertEqual(ideal_norm(field, principal_ideal(field, (2, 0))), 4)
        self.assertEqual(ideal_norm(field, principal_ideal(field, (1, 1))), 2)
        self.assertEqual(ideal_norm(field, unit_ideal(field)), 1)

    def test_principal_norm_equals_element_norm(self):
        for name in ('gaussian', 'sqrt2', 'sqrt3', 'quartic_283'):
            field = example_field(name)
            d = field.degree
            for k in range(1, 6):
                element = tuple((k * (i + 2) + i * i) % 7 - 3 for i in range(d))
                if not any(element):
                    continue
                with self.subTest(field=name, element=element):
                    self.assertEqual(principal_ideal(field, element).norm, abs(field.norm(element)))

    def test_lattice_not_closed_is_not_an_ideal(self):
        with self.assertRaises(NotAnIdeal):
            ideal_norm(self.gaussian, IdealHNF.from_rows([[2, 0], [0, 1]]))

    def test_product_and_containment(self):
        field = self.gaussian
        p = principal_ideal(field, (1, 1))
        self.assertEqual(ideal_product(field, p, p), principal_ideal(field, (2, 0)))
        self.assertTrue(ideal_contains(p, principal_ideal(field, (2, 0))))
        self.assertFalse(ideal_contains(principal_ideal(field, (2, 0)), p))
        self.assertEqual(ideal_from_generators(field, [(2, 0), (1, 1)]), p)

    def test_enumerate_ideals_counts_gaussian_ideals(self):
        ideals = enumerate_ideals(self.gaussian, 10)
        self.assertEqual(len(ideals), 9)
        self.assertEqual([i.norm for i in ideals].count(5), 2)


class ResidueRingTests(SimpleTestCase):
    """Anillos de restos y grupos de unidades módulo n"""

    def test_small_residue_rings(self):
        gaussian, sqrt2 = example_field('gaussian'), example_field('sqrt2')
        ring = residue_ring(gaussian, principal_ideal(gaussian, (1, 1)))
        self.assertEqual(len(ring.elements), 2)
        self.assertEqual(len(ring.units), 1)
        self.assertEqual(len(residue_ring(sqrt2, principal_ideal(sqrt2, (0, 1))).elements), 2)
        self.assertEqual(len(residue_ring(gaussian, unit_ideal(gaussian)).elements), 1)

    def test_cardinality_is_multiplicative_on_coprime_ideals(self):
        field = example_field('gaussian')
        a, b = principal_ideal(field, (1, 1)), principal_ideal(field, (3, 0))
        ab = ideal_product(field, a, b)
        self.assertEqual(
            len(residue_ring(field, ab).elements),
            len(residue_ring(field, a).elements) * len(residue_ring(field, b).elements),
        )

    def test_ring_axioms(self):
        field = example_field('gaussian')
        self.assertTrue(residue_ring(field, principal_ideal(field, (2, 0))).verify_ring_axioms())
        self.assertTrue(residue_ring(field, principal_ideal(field, (3, 0))).verify_ring_axioms(sample=64))

    def test_enumeration_bound(self):
        field = example_field('gaussian')
        with self.assertRaises(TooLarge):
            residue_ring(field, principal_ideal(field, (2, 0)), bound=3)

    def test_unit_index_in_gaussian_integers(self):
        field = example_field('gaussian')
        p = principal_ideal(field, (1, 1))
        n3 = ideal_product(field, ideal_product(field, p, p), p)
        n4 = ideal_product(field, n3, p)
        self.assertEqual(unit_index_mod(field, n3, n4), 1)
        self.assertEqual(unit_index_mod(field, n3, n3), 1)

    def test_unit_index_in_real_quadratic_field(self):
        field = example_field('sqrt2')
        n1, n2 = principal_ideal(field, (0, 1)), principal_ideal(field, (2, 0))
        unit = field.unit_generators[0]
        expected = residue_ring(field, n2).element_order(unit) // residue_ring(field, n1).element_order(unit)
        self.assertEqual(unit_index_mod(field, n1, n2), expected)
        self.assertEqual(expected, 2)

    def test_unit_index_requires_nested_levels(self):
        field = example_field('gaussian')
        with self.assertRaises(NotNested):
            unit_index_mod(field, principal_ideal(field, (2, 0)), principal_ideal(field, (1, 1)))


class FieldCommandTests(SimpleTestCase):
    """Comando `field validate`"""

    def test_validate_writes_report(self):
        out = StringIO()
        call_command('field', 'validate', field_path('quartic_283'), stdout=out, stderr=StringIO())
        report = json.loads(out.getvalue())
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(report['result']['real_roots'], 2)

    def test_validate_with_ideals(self):
        with tempfile.TemporaryDirectory() as tmp:
            ideals = Path(tmp) / 'ideals.json'
            ideals.write_text(json.dumps({'ideals': [{'generators': [[2, 0]]}, [[1, 0], [0, 1]]]}))
            out = StringIO()
            call_command('field', 'validate', field_path('gaussian'), '--ideals', str(ideals),
                         stdout=out, stderr=StringIO())
        entries = json.loads(out.getvalue())['result']['ideals']
        self.assertEqual([e['norm'] for e in entries], [4, 1])
        self.assertTrue(entries[0]['residue_ring']['ring_axioms'])
        self.assertEqual(entries[0]['residue_ring']['units'], 2)

    def test_missing_field_file_exits_with_input_error(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('field', 'validate', '/nonexistent/field.json', stdout=StringIO(), stderr=StringIO())
        self.assertEqual(ctx.exception.returncode, 2)

    def test_report_is_deterministic(self):
        reports = []
        for _ in range(2):
            out = StringIO()
            call_command('field', 'validate', field_path('sqrt2'), stdout=out, stderr=StringIO())
            reports.append(json.loads(out.getvalue()))
        self.assertEqual(reports[0]['fingerprint'], reports[1]['fingerprint'])
