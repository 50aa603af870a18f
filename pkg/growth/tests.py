import json
import math
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from sympy import log

from core.error_handling import MalformedDocument, NoComplexPlace, NotAcyclicWeight, TrivialCohomology, WrongSign
from integral.cohomology import parse_table
from kostant.boundary import L2_ACYCLIC_AND_BOUNDARY, UNSUPPORTED
from kostant.weights import Weight
from numberfield.testing import example_field, field_path

from .ledger import boundary_basis_ledger
from .reports import ACYCLIC, SELF_DUAL_LATTICE, growth_bound, measured_torsion, parse_mode
from .weights import (
    AcyclicWeightSpec,
    GaloisAction,
    constituents,
    full_symmetric_group,
    generate_acyclic_weights,
    parse_galois_action,
)


def tower_path():
    return str(settings.CUSPTOR_DATA_DIR / 'levels' / 'gaussian_tower.json')


class GrowthBoundTests(SimpleTestCase):

    def test_acyclic_mode(self):
        value, gate = growth_bound((2, 1), Fraction(-1, 20), Fraction(10), ACYCLIC)
        self.assertEqual(value, 1)
        self.assertEqual(gate['sign_gate'], 'passed')

    def test_self_dual_mode_has_half_the_constant(self):
        value, _ = growth_bound((2, 1), Fraction(-1, 20), Fraction(10), SELF_DUAL_LATTICE)
        self.assertEqual(value, Fraction(1, 2))

    def test_fundamental_rank_other_than_one(self):
        value, gate = growth_bound((2, 2), Fraction(1, 20), Fraction(10), ACYCLIC)
        self.assertEqual(value, 0)
        self.assertEqual(gate['sign_gate'], 'skipped')

    def test_wrong_sign(self):
        with self.assertRaises(WrongSign):
            growth_bound((2, 1), Fraction(1, 20), Fraction(10), ACYCLIC)
        with self.assertRaises(WrongSign):
            growth_bound((1, 1), Fraction(-1, 20), Fraction(10), ACYCLIC)

    def test_volume_must_be_positive(self):
        with self.assertRaises(MalformedDocument):
            growth_bound((2, 1), Fraction(-1, 20), Fraction(0), ACYCLIC)

    def test_modes(self):
        self.assertEqual(parse_mode('selfdual'), SELF_DUAL_LATTICE)
        self.assertEqual(parse_mode(ACYCLIC), ACYCLIC)
        with self.assertRaises(MalformedDocument):
            parse_mode('otro')

    def test_measured_torsion(self):
        table = parse_table([{'free': 1}, {'free': 1}, {'free': 1, 'torsion': [2]}, {'free': 1, 'torsion': [3]}])
        self.assertEqual(measured_torsion(table, 0, 4), log(2) / 4)
        self.assertEqual(measured_torsion(table, 1, 1), log(3))


class AcyclicWeightTests(SimpleTestCase):

    def test_distinct_entries_are_accepted(self):
        spec = AcyclicWeightSpec((0, 1, 2, 3), full_symmetric_group(4))
        weights = constituents(spec, (2, 1))
        self.assertEqual(len(weights), 24)
        self.assertTrue(all(count == 1 for _, count in weights))
        self.assertTrue(all(w.n[0] != w.nbar[0] for w, _ in weights))

    def test_repeated_entries_are_rejected(self):
        with self.assertRaises(NotAcyclicWeight):
            AcyclicWeightSpec((1, 1, 2, 3), full_symmetric_group(4))

    def test_identity_action_gives_one_constituent(self):
        spec = AcyclicWeightSpec((0, 1, 2, 3), GaloisAction(((0, 1, 2, 3),)))
        [(weight, count)] = constituents(spec, (2, 1))
        self.assertEqual(weight, Weight((0, 1), (2,), (3,)))
        self.assertEqual(count, 1)

    def test_galois_action_must_be_a_group(self):
        action = parse_galois_action({'permutations': [[0, 1, 3, 2]]}, 4)
        self.assertEqual(len(action.permutations), 2)
        with self.assertRaises(MalformedDocument):
            parse_galois_action({'permutations': [[1, 2, 0, 3]]}, 4)
        with self.assertRaises(MalformedDocument):
            parse_galois_action({'permutations': [[0, 0, 1, 2]]}, 4)

    def test_quartic_constituents_are_acyclic(self):
        field = example_field('quartic_283')
        action = parse_galois_action({'permutations': [[0, 1, 3, 2]]}, 4)
        specs = generate_acyclic_weights(field, 3, action)
        self.assertEqual(len(specs), 24)
        for spec in specs:
            for constituent in spec['constituents']:
                self.assertEqual(constituent['acyclicity']['status'], L2_ACYCLIC_AND_BOUNDARY)
                self.assertTrue(constituent['fully_acyclic'])

    def test_imaginary_quadratic_constituents(self):
        specs = generate_acyclic_weights(example_field('gaussian'), 1)
        self.assertEqual([s['d_sigma'] for s in specs], [[0, 1], [1, 0]])
        statuses = {c['acyclicity']['status'] for c in specs[0]['constituents']}
        self.assertEqual(statuses, {L2_ACYCLIC_AND_BOUNDARY, UNSUPPORTED})

    def test_requires_a_complex_place(self):
        with self.assertRaises(NoComplexPlace):
            generate_acyclic_weights(example_field('sqrt2'), 2)


class LedgerTests(SimpleTestCase):

    def test_trivial_weight(self):
        ledger = boundary_basis_ledger((2, 1), Weight((0, 0), (0,), (0,)))
        self.assertEqual(ledger['mu_plus_total'], 4)
        self.assertEqual(ledger['mu_minus_total'], 4)
        self.assertTrue(ledger['pairing_is_identity'])
        self.assertEqual(ledger['self_dual_torsion'], '1')

    def test_torsion_comes_from_the_unsigned_pairing(self):
        ledger = boundary_basis_ledger((2, 1), Weight((0, 0), (0,), (0,)))
        self.assertTrue(set(ledger['pairing_signs']) <= {1, -1})
        self.assertEqual(sorted(ledger['block_determinants']), sorted({str(p['degree']) for p in ledger['mu_plus']}))
        for degree, det in ledger['block_determinants'].items():
            product = 1
            for element, sign in zip(ledger['mu_plus'], ledger['pairing_signs']):
                if element['degree'] == int(degree):
                    product *= sign
            self.assertEqual(det, product)

    def test_degrees_are_complementary(self):
        ledger = boundary_basis_ledger((2, 1), Weight((0, 0), (0,), (0,)))
        for plus, minus in zip(ledger['mu_plus'], ledger['mu_minus']):
            self.assertEqual(plus['degree'] + minus['degree'], 6)

    def test_middle_part_is_kept_apart(self):
        ledger = boundary_basis_ledger((0, 1), Weight((), (0,), (0,)))
        self.assertEqual(ledger['mu_plus_total'], 1)
        self.assertEqual(ledger['middle_total'], 2)

    def test_trivial_cohomology(self):
        with self.assertRaises(TrivialCohomology):
            boundary_basis_ledger((2, 1), Weight((0, 1), (0,), (1,)))


class GrowthCommandTests(SimpleTestCase):

    def report(self, *extra):
        out = StringIO()
        call_command(
            'growth', 'report', '--field', field_path('gaussian'), '--ideals', tower_path(),
            '--t2=-1/10', '--vol', '3', *extra, stdout=out, stderr=StringIO(),
        )
        return out.getvalue()

    def test_report(self):
        report = json.loads(self.report())
        result = report['result']
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(result['predicted_bound']['exact'], '3/5')
        self.assertEqual([row['index'] for row in result['levels']], [1, 8, 64, 512])
        self.assertEqual(result['levels'][0]['cusp_sum']['exact'], '12')
        self.assertEqual(result['levels'][1]['bound_x_index']['exact'], '24/5')

    def test_self_dual_report(self):
        result = json.loads(self.report('--mode', 'selfdual'))['result']
        self.assertEqual(result['predicted_bound']['exact'], '3/10')

    def test_measured_torsion_column(self):
        with tempfile.TemporaryDirectory() as tmp:
            tables = Path(tmp) / 'tables.json'
            tables.write_text(json.dumps({'tables': [
                [{'free': 2}, {'free': 4, 'torsion': ['2']}, {'free': 2, 'torsion': ['2']}], None, None, None,
            ]}))
            result = json.loads(self.report('--tables', str(tables)))['result']
        self.assertAlmostEqual(float(result['levels'][0]['measured']['float']), math.log(2), places=12)
        self.assertNotIn('measured', result['levels'][1])

    def test_table_and_spreadsheet_outputs(self):
        with tempfile.TemporaryDirectory() as tmp:
            output = Path(tmp) / 'report.json'
            xlsx = Path(tmp) / 'growth.xlsx'
            text = self.report('--output', str(output), '--xlsx', str(xlsx))
            self.assertIn('cota predicha', text)
            self.assertTrue(xlsx.is_file())
            self.assertEqual(json.loads(output.read_text())['status'], 'pass')

    def test_wrong_sign_exits_with_input_error(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                'growth', 'report', '--field', field_path('gaussian'), '--ideals', tower_path(),
                '--t2', '1/10', '--vol', '3', stdout=StringIO(), stderr=StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, 2)

    def test_weights_command(self):
        out = StringIO()
        call_command('growth', 'weights', '--field', field_path('gaussian'), '--max-entry', '1',
                     stdout=out, stderr=StringIO())
        result = json.loads(out.getvalue())['result']
        self.assertTrue(result['default_galois_action'])
        self.assertEqual(result['constituent_count'], 4)

    def test_ledger_command(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'weight.json'
            path.write_text(json.dumps({'m': [0, 0], 'n': [0], 'nbar': [0]}))
            out = StringIO()
            call_command('growth', 'ledger', '--weight', str(path), stdout=out, stderr=StringIO())
        self.assertEqual(json.loads(out.getvalue())['result']['mu_minus_total'], 4)
