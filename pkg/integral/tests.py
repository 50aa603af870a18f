import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from sympy import Integer, Rational, sqrt

from congruence.cusps import infinity_cusp
from congruence.levels import load_level
from core.error_handling import (
    ConjugationMismatch,
    MalformedDocument,
    MissingData,
    NonCommuting,
    NonUnimodular,
    RankOverflow,
    UnsupportedSignature,
)
from core.linalg import identity, is_zero, mat_mul, mat_sub_identity
from core.serialization import load_json_document
from kostant.boundary import constituent_dims
from kostant.weights import Weight
from numberfield.testing import example_field, field_path

from .cohomology import parse_table, pm_split_integral, smith_cohomology, wang_sequence_oracle
from .complexes import koszul_complex, total_complex
from .reps import build_rep_external, build_rep_symd
from .torsion import (
    cheeger_torsion,
    covolume_bounds,
    gram_covolume,
    parse_covolumes,
    parse_positive_real,
    relative_torsion_bound,
)


def data_path(folder, name):
    return str(settings.CUSPTOR_DATA_DIR / folder / f'{name}.json')


def example_rep(name):
    return build_rep_external(load_json_document(data_path('reps', name)))


def trivial_rep(rank, fiber_rank, base_rank):
    one = identity(rank)
    return build_rep_external({
        'rank': rank,
        'fiber_gens': [one] * fiber_rank,
        'base_gens': [one] * base_rank,
        'conj': [identity(fiber_rank)] * base_rank,
    })


def symd_rep(field_name, level_name, d):
    field = example_field(field_name)
    level = load_level(field, load_json_document(data_path('levels', level_name)))
    return build_rep_symd(field, d, infinity_cusp(level), level)


def cohomology(rep):
    return smith_cohomology(total_complex(rep))


class LatticeRepTests(SimpleTestCase):

    def test_trivial_rep_is_accepted(self):
        rep = trivial_rep(1, 2, 1)
        self.assertEqual(rep.rank, 1)
        self.assertEqual(rep.signature, (2, 0))

    def test_non_commuting_translations(self):
        with self.assertRaises(NonCommuting):
            build_rep_external({
                'rank': 2,
                'fiber_gens': [[[1, 1], [0, 1]], [[1, 0], [1, 1]]],
                'base_gens': [],
                'conj': [],
            })

    def test_non_unimodular_generator(self):
        with self.assertRaises(NonUnimodular):
            build_rep_external({'rank': 1, 'fiber_gens': [[[2]]], 'base_gens': [], 'conj': []})

    def test_conjugation_mismatch(self):
        with self.assertRaises(ConjugationMismatch):
            build_rep_external({
                'rank': 2,
                'fiber_gens': [[[1, 1], [0, 1]]],
                'base_gens': [[[1, 0], [0, 1]]],
                'conj': [[[-1]]],
            })

    def test_missing_fields(self):
        with self.assertRaises(MalformedDocument):
            build_rep_external({'rank': 1, 'fiber_gens': []})

    @override_settings(CUSPTOR_LATTICE_RANK_CAP=1)
    def test_rank_cap(self):
        with self.assertRaises(RankOverflow):
            trivial_rep(2, 1, 0)

    def test_sol_data_is_accepted(self):
        rep = example_rep('sol_sqrt2')
        self.assertEqual((rep.fiber_rank, rep.base_rank), (2, 1))

    def test_symmetric_power_over_gaussian_field(self):
        rep = symd_rep('gaussian', 'gaussian_1pi_cubed', 1)
        self.assertEqual(rep.rank, 4)
        self.assertEqual(rep.signature, (0, 1))
        for t in rep.fiber_gens:
            shifted = mat_sub_identity([list(row) for row in t])
            self.assertTrue(is_zero(mat_mul(shifted, shifted)))

    def test_symmetric_power_zero_is_trivial_on_fiber(self):
        rep = symd_rep('gaussian', 'gaussian_1pi_cubed', 0)
        self.assertEqual(rep.rank, 2)
        for t in rep.fiber_gens:
            self.assertEqual([list(row) for row in t], identity(2))

    def test_symmetric_power_over_real_quadratic_field(self):
        rep = symd_rep('sqrt2', 'sqrt2_2', 1)
        self.assertEqual(rep.rank, 4)
        self.assertEqual(rep.base_rank, 1)
        for t in rep.fiber_gens:
            shifted = mat_sub_identity([list(row) for row in t])
            self.assertTrue(is_zero(mat_mul(shifted, shifted)))

    @override_settings(CUSPTOR_LATTICE_RANK_CAP=3)
    def test_symmetric_power_rank_cap(self):
        with self.assertRaises(RankOverflow):
            symd_rep('gaussian', 'gaussian_1pi_cubed', 1)


class TotalComplexTests(SimpleTestCase):

    def test_term_ranks_are_binomial_convolutions(self):
        self.assertEqual(total_complex(trivial_rep(1, 2, 1)).dims, [1, 3, 3, 1])
        self.assertEqual(total_complex(trivial_rep(1, 2, 0)).dims, [1, 2, 1])
        self.assertEqual(total_complex(trivial_rep(4, 2, 1)).dims, [4, 12, 12, 4])

    def test_koszul_complex_squares_to_zero(self):
        rep = symd_rep('gaussian', 'gaussian_1pi_cubed', 1)
        self.assertTrue(koszul_complex(rep).check_square_zero())

    def test_quartic_total_complex(self):
        complex_ = total_complex(example_rep('quartic_trivial'))
        self.assertEqual(complex_.dims, [1, 6, 15, 20, 15, 6, 1])
        self.assertTrue(complex_.check_square_zero())


class SmithCohomologyTests(SimpleTestCase):

    def test_trivial_coefficients_give_torus_cohomology(self):
        table = cohomology(example_rep('trivial_torus'))
        self.assertEqual(table.free_ranks, [1, 3, 3, 1])
        self.assertEqual(table.torsion_orders, [1, 1, 1, 1])

    def test_sol_manifold_with_orientation_reversing_monodromy(self):
        table = cohomology(example_rep('sol_sqrt2'))
        self.assertEqual(table.free_ranks, [1, 1, 0, 0])
        self.assertEqual([entry.torsion for entry in table.degrees], [(), (), (2,), (2,)])
        self.assertEqual(cheeger_torsion(table), 1)

    def test_sol_manifold_second_cohomology(self):
        table = cohomology(example_rep('sol_sqrt3'))
        self.assertEqual(table.free_ranks, [1, 1, 1, 1])
        self.assertEqual(table.degrees[2].torsion, (2,))
        self.assertEqual(cheeger_torsion(table), Fraction(1, 2))

    def test_matches_wang_sequence(self):
        for name in ('sol_sqrt2', 'sol_sqrt3', 'trivial_torus'):
            rep = example_rep(name)
            table = cohomology(rep)
            oracle = wang_sequence_oracle([list(row) for row in rep.conj[0]])
            self.assertEqual([(e.free, e.torsion) for e in table.degrees], oracle, name)

    def test_wang_sequence_oracle(self):
        self.assertEqual(
            wang_sequence_oracle([[1, 2], [1, 1]]),
            [(1, ()), (1, ()), (0, (2,)), (0, (2,))],
        )

    def test_euler_characteristic_vanishes(self):
        for rep in (example_rep('sol_sqrt3'), example_rep('quartic_trivial'), trivial_rep(2, 2, 1)):
            self.assertEqual(cohomology(rep).euler_characteristic, 0)

    def test_quartic_free_ranks(self):
        table = cohomology(example_rep('quartic_trivial'))
        self.assertEqual(table.free_ranks, [1, 2, 1, 0, 1, 2, 1])

    def test_base_generator_order_does_not_matter(self):
        rep = example_rep('quartic_trivial')
        table = cohomology(rep)
        swapped = cohomology(rep.with_base_order((1, 0)))
        self.assertEqual(swapped.free_ranks, table.free_ranks)
        self.assertEqual(
            [e.torsion for e in swapped.degrees],
            [e.torsion for e in table.degrees],
        )

    def test_free_ranks_match_boundary_dimensions(self):
        table = cohomology(symd_rep('gaussian', 'gaussian_1pi_cubed', 1))
        constituents = [Weight((), (1,), (0,)), Weight((), (0,), (1,))]
        self.assertEqual(table.free_ranks, constituent_dims((0, 1), constituents))
        self.assertEqual(table.free_ranks, [2, 4, 2])
        self.assertEqual(cheeger_torsion(table), 1)

    def test_twisted_real_quadratic_coefficients_are_acyclic(self):
        table = cohomology(symd_rep('sqrt2', 'sqrt2_2', 1))
        self.assertEqual(table.free_ranks, [0, 0, 0, 0])


class PlusMinusSplitTests(SimpleTestCase):

    def test_quartic_split(self):
        split = pm_split_integral(cohomology(example_rep('quartic_trivial')))
        self.assertEqual(split.plus_total, 4)
        self.assertEqual(split.minus_total, 4)
        self.assertEqual(split.plus, (1, 2, 1, 0, 0, 0, 0))
        for q in range(7):
            self.assertEqual(split.plus[q], split.minus[6 - q])

    def test_filtration_from_the_complex(self):
        complex_ = total_complex(example_rep('quartic_trivial'))
        bare = smith_cohomology(complex_, filtration=False)
        with self.assertRaises(UnsupportedSignature):
            pm_split_integral(bare)
        split = pm_split_integral(bare, complex_)
        self.assertEqual(split, pm_split_integral(smith_cohomology(complex_)))
        self.assertEqual(split.plus, (1, 2, 1, 0, 0, 0, 0))

    def test_requires_one_complex_place(self):
        with self.assertRaises(UnsupportedSignature):
            pm_split_integral(cohomology(example_rep('sol_sqrt2')))
        with self.assertRaises(UnsupportedSignature):
            pm_split_integral(parse_table({'degrees': [{'free': 1}]}))


class CheegerTorsionTests(SimpleTestCase):

    def test_no_torsion(self):
        table = parse_table({'degrees': [{'free': 1}, {'free': 2}, {'free': 1}]})
        self.assertEqual(cheeger_torsion(table), 1)

    def test_single_torsion_in_degree_two(self):
        table = parse_table([{'free': 1}, {'free': 1}, {'free': 1, 'torsion': ['2']}, {'free': 1}])
        self.assertEqual(cheeger_torsion(table), Fraction(1, 2))

    def test_invariant_factors_are_canonicalised(self):
        table = parse_table([{'free': 0, 'torsion': [6, 4, 1]}])
        self.assertEqual(table.degrees[0].torsion, (2, 12))

    def test_malformed_table(self):
        with self.assertRaises(MalformedDocument):
            parse_table([{'free': -1}])


class RelativeTorsionTests(SimpleTestCase):

    def unit_covolumes(self, top):
        return parse_covolumes({'plus': {str(q): 1 for q in range(top)}})

    def test_trivial_data(self):
        outcome = relative_torsion_bound(2, [1] * 7, self.unit_covolumes(6))
        self.assertEqual(outcome['lhs_max'], 1)
        self.assertEqual(outcome['rhs'], 1)
        self.assertEqual(outcome['slack'], 0)
        self.assertTrue(outcome['holds'])

    def test_single_torsion_factor(self):
        relative = [1, 1, 3, 1, 1, 1, 1]
        outcome = relative_torsion_bound(2, relative, self.unit_covolumes(6))
        self.assertEqual(outcome['lhs_max'], 9)
        self.assertEqual(outcome['lhs_min'], 3)
        self.assertEqual(outcome['rhs'], 9)
        self.assertTrue(outcome['holds'])

    def test_missing_covolumes(self):
        with self.assertRaises(MissingData):
            relative_torsion_bound(2, [1] * 7, self.unit_covolumes(3))

    def test_covolume_bounds_scale_with_index(self):
        bounds = covolume_bounds(Integer(1), Integer(1), 4, 2)
        self.assertEqual(bounds['upper'], 4)
        self.assertEqual(bounds['lower'], Rational(1, 4))

    def test_gram_covolume(self):
        self.assertEqual(gram_covolume([[1, 1], [0, 1]]), 1)
        self.assertEqual(gram_covolume([[2, 0], [0, 3]]), 6)
        self.assertEqual(gram_covolume([[1, 1]]), sqrt(2))

    def test_positive_reals(self):
        self.assertEqual(parse_positive_real('sqrt(2)', 'vol'), sqrt(2))
        self.assertEqual(parse_positive_real('3/2', 'vol'), Rational(3, 2))
        with self.assertRaises(MalformedDocument):
            parse_positive_real('-1', 'vol')


class IntegralCommandTests(SimpleTestCase):

    def call(self, *args):
        out = StringIO()
        call_command('integral', *args, stdout=out, stderr=StringIO())
        return json.loads(out.getvalue())

    def test_cohom_from_rep_document(self):
        report = self.call('cohom', '--rep', data_path('reps', 'sol_sqrt3'))
        self.assertEqual(report['status'], 'pass')
        self.assertTrue(report['result']['wang_oracle']['agrees'])
        self.assertEqual(report['result']['cheeger_torsion']['exact'], '1/2')

    def test_cohom_from_symmetric_power(self):
        report = self.call(
            'cohom', '--field', field_path('gaussian'),
            '--level', data_path('levels', 'gaussian_1pi_cubed'), '--symd', '1',
        )
        self.assertEqual(report['result']['table']['free_ranks'], [2, 4, 2])
        self.assertEqual(report['result']['term_ranks'], [4, 8, 4])

    def test_cohom_reports_split(self):
        report = self.call('cohom', '--rep', data_path('reps', 'quartic_trivial'))
        self.assertEqual(report['result']['pm_split']['plus_total'], 4)
        self.assertEqual(report['result']['pm_split']['minus_total'], 4)

    def test_cohom_requires_input(self):
        with self.assertRaises(CommandError) as ctx:
            self.call('cohom')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_cheeger_command(self):
        report = self.call('cheeger', '--table', data_path('tables', 'sol_sqrt3'))
        self.assertEqual(report['result']['cheeger_torsion']['exact'], '1/2')

    def test_cheeger_with_inequality(self):
        report = self.call(
            'cheeger', '--table', data_path('tables', 'sol_sqrt3'),
            '--inequality', data_path('tables', 'trivial_inequality'),
        )
        bound = report['result']['relative_torsion_bound']
        self.assertTrue(bound['holds'])
        self.assertEqual(bound['slack']['exact'], '0')
        self.assertEqual(report['result']['covolume_bounds'][0]['upper']['exact'], '4')

    def test_missing_table_exits_with_input_error(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError) as ctx:
                self.call('cheeger', '--table', str(Path(tmp) / 'missing.json'))
        self.assertEqual(ctx.exception.returncode, 2)
