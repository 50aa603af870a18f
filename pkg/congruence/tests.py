import itertools
import json
import math
from io import StringIO

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from core.error_handling import MalformedDocument, NotNested, TooLarge
from numberfield.ideals import enumerate_ideals, ideal_contains, ideal_product, principal_ideal, unit_ideal
from numberfield.residues import residue_ring
from numberfield.testing import example_field, field_path

from .cusps import (
    check_fiber_identity,
    cusp_count,
    cusp_fiber_count,
    cusp_set,
    infinity_cusp,
    negligibility_sums,
    parabolic_index,
    parabolic_stabilizer,
)
from .levels import index, make_level, sl2_order_mod


def level_path(name):
    return str(settings.CUSPTOR_DATA_DIR / 'levels' / f'{name}.json')


def gaussian_power(field, k):
    """Ideal (1 + i)^k"""
    ideal = unit_ideal(field)
    prime = principal_ideal(field, (1, 1))
    for _ in range(k):
        ideal = ideal_product(field, ideal, prime)
    return ideal


def brute_force_sl2(ring):
    """Cuenta las matrices (a b; c d) de O/n con ad − bc = 1."""
    one = ring.one
    total = 0
    for a, b, c, d in itertools.product(ring.elements, repeat=4):
        if ring.sub(ring.mul(a, d), ring.mul(b, c)) == one:
            total += 1
    return total


class SL2OrderTests(SimpleTestCase):
    """Órdenes de SL(2, O/n) por enumeración y por fórmula"""

    def test_small_orders(self):
        gaussian, sqrt2 = example_field('gaussian'), example_field('sqrt2')
        self.assertEqual(sl2_order_mod(gaussian, principal_ideal(gaussian, (1, 1))), 6)
        self.assertEqual(sl2_order_mod(gaussian, unit_ideal(gaussian)), 1)
        self.assertEqual(sl2_order_mod(sqrt2, principal_ideal(sqrt2, (0, 1))), 6)

    def test_enumeration_matches_brute_force(self):
        field = example_field('gaussian')
        for ideal in (principal_ideal(field, (2, 0)), principal_ideal(field, (1, 2))):
            with self.subTest(norm=ideal.norm):
                self.assertEqual(sl2_order_mod(field, ideal), brute_force_sl2(residue_ring(field, ideal)))

    def test_formula_path_agrees_and_extends_bound(self):
        field = example_field('gaussian')
        two = principal_ideal(field, (2, 0))
        self.assertEqual(sl2_order_mod(field, two, factorization=((2, 2),)), 48)
        self.assertEqual(sl2_order_mod(field, two, factorization=((2, 2),), bound=3), 48)
        with self.assertRaises(TooLarge):
            sl2_order_mod(field, two, bound=3)

    def test_inconsistent_factorization_is_rejected(self):
        field = example_field('gaussian')
        with self.assertRaises(MalformedDocument):
            make_level(field, principal_ideal(field, (2, 0)), factorization=((2, 3),))


class IndexTests(SimpleTestCase):

    def test_examples(self):
        gaussian, sqrt2 = example_field('gaussian'), example_field('sqrt2')
        n1 = make_level(gaussian, principal_ideal(gaussian, (1, 1)))
        n2 = make_level(gaussian, principal_ideal(gaussian, (2, 0)))
        self.assertEqual(index(n1, n1), 1)
        self.assertEqual(index(n1, n2), 48 // 6)
        whole = make_level(sqrt2, unit_ideal(sqrt2))
        self.assertEqual(index(whole, make_level(sqrt2, principal_ideal(sqrt2, (0, 1)))), 6)

    def test_index_is_multiplicative_along_chains(self):
        field = example_field('gaussian')
        levels = [make_level(field, gaussian_power(field, k)) for k in (1, 2, 4)]
        self.assertEqual(
            index(levels[0], levels[2]),
            index(levels[0], levels[1]) * index(levels[1], levels[2]),
        )

    def test_levels_must_be_nested(self):
        field = example_field('gaussian')
        with self.assertRaises(NotNested):
            index(make_level(field, gaussian_power(field, 2)), make_level(field, gaussian_power(field, 1)))


class CuspTests(SimpleTestCase):
    """Cúspides, índices parabólicos y cúspides por fibra"""

    def test_cusp_counts(self):
        gaussian, sqrt2 = example_field('gaussian'), example_field('sqrt2')
        self.assertEqual(len(cusp_set(make_level(gaussian, unit_ideal(gaussian)))), 1)
        self.assertEqual(len(cusp_set(make_level(sqrt2, unit_ideal(sqrt2)))), 1)
        two = make_level(gaussian, principal_ideal(gaussian, (2, 0)))
        cusps = cusp_set(two)
        self.assertEqual(len(cusps), 6)
        self.assertEqual(len(cusps), cusp_count(two))
        self.assertTrue(all(c.stabilizer_order == 4 * 2 for c in cusps))

    def test_class_number_two_doubles_the_cusps(self):
        field = example_field('sqrt_minus5')
        self.assertEqual(len(cusp_set(make_level(field, unit_ideal(field)))), 2)

    def test_parabolic_index_examples(self):
        gaussian, sqrt2 = example_field('gaussian'), example_field('sqrt2')
        n3 = make_level(gaussian, gaussian_power(gaussian, 3))
        n4 = make_level(gaussian, gaussian_power(gaussian, 4))
        self.assertEqual(parabolic_index(n3, n3, infinity_cusp(n3)), 1)
        self.assertEqual(parabolic_index(n3, n4, infinity_cusp(n3)), 2)
        root2 = make_level(sqrt2, principal_ideal(sqrt2, (0, 1)))
        two = make_level(sqrt2, principal_ideal(sqrt2, (2, 0)))
        self.assertEqual(parabolic_index(root2, two, infinity_cusp(root2)), 2 * 2)

    def test_fiber_count_examples(self):
        field = example_field('gaussian')
        n1 = make_level(field, principal_ideal(field, (1, 1)))
        n2 = make_level(field, principal_ideal(field, (2, 0)))
        self.assertEqual(cusp_fiber_count(n1, n1, infinity_cusp(n1)), 1)
        self.assertEqual(cusp_fiber_count(n1, n2, infinity_cusp(n1)), 2)
        direct, mismatches = check_fiber_identity(n1, n2)
        self.assertEqual(mismatches, [])
        self.assertEqual(sum(count for _, count in direct), len(cusp_set(n2)))

    def test_fiber_identity_for_all_small_levels(self):
        for name in ('gaussian', 'sqrt2'):
            field = example_field(name)
            ideals = enumerate_ideals(field, 64)
            whole = make_level(field, unit_ideal(field))
            for ideal in ideals[1:]:
                level2 = make_level(field, ideal)
                parents = [whole]
                proper = [i for i in ideals[1:] if i != ideal and ideal_contains(i, ideal)]
                if proper:
                    parents.append(make_level(field, proper[0]))
                for level1 in parents:
                    with self.subTest(field=name, n1=level1.norm, n2=ideal.to_json()):
                        _, mismatches = check_fiber_identity(level1, level2)
                        self.assertEqual(mismatches, [])

    def test_parabolic_stabilizer_units_are_congruent_to_one(self):
        field = example_field('sqrt2')
        whole = make_level(field, unit_ideal(field))
        self.assertEqual(parabolic_stabilizer(whole, infinity_cusp(whole)).unit_generators, ((1, 1),))
        two = make_level(field, principal_ideal(field, (2, 0)))
        data = parabolic_stabilizer(two, infinity_cusp(two))
        self.assertEqual(data.unit_generators, ((3, 2),))
        self.assertEqual(data.lattice, two.ideal)
        self.assertTrue(data.has_torsion)
        three = make_level(field, principal_ideal(field, (3, 0)))
        ring = residue_ring(field, three.ideal)
        data = parabolic_stabilizer(three, infinity_cusp(three))
        self.assertEqual(data.unit_rank, field.unit_rank)
        self.assertEqual(data.lattice_rank, field.degree)
        for unit in data.unit_generators:
            self.assertEqual(ring.reduce(unit), ring.one)
            self.assertEqual(abs(field.norm(unit)), 1)


class NegligibilityTests(SimpleTestCase):
    """Sumas sobre las cúspides a lo largo de la torre (1 + i)^k"""

    def setUp(self):
        self.field = example_field('gaussian')
        self.level1 = make_level(self.field, gaussian_power(self.field, 3), torsion_free_flag=True)

    def test_single_term(self):
        [term] = negligibility_sums(self.level1, [self.level1.ideal])
        self.assertEqual(term.cusp_sum, len(cusp_set(self.level1)))
        self.assertEqual(term.log_sum, 0)

    def test_gaussian_tower(self):
        ideals = [gaussian_power(self.field, k + 2) for k in range(1, 5)]
        terms = negligibility_sums(self.level1, ideals)
        cusps = len(cusp_set(self.level1))
        self.assertEqual(cusps, 12)
        self.assertEqual([t.parabolic_indices for t in terms], [(1,), (2,), (4,), (8,)])
        sums = [t.cusp_sum for t in terms]
        self.assertTrue(all(a > b for a, b in zip(sums, sums[1:])))
        self.assertLess(sums[-1], sums[0] / 4)
        logs = [float(t.log_sum) for t in terms]
        for t, value in zip(terms, logs):
            self.assertLessEqual(value, cusps / math.e + 1e-12)
            self.assertGreaterEqual(value, 0)
        # log(t)/t decrece para t ≥ 3
        self.assertGreater(logs[2], logs[3])

    @override_settings(CUSPTOR_THREADS=2)
    def test_process_pool_matches_serial_run(self):
        ideals = [gaussian_power(self.field, k + 2) for k in range(1, 5)]
        pooled = negligibility_sums(self.level1, ideals, threads=2)
        self.assertEqual(pooled, negligibility_sums(self.level1, ideals, threads=1))
        self.assertEqual([t.parabolic_indices for t in pooled], [(1,), (2,), (4,), (8,)])

    def test_sequence_must_be_decreasing(self):
        with self.assertRaises(NotNested):
            negligibility_sums(self.level1, [gaussian_power(self.field, 4), gaussian_power(self.field, 3)])


class CongruenceCommandTests(SimpleTestCase):

    def run_command(self, *args):
        out = StringIO()
        call_command(*args, stdout=out, stderr=StringIO())
        return json.loads(out.getvalue())

    def test_cusps_command(self):
        report = self.run_command('cusps', field_path('gaussian'), '--level', level_path('gaussian_2'))
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(report['result']['cusp_count'], 6)
        self.assertEqual(report['result']['sl2_order'], 48)

    def test_index_command(self):
        report = self.run_command(
            'index', field_path('gaussian'),
            '--level1', level_path('gaussian_1pi'), '--level2', level_path('gaussian_2'),
        )
        self.assertEqual(report['result']['index'], 8)
        self.assertEqual(report['result']['parabolic_index'], 4)
        self.assertEqual(report['result']['cusp_fiber_count'], 2)
        self.assertEqual(report['result']['direct_enumeration']['mismatches'], [])

    def test_index_command_rejects_unnested_levels(self):
        with self.assertRaises(CommandError) as ctx:
            call_command(
                'index', field_path('sqrt2'),
                '--level1', level_path('sqrt2_2'), '--level2', level_path('sqrt2_root2'),
                stdout=StringIO(), stderr=StringIO(),
            )
        self.assertEqual(ctx.exception.returncode, 2)

    def test_negligibility_command(self):
        report = self.run_command(
            'negligibility', field_path('gaussian'),
            '--level', level_path('gaussian_1pi_cubed'), '--sequence', level_path('gaussian_tower'),
        )
        self.assertEqual(report['status'], 'pass')
        self.assertEqual([t['cusp_sum']['exact'] for t in report['result']['terms']], ['12', '6', '3', '3/2'])
