import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from core.error_handling import (
    DimensionOverflow,
    MalformedDocument,
    MissingL2Dim,
    NotAKernelMonomial,
    NotFredholm,
    UnsupportedSignatureWeight,
)

from .boundary import (
    L2_ACYCLIC_AND_BOUNDARY,
    MINUS,
    MIXED,
    PLUS,
    UNSUPPORTED,
    acyclicity_status,
    binomial_pairing,
    binomial_weighted_sum,
    boundary_cohomology,
    brute_force_kernel_S,
    constituent_dims,
    fredholm_and_l2b_kernel,
    ker_eth_S,
    kernel_S_graded_dims,
    l2_halfline_cohomology,
    line_bundle_chars,
    small_rank,
)
from .complex import build_dC, closed_form_kernel_dC, hodge_kernel_dC, weight_commutes
from .verification import verify_grid, weight_grid
from .weights import KostantMonomial, make_weight, parse_weight, weight_op


def section(k=(), l=(), lbar=(), a=(), b=(), bbar=()):
    return KostantMonomial(tuple(k), tuple(l), tuple(lbar), tuple(a), tuple(b), tuple(bbar))


class WeightTests(SimpleTestCase):

    def test_parse_weight_defaults_nbar_to_zero(self):
        weight = parse_weight({'m': [1], 'n': ["2"]})
        self.assertEqual(weight, make_weight((1,), (2,), (0,)))
        self.assertEqual(weight.signature, (1, 1))

    def test_parse_weight_rejects_mismatched_lengths(self):
        with self.assertRaises(MalformedDocument):
            parse_weight({'m': [], 'n': [1, 2], 'nbar': [0]})

    def test_weight_op_without_forms(self):
        weight = make_weight((1, 2), (3,), (1,))
        self.assertEqual(weight_op(weight, section(k=(0, 0), l=(0,), lbar=(0,), a=(0, 0), b=(0,), bbar=(0,))),
                         Fraction(7, 2))

    def test_weight_op_is_additive(self):
        weight = make_weight((1,), (2,), (0,))
        top = section(k=(1,), l=(2,), lbar=(0,), a=(1,), b=(1,), bbar=(1,))
        self.assertEqual(weight_op(weight, top), 3 + Fraction(3, 2) - 1 - 2)
        normal_only = KostantMonomial((0,), (0,), (0,), (0,), (0,), (0,), normal=True)
        self.assertEqual(weight_op(weight, normal_only), Fraction(3, 2))


class BuildComplexTests(SimpleTestCase):
    """Construcción de (C^*, d_C)"""

    def ranks(self, complex_):
        return [complex_.rank(q) for q in range(complex_.top_degree)]

    def test_real_place_with_normal_direction(self):
        weight = make_weight((1,))
        complex_ = build_dC((1, 0), weight, with_normal_form=True)
        self.assertEqual(complex_.total_dimension, 8)
        self.assertEqual(sum(self.ranks(complex_)), 2)
        plain = build_dC((1, 0), weight)
        self.assertEqual(plain.total_dimension, 4)
        self.assertEqual(sum(self.ranks(plain)), 1)

    def test_trivial_weight_has_zero_differential(self):
        for signature in ((1, 0), (0, 1), (2, 1)):
            r1, r2 = signature
            complex_ = build_dC(signature, make_weight((0,) * r1, (0,) * r2))
            self.assertTrue(all(not entries for entries in complex_.differentials))
            self.assertEqual(complex_.total_dimension, 2 ** (r1 + 2 * r2))

    def test_dimension_formula(self):
        self.assertEqual(build_dC((0, 1), make_weight((), (1,), (1,))).total_dimension, 16)
        self.assertEqual(build_dC((1, 1), make_weight((2,), (1,), (0,))).total_dimension, 3 * 2 * 8)

    def test_dimension_cap(self):
        with self.assertRaises(DimensionOverflow):
            build_dC((1, 1), make_weight((3,), (3,), (3,)), cap=100)

    def test_weight_is_preserved_by_the_differential(self):
        self.assertTrue(weight_commutes(build_dC((1, 1), make_weight((2,), (1,), (3,)))))


class HodgeKernelTests(SimpleTestCase):
    """El núcleo armónico coincide con la forma cerrada"""

    def test_examples(self):
        self.assertEqual(len(hodge_kernel_dC(build_dC((1, 0), make_weight((2,))))), 2)
        self.assertEqual(len(hodge_kernel_dC(build_dC((1, 1), make_weight((1,), (2,), (1,))))), 8)
        self.assertEqual(len(hodge_kernel_dC(build_dC((2, 1), make_weight((0, 0), (0,), (0,))))), 16)

    def test_kernel_dimension_is_independent_of_the_weight(self):
        for signature in ((1, 0), (0, 1), (2, 0), (1, 1)):
            r1, r2 = signature
            for weight in weight_grid(signature, 2):
                with self.subTest(signature=signature, weight=str(weight)):
                    kernel = hodge_kernel_dC(build_dC(signature, weight))
                    self.assertEqual(len(kernel), 2 ** r1 * 4 ** r2)

    def test_closed_form_deduplicates_zero_entries(self):
        self.assertEqual(len(closed_form_kernel_dC((2, 0), make_weight((0, 0)))), 4)


class CharacterTests(SimpleTestCase):

    def test_trivial_weight_has_zero_character(self):
        weight = make_weight((0,), (0,), (0,))
        self.assertTrue(line_bundle_chars((1, 1), weight, section((0,), (0,), (0,), (0,), (0,), (0,))).is_zero)

    def test_equal_real_weights(self):
        weight = make_weight((1, 1))
        self.assertTrue(line_bundle_chars((2, 0), weight, section(k=(1, 1), a=(0, 0))).is_zero)

    def test_unequal_real_weights(self):
        weight = make_weight((1, 0))
        chars = line_bundle_chars((2, 0), weight, section(k=(1, 0), a=(0, 0)))
        self.assertEqual(chars.coordinates, ('du_2',))
        self.assertEqual(chars.coefficients, (Fraction(-1, 2),))

    def test_monomial_outside_the_kernel_is_rejected(self):
        with self.assertRaises(NotAKernelMonomial):
            line_bundle_chars((1, 0), make_weight((2,)), section(k=(1,), a=(0,)))


class KernelSTests(SimpleTestCase):
    """Núcleo de ð_{S_η}: forma cerrada y enumeración"""

    def test_unequal_real_weights_give_trivial_kernel(self):
        record = ker_eth_S((2, 1), make_weight((1, 2), (0,), (0,)))
        self.assertFalse(record.nontrivial)
        self.assertEqual(record.total_dimension, 0)

    def test_trivial_weight(self):
        record = ker_eth_S((2, 1), make_weight((0, 0), (0,), (0,)))
        self.assertEqual(record.total_dimension, 8)
        self.assertEqual([sign for _, sign in record.sections], [PLUS, MINUS])

    def test_forced_flags_without_real_places(self):
        record = ker_eth_S((0, 2), make_weight((), (3, 1), (0, 0)))
        self.assertEqual(record.total_dimension, 4)
        [plus] = record.part(PLUS)
        [minus] = record.part(MINUS)
        self.assertEqual(plus.bbar, (1, 0))
        self.assertEqual(minus.bbar, (0, 1))
        self.assertEqual(minus.b, (1, 1))

    def test_entries_outside_the_pair_give_trivial_kernel(self):
        self.assertFalse(ker_eth_S((0, 2), make_weight((), (4, 1), (0, 0))).nontrivial)

    def test_unsupported_weights(self):
        with self.assertRaises(UnsupportedSignatureWeight):
            ker_eth_S((0, 1), make_weight((), (0,), (1,)))

    def test_closed_form_agrees_with_enumeration_on_grid(self):
        for signature in ((1, 0), (2, 0), (1, 1), (0, 2)):
            for weight in weight_grid(signature, 3 if sum(signature) < 3 else 2):
                if signature[0] == 0 and any(weight.nbar):
                    continue
                with self.subTest(signature=signature, weight=str(weight)):
                    record = ker_eth_S(signature, weight)
                    self.assertEqual(
                        {s for s, _ in record.sections},
                        set(brute_force_kernel_S(signature, weight)),
                    )

    def test_brute_force_handles_conjugate_weights(self):
        self.assertEqual(kernel_S_graded_dims((0, 1), make_weight((), (0,), (1,))), [1, 2, 1])
        total = constituent_dims((0, 1), [make_weight((), (1,), (0,)), make_weight((), (0,), (1,))])
        self.assertEqual(total, [2, 4, 2])


class FredholmTests(SimpleTestCase):

    def test_not_fredholm_without_real_places_and_weight(self):
        with self.assertRaises(NotFredholm):
            fredholm_and_l2b_kernel((0, 1), make_weight((), (0,), (0,)))

    def test_trivial_weight_kernel(self):
        kernel = fredholm_and_l2b_kernel((2, 1), make_weight((0, 0), (0,), (0,)))
        self.assertTrue(kernel.is_fredholm)
        self.assertEqual(kernel.dimension, 8)
        by_density = {e.x_half_density: e for e in kernel.elements}
        self.assertEqual(by_density[True].a, (0, 0))
        self.assertEqual(by_density[True].x_exponent, -2)
        self.assertEqual(by_density[False].a, (1, 1))
        self.assertEqual(by_density[False].x_exponent, -2)

    def test_trivial_kernel_is_fredholm(self):
        kernel = fredholm_and_l2b_kernel((2, 1), make_weight((1, 2), (0,), (0,)))
        self.assertTrue(kernel.is_fredholm)
        self.assertEqual(kernel.dimension, 0)

    def test_exponents_are_negative(self):
        for weight in weight_grid((1, 1), 2):
            kernel = fredholm_and_l2b_kernel((1, 1), weight)
            self.assertTrue(all(e.x_exponent < 0 for e in kernel.elements))


class BoundaryCohomologyTests(SimpleTestCase):
    """Cohomología del borde y su descomposición ±"""

    def test_single_complex_place(self):
        cohomology = boundary_cohomology((0, 1), make_weight((), (2,), (0,)))
        self.assertEqual(cohomology.dims, (1, 2, 1))
        self.assertEqual(cohomology.plus_part, (1, 1, 0))
        self.assertEqual(cohomology.minus_part, (0, 1, 1))

    def test_unequal_real_weights(self):
        cohomology = boundary_cohomology((2, 1), make_weight((1, 2), (0,), (0,)))
        self.assertFalse(cohomology.nontrivial)

    def test_duality_with_one_complex_place(self):
        for weight in (make_weight((0, 0), (2,), (0,)), make_weight((1, 1), (1,), (1,)), make_weight((0,), (0,), (2,))):
            r1 = len(weight.m)
            cohomology = boundary_cohomology((r1, 1), weight)
            self.assertTrue(cohomology.nontrivial)
            top = 2 * r1 + 2
            for q in range(top + 1):
                self.assertEqual(cohomology.plus_part[q], cohomology.minus_part[top - q])
                self.assertEqual(cohomology.dims[q], cohomology.plus_part[q] + cohomology.minus_part[q])

    def test_halfline_cohomology(self):
        self.assertTrue(any(l2_halfline_cohomology((2, 1), make_weight((0, 0), (2,), (0,)))))
        self.assertFalse(any(l2_halfline_cohomology((2, 1), make_weight((1, 2), (0,), (0,)))))
        record = ker_eth_S((0, 2), make_weight((), (1, 1), (0, 0)))
        plus = record.part(PLUS)
        self.assertEqual(len(plus), 2)
        self.assertTrue(all(len(set(s.bbar)) == 1 for s in plus))
        self.assertTrue(any(l2_halfline_cohomology((0, 2), make_weight((), (1, 1), (0, 0)))))


class StatusAndRankTests(SimpleTestCase):

    def test_acyclicity_status(self):
        self.assertEqual(acyclicity_status((1, 1), make_weight((0,), (1,), (0,))).status, L2_ACYCLIC_AND_BOUNDARY)
        self.assertEqual(acyclicity_status((1, 1), make_weight((0,), (0,), (0,))).status, MIXED)
        self.assertEqual(acyclicity_status((0, 1), make_weight((), (0,), (0,))).status, UNSUPPORTED)
        self.assertEqual(acyclicity_status((0, 2), make_weight((), (1, 0), (0, 0))).status, L2_ACYCLIC_AND_BOUNDARY)

    def test_small_rank(self):
        self.assertEqual(small_rank((2, 1), make_weight((0, 0), (2,), (0,))), 8)
        self.assertEqual(small_rank((1, 1), make_weight((0,), (0,), (0,)), l2_kernel_dim=3, cusp_count=2), 14)
        self.assertEqual(small_rank((2, 1), make_weight((1, 2), (0,), (0,)), l2_kernel_dim=5), 10)

    def test_small_rank_requires_l2_dimension_for_mixed_weights(self):
        with self.assertRaises(MissingL2Dim):
            small_rank((1, 1), make_weight((0,), (0,), (0,)))
        with self.assertRaises(MalformedDocument):
            small_rank((2, 1), make_weight((0, 0), (2,), (0,)), l2_kernel_dim=2)


class BinomialTests(SimpleTestCase):

    def test_examples(self):
        self.assertEqual(binomial_weighted_sum(0, 3), 0)
        self.assertEqual(binomial_weighted_sum(2, 1), -1)
        for p in range(6):
            self.assertEqual(binomial_weighted_sum(p, 1), (-1) ** (p + 1))

    def test_vanishing(self):
        for k in range(2, 9):
            for p in range(13):
                self.assertEqual(binomial_weighted_sum(p, k), 0)

    def test_pairing_cancels_for_even_degree(self):
        for d_K in (2, 4, 6):
            for p in range(d_K + 2):
                self.assertEqual(binomial_pairing(p, d_K), 0)


class VerifyGridTests(SimpleTestCase):

    def test_small_grids_pass(self):
        for r1, r2 in ((1, 0), (2, 0), (1, 1), (0, 1)):
            with self.subTest(r1=r1, r2=r2):
                report = verify_grid(r1, r2, 1)
                self.assertTrue(report['passed'], report['mismatches'])
                self.assertEqual(report['counters']['kernel_dC']['fail'], 0)
                self.assertEqual(report['counters']['binomial']['pass'], 1)

    @override_settings(CUSPTOR_THREADS=2)
    def test_process_pool_matches_serial_run(self):
        self.assertEqual(verify_grid(1, 1, 1, threads=2), verify_grid(1, 1, 1, threads=1))

    def test_unsupported_cells_are_skipped(self):
        report = verify_grid(0, 1, 1)
        self.assertEqual(report['weights'], 4)
        self.assertEqual(report['counters']['kernel_S']['skipped'], 2)
        self.assertEqual(report['counters']['l2b_kernel']['skipped'], 3)
        self.assertEqual(report['counters']['fredholm_gate']['pass'], 2)


class KostantCommandTests(SimpleTestCase):

    def test_verify_command(self):
        out = StringIO()
        call_command('kostant', 'verify', '--r1', '1', '--r2', '1', '--max-weight', '1',
                     stdout=out, stderr=StringIO())
        report = json.loads(out.getvalue())
        self.assertEqual(report['status'], 'pass')
        self.assertEqual(report['result']['weights'], 8)

    def run_boundary(self, document, *extra):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'weight.json'
            path.write_text(json.dumps(document))
            out = StringIO()
            call_command('kostant', 'boundary', '--weight', str(path), *extra, stdout=out, stderr=StringIO())
        return json.loads(out.getvalue())

    def test_boundary_command(self):
        report = self.run_boundary({'m': [], 'n': [2], 'nbar': [0]})
        result = report['result']
        self.assertEqual(result['boundary_cohomology']['dims'], [1, 2, 1])
        self.assertEqual(result['acyclicity']['status'], L2_ACYCLIC_AND_BOUNDARY)
        self.assertEqual(result['small_rank'], result['l2b_kernel']['dimension'])

    def test_boundary_command_with_l2_dimension(self):
        report = self.run_boundary({'m': [0], 'n': [0], 'nbar': [0]}, '--l2-dim', '3', '--cusps', '2')
        self.assertEqual(report['result']['small_rank'], 14)

    def test_boundary_command_reports_non_fredholm_weight(self):
        report = self.run_boundary({'m': [], 'n': [0], 'nbar': [0]})
        self.assertFalse(report['result']['l2b_kernel']['is_fredholm'])

    def test_unsupported_weight_exits_with_input_error(self):
        with self.assertRaises(CommandError) as ctx:
            self.run_boundary({'m': [], 'n': [0], 'nbar': [1]})
        self.assertEqual(ctx.exception.returncode, 2)
