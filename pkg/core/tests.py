import json
import tempfile
from fractions import Fraction
from io import StringIO
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from .complexes import FiniteComplex, sparse_product
from .error_handling import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_VERIFICATION,
    ErrorClassifier,
    MalformedDocument,
    MismatchWithClosedForm,
    NonDivisible,
    WrongSign,
    handle_errors,
    validate_data,
)
from .linalg import (
    canonical_invariant_factors,
    column_hnf,
    determinant,
    exterior_minor,
    identity,
    integer_inverse,
    integer_invariant_factors,
    mat_mul,
    mat_pow,
    nullspace_qq,
    rank_qq,
    solve_upper_triangular,
)
from .models import InformeEjecucion
from .parallel import parallel_map
from .runner import RunConfig, run
from .serialization import (
    exact_str,
    float_str,
    parse_exact_integer,
    parse_exact_rational,
    parse_integer_matrix,
    report_fingerprint,
    require_list,
)


def config_for(**overrides):
    values = {'subcommand': 'prueba', 'threads': 1, 'precision_bits': 64, 'enumeration_bound': 100}
    values.update(overrides)
    return RunConfig(**values)


class SerializationTests(SimpleTestCase):

    def test_exact_integers(self):
        self.assertEqual(parse_exact_integer('12'), 12)
        self.assertEqual(parse_exact_integer(-3), -3)
        for value in (1.5, True, '1.0', None):
            with self.assertRaises(ValueError):
                parse_exact_integer(value)

    def test_exact_rationals(self):
        self.assertEqual(parse_exact_rational('-0.05'), Fraction(-1, 20))
        self.assertEqual(parse_exact_rational('3/4'), Fraction(3, 4))
        with self.assertRaises(ValueError):
            parse_exact_rational(0.5)

    def test_exact_strings(self):
        self.assertEqual(exact_str(Fraction(6, 2)), '3')
        self.assertEqual(exact_str(Fraction(-1, 2)), '-1/2')
        self.assertTrue(float_str(Fraction(1, 2), 64).startswith('0.5'))

    def test_integer_matrices(self):
        self.assertEqual(parse_integer_matrix([[1, '2'], [3, 4]], 2, 2), [[1, 2], [3, 4]])
        with self.assertRaises(ValueError):
            parse_integer_matrix([[1, 2], [3]])
        with self.assertRaises(ValueError):
            parse_integer_matrix([[1, 2]], rows=2)
        with self.assertRaises(MalformedDocument):
            require_list('x', 'ideals')

    def test_fingerprint_ignores_timestamp(self):
        first = {'subcommand': 'a', 'generated_at': '2024-01-01', 'result': {'x': 1}}
        second = dict(first, generated_at='2025-06-30')
        self.assertEqual(report_fingerprint(first), report_fingerprint(second))
        self.assertNotEqual(report_fingerprint(first), report_fingerprint(dict(first, result={'x': 2})))


class LinalgTests(SimpleTestCase):

    def test_determinant_and_inverse(self):
        self.assertEqual(determinant([[2, 1], [1, 1]]), 1)
        self.assertEqual(integer_inverse([[1, 1], [0, 1]]), [[1, -1], [0, 1]])
        self.assertIsNone(integer_inverse([[2, 0], [0, 1]]))
        self.assertEqual(mat_pow([[1, 1], [0, 1]], -2), [[1, -2], [0, 1]])
        self.assertEqual(mat_mul([[1, 1], [0, 1]], [[1, -1], [0, 1]]), identity(2))

    def test_invariant_factors(self):
        self.assertEqual(integer_invariant_factors([[2, 0], [0, 4]]), [2, 4])
        self.assertEqual(integer_invariant_factors([[0, 2], [1, 0]]), [2])
        self.assertEqual(integer_invariant_factors([[0, 0], [0, 0]]), [])
        self.assertEqual(canonical_invariant_factors([6, 4]), [2, 12])

    def test_hermite_form_and_solve(self):
        h = column_hnf([[1, 2], [1, 0]])
        self.assertEqual(h, [[2, 1], [0, 1]])
        self.assertEqual(solve_upper_triangular(h, [3, 1]), [1, 1])
        self.assertIsNone(solve_upper_triangular(h, [1, 0]))
        with self.assertRaises(ValueError):
            column_hnf([[1, 2], [2, 4]])

    def test_ranks_and_kernels(self):
        self.assertEqual(rank_qq([[1, 2], [2, 4]]), 1)
        [vector] = nullspace_qq([[1, 1]])
        self.assertEqual(vector[0], -vector[1])
        self.assertEqual(exterior_minor(identity(3), (0, 1), (0, 1)), 1)
        self.assertEqual(exterior_minor(identity(3), (0, 1), (0, 2)), 0)


class FiniteComplexTests(SimpleTestCase):

    def test_sparse_product(self):
        left = {(0, 0): 2, (1, 0): 1}
        right = {(0, 0): 3, (0, 1): -1}
        self.assertEqual(sparse_product(left, right), {(0, 0): 6, (0, 1): -2, (1, 0): 3, (1, 1): -1})

    def test_square_zero_check(self):
        labels = (('a',), ('b',), ('c',))
        good = FiniteComplex(labels, ({(0, 0): 1}, {}))
        self.assertTrue(good.check_square_zero())
        self.assertEqual(good.dims, [1, 1, 1])
        self.assertEqual(good.rank(0), 1)
        bad = FiniteComplex(labels, ({(0, 0): 1}, {(0, 0): 1}))
        with self.assertRaises(MismatchWithClosedForm):
            bad.check_square_zero()


class ErrorHandlingTests(SimpleTestCase):

    def test_classifier_exit_codes(self):
        self.assertEqual(ErrorClassifier.get_error_details(FileNotFoundError('x'))['exit_code'], EXIT_INPUT)
        decode_error = json.JSONDecodeError('mal', '{', 0)
        self.assertEqual(ErrorClassifier.get_error_details(decode_error)['exit_code'], EXIT_INPUT)
        self.assertEqual(ErrorClassifier.get_error_details(WrongSign('signo'))['exit_code'], EXIT_INPUT)
        self.assertEqual(ErrorClassifier.get_error_details(NonDivisible('no'))['exit_code'], EXIT_VERIFICATION)
        details = ErrorClassifier.get_error_details(RuntimeError('boom'))
        self.assertEqual(details['exit_code'], EXIT_VERIFICATION)
        self.assertEqual(details['exception_type'], 'RuntimeError')

    def test_validate_data(self):
        self.assertTrue(validate_data({'a': 1}, required_fields=['a']))
        with self.assertRaises(MalformedDocument) as ctx:
            validate_data({'a': 0.5}, required_fields=['a', 'b'], validators={'a': parse_exact_rational})
        self.assertIn('b', ctx.exception.errors)
        self.assertIn('a', ctx.exception.errors)

    def test_handle_errors_sets_return_code(self):
        @handle_errors
        def handler():
            raise WrongSign('t2 con signo incorrecto')

        with self.assertRaises(CommandError) as ctx:
            handler()
        self.assertEqual(ctx.exception.returncode, EXIT_INPUT)


class RunnerTests(SimpleTestCase):

    def test_verified_run(self):
        code, envelope = run(config_for(), lambda config: ({'x': 1}, True))
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(envelope['status'], 'pass')
        self.assertEqual(envelope['result'], {'x': 1})

    def test_failed_verification(self):
        code, envelope = run(config_for(), lambda config: ({'x': 1}, False))
        self.assertEqual(code, EXIT_VERIFICATION)
        self.assertEqual(envelope['status'], 'fail')

    def test_input_error(self):
        def compute(config):
            raise WrongSign('t2 con signo incorrecto')

        code, envelope = run(config_for(), compute)
        self.assertEqual(code, EXIT_INPUT)
        self.assertEqual(envelope['status'], 'error')
        self.assertEqual(envelope['result']['error']['exception_type'], 'WrongSign')

    def test_invalid_configuration(self):
        code, _ = run(config_for(threads=0), lambda config: ({}, True))
        self.assertEqual(code, EXIT_INPUT)
        code, _ = run(config_for(inputs={'field': '/no/existe.json'}), lambda config: ({}, True))
        self.assertEqual(code, EXIT_INPUT)

    def test_replays_share_fingerprint(self):
        _, first = run(config_for(), lambda config: ({'x': [1, 2]}, True))
        _, second = run(config_for(), lambda config: ({'x': [1, 2]}, True))
        self.assertEqual(first['fingerprint'], second['fingerprint'])

    def test_defaults_come_from_settings(self):
        config = RunConfig.from_options('prueba', {'a': None}, {}, {})
        self.assertEqual(config.threads, settings.CUSPTOR_THREADS)
        self.assertEqual(config.precision_bits, settings.CUSPTOR_FLOAT_PRECISION)
        self.assertEqual(config.inputs, {})
        self.assertNotIn('output', config.to_json())

    @override_settings(CUSPTOR_THREADS=1)
    def test_threads_never_exceed_the_setting(self):
        config = RunConfig.from_options('prueba', {}, {}, {'threads': 64})
        self.assertEqual(config.threads, 1)

    @override_settings(CUSPTOR_THREADS=4)
    def test_threads_below_the_setting_are_kept(self):
        config = RunConfig.from_options('prueba', {}, {}, {'threads': 2})
        self.assertEqual(config.threads, 2)


class ParallelTests(SimpleTestCase):

    def test_single_thread_keeps_order(self):
        self.assertEqual(parallel_map(abs, [-1, 2, -3], threads=1), [1, 2, 3])

    @override_settings(CUSPTOR_THREADS=1)
    def test_width_is_capped_by_the_setting(self):
        # Una lambda no se puede serializar: solo funciona dentro del proceso
        self.assertEqual(parallel_map(lambda x: 2 * x, [1, 2, 3], threads=8), [2, 4, 6])

    @override_settings(CUSPTOR_THREADS=2)
    def test_process_pool_keeps_order(self):
        self.assertEqual(parallel_map(abs, [-1, 2, -3, 4, -5], threads=2), [1, 2, 3, 4, 5])


class ArchiveTests(TestCase):

    def test_archive_stores_report(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'table.json'
            path.write_text(json.dumps([{'free': 1}, {'free': 1, 'torsion': ['3']}]))
            call_command('integral', 'cheeger', '--table', str(path), '--archive',
                         stdout=StringIO(), stderr=StringIO())
        informe = InformeEjecucion.objects.get()
        self.assertEqual(informe.estado, 'pass')
        self.assertEqual(informe.codigo_salida, 0)
        self.assertEqual(informe.resultado['result']['cheeger_torsion']['exact'], '3')
        self.assertEqual(informe.configuracion['subcommand'], 'integral cheeger')
        self.assertIn('integral cheeger', str(informe))

    def test_json_properties(self):
        informe = InformeEjecucion(subcomando='x', estado='pass', huella='0' * 64)
        informe.configuracion = {'b': 1}
        self.assertEqual(informe.configuracion, {'b': 1})
        informe._resultado = 'no es json'
        self.assertEqual(informe.resultado, {})
