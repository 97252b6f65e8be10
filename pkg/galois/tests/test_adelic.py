import random

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from galois.adelic import (
    adelic_image,
    cartan_image_glued,
    conjugation_lift,
    index_at,
    levels_of_definition,
    minimal_level,
    simplest_adelic_image,
    twist_family,
)
from galois.cartan import (
    a_subgroup,
    build_cartan,
    build_normalizer,
    c_eps,
    cartan_matrix,
    cartan_part,
    delta_phi,
    det_fixed_subgroup,
    squares_cartan_subgroup,
)
from galois.cmdata import simplest_ell_adic_image, simplest_record
from galois.curves import WeierstrassCurve, record_curve
from galois.exceptions import BadLevel, DomainError, NotCM, NotSimplest, Unsupported
from galois.matgl2 import Mat2, SubgroupModN, extend_by_normalizing, is_conjugate, reduce_subgroup
from galois.verify import entanglement_check

from .utils import labelled_curve

P7 = delta_phi(-7, 1)
CORPUS_LABELS = ['49.a2', '121.b1', '32.a2', '256.d2']
CORPUS_TWISTS = [1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 7, -7, 10, -10, 11, -11]


def glued_441():
    H_ell = squares_cartan_subgroup(P7, 7, 1)
    H_dag = det_fixed_subgroup(build_cartan(P7, 3), a_subgroup(-3, 3))
    return H_ell, H_dag


class SimplestImageTests(SimpleTestCase):
    def test_49a2(self):
        result = adelic_image(record_curve(simplest_record('49.a2')), label='49.a2')
        self.assertEqual((result.level, result.index, result.minimal_level), (7, 2, 7))
        self.assertTrue(result.is_simplest)
        self.assertEqual(result.twist.N, 1)
        squares = {
            cartan_matrix(a, b, P7, 7).key
            for a in range(7) for b in range(7)
            if (a + 4 * b) % 7 in {1, 2, 4}
        }
        expected = extend_by_normalizing(SubgroupModN(7, elements=squares), Mat2(1, 0, -1, -1, 7))
        self.assertEqual(result.image, expected)

    def test_maximal_indices(self):
        for label, level, index in (('64.a4', 16, 4), ('27.a4', 27, 6), ('256.d2', 16, 2)):
            with self.subTest(label=label):
                result = simplest_adelic_image(record_curve(simplest_record(label)))
                self.assertEqual((result.level, result.index), (level, index))
                self.assertEqual(result.level % result.minimal_level, 0)
                self.assertEqual(result.minimal_level % result.cm.ell, 0)

    def test_not_simplest(self):
        with self.assertRaises(NotSimplest):
            simplest_adelic_image(labelled_curve('441.c2'))


class GlueTests(SimpleTestCase):
    def test_441c2_cartan_image(self):
        H_ell, H_dag = glued_441()
        glued = cartan_image_glued(H_ell, H_dag, P7, 21)
        self.assertEqual(glued.order, 168)
        self.assertEqual(reduce_subgroup(glued, 7), build_cartan(P7, 7))
        self.assertEqual(reduce_subgroup(glued, 3), build_cartan(P7, 3))

    @settings(max_examples=10, deadline=None)
    @given(st.integers(0, 2 ** 32))
    def test_every_candidate_pair_gives_the_same_group(self, seed):
        H_ell, H_dag = glued_441()
        first = cartan_image_glued(H_ell, H_dag, P7, 21, sample_pairs=0)
        again = cartan_image_glued(H_ell, H_dag, P7, 21, sample_pairs=10, rng=random.Random(seed))
        self.assertEqual(first, again)

    def test_rejects_full_cartan(self):
        _, H_dag = glued_441()
        with self.assertRaises(DomainError):
            cartan_image_glued(build_cartan(P7, 7), H_dag, P7, 21)
        H_ell, H_dag = glued_441()
        with self.assertRaises(BadLevel):
            cartan_image_glued(H_ell, H_dag, P7, 42)


class ConjugationLiftTests(SimpleTestCase):
    def test_441c2_lift(self):
        c = Mat2(1, 0, -1, -1, 7)
        self.assertEqual(conjugation_lift(c, -3, 21, P7), Mat2(20, 0, 1, 1, 21))

    def test_trivial_twist(self):
        c = Mat2(1, 0, -1, -1, 7)
        self.assertEqual(conjugation_lift(c, 1, 7, P7), c)

    def test_rejects_cartan_elements(self):
        with self.assertRaises(DomainError):
            conjugation_lift(Mat2.identity(7), -3, 21, P7)

    def test_group_does_not_depend_on_the_lift(self):
        H_ell, H_dag = glued_441()
        glued = cartan_image_glued(H_ell, H_dag, P7, 21)
        c = Mat2(1, 0, -1, -1, 7)
        other = c_eps(P7, 1, 3) * cartan_matrix(0, 1, P7, 3)
        first = extend_by_normalizing(glued, conjugation_lift(c, -3, 21, P7))
        second = extend_by_normalizing(glued, conjugation_lift(c, -3, 21, P7, lift_at_dagger=other))
        self.assertEqual(first, second)


class TwistImageTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.results = {label: adelic_image(labelled_curve(label), label=label) for label in ('441.c2', '288.d1', '784.f3')}

    def test_441c2(self):
        result = self.results['441.c2']
        self.assertEqual((result.level, result.index, result.minimal_level), (21, 2, 21))
        self.assertEqual((result.params.delta, result.params.phi), (-2, 1))
        self.assertEqual(result.image.order, 336)
        self.assertEqual((result.twist.N, result.twist.N_dagger, result.twist.simplest_label), (-3, 3, '49.a2'))
        self.assertEqual(result.generators[0], (20, 0, 1, 1))

    def test_441c2_matches_the_known_group(self):
        known = SubgroupModN(21, [Mat2(-1, 0, 1, 1, 21), Mat2(1, 10, 1, 12, 21)])
        self.assertEqual(known.order, 336)
        self.assertIsNotNone(is_conjugate(known, self.results['441.c2'].image))

    def test_288d1(self):
        result = self.results['288.d1']
        self.assertEqual((result.level, result.index, result.minimal_level), (48, 2, 12))
        self.assertEqual((result.twist.N, result.twist.N_dagger, result.twist.simplest_label), (-3, 3, '32.a2'))
        self.assertEqual(levels_of_definition(result), [12, 24, 48])

    def test_784f3(self):
        result = self.results['784.f3']
        self.assertEqual((result.level, result.index, result.minimal_level), (28, 2, 14))
        self.assertEqual(levels_of_definition(result), [14, 28])
        self.assertEqual(minimal_level(result), 14)

    def test_factor_levels_are_full(self):
        for label, (L, D) in (('441.c2', (7, 3)), ('288.d1', (16, 3)), ('784.f3', (7, 4))):
            with self.subTest(label=label):
                result = self.results[label]
                self.assertEqual(index_at(result, L), 1)
                self.assertEqual(index_at(result, D), 1)
        with self.assertRaises(BadLevel):
            index_at(self.results['441.c2'], 5)

    def test_cartan_index_matches_normalizer_index(self):
        for result in self.results.values():
            cartan = build_cartan(result.params, result.level)
            self.assertEqual(cartan.order // cartan_part(result.image, result.params).order, result.index)

    def test_twist_coherence(self):
        minus_one = Mat2(-1, 0, 0, -1, 7)
        lhs = extend_by_normalizing(reduce_subgroup(self.results['441.c2'].image, 7), minus_one)
        rhs = extend_by_normalizing(simplest_ell_adic_image('49.a2'), minus_one)
        self.assertEqual(lhs, rhs)
        self.assertEqual(lhs, build_normalizer(P7, 7)[0])

    def test_payload(self):
        payload = self.results['441.c2'].to_payload()
        self.assertEqual(payload['label'], '441.c2')
        self.assertEqual(payload['cm'], {'Delta_K': -7, 'f': 1, 'disc': -7, 'j': -3375, 'ell': 7})
        self.assertEqual(payload['twist'], {'N': -3, 'N_dagger': 3, 'simplest_label': '49.a2'})
        self.assertEqual(payload['generators'][0], [20, 0, 1, 1])


class OutOfScopeTests(SimpleTestCase):
    def test_not_cm(self):
        with self.assertRaises(NotCM):
            adelic_image(WeierstrassCurve.from_short(1, 1))

    def test_unsupported(self):
        with self.assertRaises(Unsupported):
            adelic_image(WeierstrassCurve.from_short(0, 2))


class TwistCorpusTests(SimpleTestCase):
    def test_corpus(self):
        corpus = [(label, N, E) for label in CORPUS_LABELS for N, E in twist_family(label, CORPUS_TWISTS)]
        self.assertGreaterEqual(len(corpus), 30)
        for label, N, E in corpus:
            with self.subTest(label=label, N=N):
                result = adelic_image(E)
                ell = result.cm.ell
                self.assertEqual(result.index, 2)
                self.assertEqual(result.level % result.minimal_level, 0)
                self.assertEqual(result.minimal_level % ell, 0)
                if result.twist.N == 1:
                    self.assertTrue(result.is_simplest)
                    continue
                self.assertEqual(abs(result.twist.N), abs(N))
                record = simplest_record(result.twist.simplest_label)
                self.assertEqual(result.level, record.level * result.twist.N_dagger)
                self.assertEqual(index_at(result, result.twist.N_dagger), 1)
                self.assertEqual(index_at(result, result.level // result.twist.N_dagger), 1)

    def test_twists_of_the_largest_discriminant(self):
        expected = {-1: 652, 2: 1304, -3: 489, 5: 815}
        family = twist_family('26569.a2', list(expected))
        self.assertEqual([N for N, _ in family], list(expected))
        for N, E in family:
            with self.subTest(N=N):
                result = adelic_image(E)
                self.assertEqual((result.twist.N, result.twist.simplest_label), (N, '26569.a2'))
                self.assertEqual((result.level, result.index), (expected[N], 2))
                self.assertEqual(entanglement_check(E, result.twist, result).pattern, (2, 1, 1))
