import tempfile
from fractions import Fraction
from itertools import combinations
from pathlib import Path

from django.test import SimpleTestCase

from galois.cartan import build_normalizer
from galois.cmdata import (
    EXPECTED_CLASS_SIZES,
    ORDERS,
    all_simplest_curves,
    cm_order_for_disc,
    load_table,
    lookup_cm_order,
    parse_table,
    short_j,
    simplest_curves_for,
    simplest_ell_adic_image,
    simplest_record,
    validate_record,
)
from galois.conf import settings
from galois.exceptions import DataIntegrityError, DomainError
from galois.matgl2 import distinguish, subgroup_index


class OrderTests(SimpleTestCase):
    def test_thirteen_orders(self):
        self.assertEqual(len(ORDERS), 13)
        self.assertEqual({o.d_E for o in ORDERS if o.j == 0}, {6})
        self.assertEqual({o.d_E for o in ORDERS if o.j == 1728}, {4})

    def test_lookup(self):
        self.assertEqual(lookup_cm_order(-3375).disc, -7)
        self.assertEqual(lookup_cm_order(Fraction(-884736)).disc, -19)
        self.assertEqual(lookup_cm_order(-262537412640768000).ell, 163)
        self.assertIsNone(lookup_cm_order(Fraction(1, 2)))
        self.assertIsNone(lookup_cm_order(5))

    def test_disc_lookup(self):
        self.assertEqual(cm_order_for_disc(-27).f, 3)
        with self.assertRaises(DomainError):
            cm_order_for_disc(-5)

    def test_short_j(self):
        self.assertEqual(short_j(-1715, 33614), -3375)
        self.assertEqual(short_j(1, 0), 1728)
        with self.assertRaises(DomainError):
            short_j(-3, 2)


class TableTests(SimpleTestCase):
    def test_forty_curves(self):
        records = all_simplest_curves()
        self.assertEqual(len(records), 40)
        sizes = {}
        for record in records:
            sizes[record.disc] = sizes.get(record.disc, 0) + 1
        self.assertEqual(sizes, EXPECTED_CLASS_SIZES)

    def test_class_listing(self):
        self.assertEqual([r.label for r in simplest_curves_for(-7)], ['49.a2', '49.a4'])
        with self.assertRaises(DomainError):
            simplest_curves_for(-5)

    def test_unknown_label(self):
        with self.assertRaises(DomainError):
            simplest_record('11.a1')

    def test_images_have_maximal_index(self):
        for record in all_simplest_curves():
            with self.subTest(label=record.label):
                order = cm_order_for_disc(record.disc)
                normalizer, _ = build_normalizer(order.params, record.level)
                image = simplest_ell_adic_image(record.label)
                self.assertEqual(subgroup_index(normalizer, image), order.d_E)

    def test_curves_of_a_class_have_distinct_images(self):
        for disc in EXPECTED_CLASS_SIZES:
            for first, second in combinations(simplest_curves_for(disc), 2):
                with self.subTest(first=first.label, second=second.label):
                    G = simplest_ell_adic_image(first.label)
                    H = simplest_ell_adic_image(second.label)
                    verdict = distinguish(G, H)
                    self.assertNotEqual(verdict.verdict, 'conjugate')
                    if first.level <= 16:
                        self.assertEqual(verdict.verdict, 'not_conjugate')


class ValidationTests(SimpleTestCase):
    def test_parse_errors(self):
        with self.assertRaises(DataIntegrityError):
            parse_table('49.a2 -7 7 1 -1715 33614 49 phi0')
        with self.assertRaises(DataIntegrityError):
            parse_table('49-a2 -7 7 1 -1715 33614 49 phi0 1,0,0,1')
        with self.assertRaises(DataIntegrityError):
            parse_table('49.a2 -7 7 1 -1715 33614 49 polar 1,0,0,1')
        with self.assertRaises(DataIntegrityError):
            parse_table('49.a2 -7 7 1 -1715 33614 49 phi0 1,0,0')

    def test_record_invariants(self):
        record = simplest_record('49.a2')
        validate_record(record)
        for update in ({'n': 2}, {'B': 33615}, {'ell': 3}, {'conductor': 48}, {'disc': -5}):
            with self.subTest(update=update):
                with self.assertRaises(DataIntegrityError):
                    validate_record(record.model_copy(update=update), check_groups=False)

    def test_wrong_index_is_rejected(self):
        text = Path(settings.CM_ADELIC_DATA_FILE).read_text()
        # scalar 3 generates every unit mod 7, so the image becomes the whole normalizer
        corrupted = text.replace('2,0,0,2;1,1,0,1;1,0,0,6', '3,0,0,3;1,1,0,1;1,0,0,6', 1)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'simplest_curves.txt'
            path.write_text(corrupted)
            with self.assertRaises(DataIntegrityError):
                load_table(path)

    def test_missing_rows_are_rejected(self):
        text = Path(settings.CM_ADELIC_DATA_FILE).read_text()
        truncated = '\n'.join(line for line in text.splitlines() if not line.startswith('49.a4'))
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / 'simplest_curves.txt'
            path.write_text(truncated)
            with self.assertRaises(DataIntegrityError):
                load_table(path, check_groups=False)
