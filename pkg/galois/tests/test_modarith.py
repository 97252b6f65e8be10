from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from galois.exceptions import BadLevel, CRTConflict, DomainError, NotAUnit
from galois.modarith import (
    Residue,
    SquarefreeInt,
    crt_coefficients,
    crt_pair,
    fundamental_discriminant,
    is_squarefree,
    kronecker,
    n_dagger,
    n_exponent,
    squarefree_class,
    squarefree_part,
    units,
)

FUNDAMENTAL = [-3, -4, -7, -8, -11, -15, -19, -20, -24, 5, 8, 12, 13, 21]


class ResidueTests(SimpleTestCase):
    def test_values_are_reduced(self):
        self.assertEqual(Residue(-1, 7).value, 6)
        self.assertEqual(Residue(3, 7) + Residue(5, 7), Residue(1, 7))
        self.assertEqual(2 * Residue(4, 7), Residue(1, 7))

    def test_inverse(self):
        self.assertEqual(Residue(3, 7).inverse(), Residue(5, 7))
        self.assertEqual(Residue(3, 7) ** -1, Residue(5, 7))
        with self.assertRaises(NotAUnit):
            Residue(2, 4).inverse()

    def test_mixed_moduli_rejected(self):
        with self.assertRaises(BadLevel):
            Residue(1, 3) + Residue(1, 5)

    def test_reduce(self):
        self.assertEqual(Residue(17, 21).reduce(7), Residue(3, 7))
        with self.assertRaises(BadLevel):
            Residue(1, 21).reduce(5)


class SquarefreeTests(SimpleTestCase):
    def test_squarefree_part(self):
        self.assertEqual(squarefree_part(72), (2, 6))
        self.assertEqual(squarefree_part(-50), (-2, 5))
        self.assertEqual(squarefree_part(1), (1, 1))
        with self.assertRaises(DomainError):
            squarefree_part(0)

    def test_squarefree_class_of_rationals(self):
        self.assertEqual(squarefree_class(Fraction(-1, 3)), -3)
        self.assertEqual(squarefree_class(Fraction(8, 27)), 6)
        self.assertEqual(squarefree_class(Fraction(9, 4)), 1)

    def test_n_dagger(self):
        self.assertEqual(n_dagger(1), 1)
        self.assertEqual(n_dagger(-3), 3)
        self.assertEqual(n_dagger(5), 5)
        self.assertEqual(n_dagger(-7), 7)
        self.assertEqual(n_dagger(-1), 4)
        self.assertEqual(n_dagger(2), 8)
        self.assertEqual(n_dagger(-10), 40)
        with self.assertRaises(DomainError):
            n_dagger(4)

    def test_squarefree_int(self):
        self.assertEqual(SquarefreeInt(-1).dagger, 4)
        self.assertEqual(SquarefreeInt(-1).discriminant, -4)
        with self.assertRaises(DomainError):
            SquarefreeInt(12)

    def test_fundamental_discriminant(self):
        self.assertEqual(fundamental_discriminant(-1), -4)
        self.assertEqual(fundamental_discriminant(-7), -7)
        self.assertEqual(fundamental_discriminant(2), 8)
        self.assertEqual(fundamental_discriminant(1), 1)


class KroneckerTests(SimpleTestCase):
    def test_known_values(self):
        self.assertEqual(kronecker(-3, 2), -1)
        self.assertEqual(kronecker(-7, 2), 1)
        self.assertEqual(kronecker(-4, 3), -1)
        self.assertEqual(kronecker(-7, 3), -1)
        self.assertEqual(kronecker(-3, -1), -1)
        self.assertEqual(kronecker(5, -1), 1)
        self.assertEqual(kronecker(8, 2), 0)
        self.assertEqual(kronecker(5, 0), 0)
        self.assertEqual(kronecker(1, 0), 1)

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(FUNDAMENTAL), st.integers(1, 500), st.integers(1, 500))
    def test_multiplicative(self, D, a, b):
        self.assertEqual(kronecker(D, a * b), kronecker(D, a) * kronecker(D, b))

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(FUNDAMENTAL), st.integers(1, 1000))
    def test_periodic_mod_discriminant(self, D, a):
        self.assertEqual(kronecker(D, a), kronecker(D, a + abs(D)))

    def test_character_splits_units_in_half(self):
        for N in range(-50, 51):
            if N in (0, 1) or not is_squarefree(N):
                continue
            with self.subTest(N=N):
                D = fundamental_discriminant(N)
                values = [kronecker(D, a) for a in units(n_dagger(N))]
                self.assertEqual(set(values), {1, -1})
                self.assertEqual(2 * values.count(1), len(values))


class CRTTests(SimpleTestCase):
    def test_coprime_pair(self):
        self.assertEqual(crt_pair(Residue(2, 3), Residue(3, 5)), Residue(8, 15))

    def test_compatible_non_coprime_pair(self):
        self.assertEqual(crt_pair(Residue(1, 4), Residue(3, 6)), Residue(9, 12))

    def test_conflict(self):
        with self.assertRaises(CRTConflict):
            crt_pair(Residue(1, 4), Residue(2, 6))

    def test_coefficients(self):
        self.assertEqual(crt_coefficients(3, 7), (7, 15))
        with self.assertRaises(BadLevel):
            crt_coefficients(4, 6)

    @settings(max_examples=100, deadline=None)
    @given(st.sampled_from([(3, 7), (16, 3), (7, 4), (27, 5), (1, 9)]), st.integers(), st.integers())
    def test_coefficients_recover_both_residues(self, moduli, u, v):
        M, N = moduli
        e_M, e_N = crt_coefficients(M, N)
        x = (u * e_M + v * e_N) % (M * N)
        self.assertEqual(x % M, u % M)
        self.assertEqual(x % N, v % N)


class MiscTests(SimpleTestCase):
    def test_units(self):
        self.assertEqual(units(1), [0])
        self.assertEqual(units(8), [1, 3, 5, 7])
        self.assertEqual(len(units(21)), 12)

    def test_exponent_table(self):
        self.assertEqual(n_exponent(0, 3), 3)
        self.assertEqual(n_exponent(54000, 3), 1)
        self.assertEqual(n_exponent(1728, 2), 4)
        self.assertEqual(n_exponent(8000, 2), 4)
        self.assertEqual(n_exponent(-3375, 7), 1)
