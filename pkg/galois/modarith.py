"""
Exact modular integer arithmetic.

Square-free decomposition, the conductor N-dagger of Q(sqrt(N)), Kronecker
symbols, the Chinese remainder theorem and the exponent table n_{E,ell}.
Integers are Python ints throughout, so the large CM j-invariants need no
special handling.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from sympy import factorint, jacobi_symbol, mod_inverse
from sympy.ntheory.modular import solve_congruence

from .exceptions import BadLevel, CRTConflict, DomainError, NotAUnit


@dataclass(frozen=True)
class Residue:
    """An element of Z/NZ, always stored reduced into [0, N)."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus < 1:
            raise DomainError(f"Modulus must be positive, got {self.modulus}")
        object.__setattr__(self, 'value', self.value % self.modulus)

    def _coerce(self, other):
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise BadLevel(f"Residues mod {self.modulus} and mod {other.modulus} cannot be combined")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return Residue(self.value + value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return Residue(self.value - value, self.modulus)

    def __rsub__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return Residue(value - self.value, self.modulus)

    def __mul__(self, other):
        value = self._coerce(other)
        if value is NotImplemented:
            return value
        return Residue(self.value * value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return Residue(-self.value, self.modulus)

    def __pow__(self, exponent):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        return Residue(pow(self.value, exponent, self.modulus), self.modulus)

    def __int__(self):
        return self.value

    def is_unit(self):
        return gcd(self.value, self.modulus) == 1

    def inverse(self):
        if not self.is_unit():
            raise NotAUnit(f"{self.value} is not invertible mod {self.modulus}")
        if self.modulus == 1:
            return self
        return Residue(mod_inverse(self.value, self.modulus), self.modulus)

    def reduce(self, modulus):
        """Image under Z/NZ -> Z/MZ for M dividing N."""
        if self.modulus % modulus:
            raise BadLevel(f"{modulus} does not divide {self.modulus}")
        return Residue(self.value, modulus)


@dataclass(frozen=True)
class SquarefreeInt:
    """A non-zero square-free integer together with its N-dagger."""

    value: int

    def __post_init__(self):
        if not is_squarefree(self.value):
            raise DomainError(f"{self.value} is not a non-zero square-free integer")

    @property
    def dagger(self):
        return n_dagger(self.value)

    @property
    def discriminant(self):
        return fundamental_discriminant(self.value)


def is_squarefree(n):
    if n == 0:
        return False
    return all(e == 1 for e in factorint(abs(n)).values())


def squarefree_part(n):
    """
    Split n as N * m**2 with N square-free.

    Args:
        n: Any non-zero integer (Fraction inputs must be split by the caller).

    Returns:
        tuple: (N, m) with sign(N) = sign(n) and m > 0.
    """
    if n == 0:
        raise DomainError("squarefree_part is undefined at 0")
    core, root = 1, 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            core *= p
        root *= p ** (e // 2)
    return (core if n > 0 else -core), root


def squarefree_class(q):
    """Square-free representative of the square class of a non-zero rational."""
    q = Fraction(q)
    if q == 0:
        raise DomainError("squarefree_class is undefined at 0")
    core, _ = squarefree_part(q.numerator * q.denominator)
    return core


def n_dagger(N):
    """|N| when N = 1 mod 4, else |4N|: the conductor of Q(sqrt(N))."""
    if not is_squarefree(N):
        raise DomainError(f"{N} is not a non-zero square-free integer")
    if N % 4 == 1:
        return abs(N)
    return 4 * abs(N)


def fundamental_discriminant(N):
    """Discriminant of Q(sqrt(N)); 1 for N = 1."""
    if not is_squarefree(N):
        raise DomainError(f"{N} is not a non-zero square-free integer")
    if N % 4 == 1:
        return N
    return 4 * N


def kronecker(D, a):
    """Kronecker symbol (D | a), multiplicative in a."""
    if a == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if a < 0:
        a = -a
        if D < 0:
            result = -result
    twos = 0
    while a % 2 == 0:
        a //= 2
        twos += 1
    if twos:
        if D % 2 == 0:
            return 0
        if twos % 2 and D % 8 in (3, 5):
            result = -result
    if a == 1:
        return result
    return result * jacobi_symbol(D % a, a)


def units(m):
    """Sorted representatives of (Z/mZ)^x; [0] for m = 1."""
    if m == 1:
        return [0]
    return [a for a in range(m) if gcd(a, m) == 1]


def crt_pair(u, v):
    """
    Combine u mod M and v mod N into the residue mod lcm(M, N).

    Raises:
        CRTConflict: u and v disagree modulo gcd(M, N).
    """
    solution = solve_congruence((u.value, u.modulus), (v.value, v.modulus))
    if solution is None:
        raise CRTConflict(f"{u.value} mod {u.modulus} and {v.value} mod {v.modulus} are incompatible")
    value, modulus = solution
    return Residue(int(value), int(modulus))


def crt_coefficients(M, N):
    """Idempotents (e_M, e_N) with x = u*e_M + v*e_N mod MN for coprime M, N."""
    if gcd(M, N) != 1:
        raise BadLevel(f"Moduli {M} and {N} are not coprime")
    MN = M * N
    if M == 1:
        return 0, 1 % MN
    if N == 1:
        return 1 % MN, 0
    e_M = (N * mod_inverse(N, M)) % MN
    e_N = (M * mod_inverse(M, N)) % MN
    return e_M, e_N


def n_exponent(j, ell):
    """Exponent n_{E,ell} of the ell-adic level of differentiation."""
    j = Fraction(j)
    if ell == 2:
        return 4
    if ell == 3 and j == 0:
        return 3
    return 1


def prime_divisors(n):
    return sorted(factorint(abs(n)))

