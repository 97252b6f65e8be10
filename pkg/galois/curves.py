"""
Elliptic curves over Q in Weierstrass form.

Covers the short model, quadratic twists, isomorphism over Q, the search for
the twist that turns a CM curve into a simplest one, and Frobenius traces.
"""

import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd

from pydantic import BaseModel, ConfigDict
from sympy import factorint, integer_nthroot, isprime

from .cmdata import lookup_cm_order, simplest_curves_for
from .conf import settings
from .exceptions import (
    BadPrime,
    CurveParseError,
    DomainError,
    InternalInvariantViolation,
    NotCM,
    SearchTooLarge,
    Unsupported,
)
from .modarith import is_squarefree, n_dagger, squarefree_class

logger = logging.getLogger(__name__)

_SPEC_RE = re.compile(r'^\[\s*-?\d+(\s*,\s*-?\d+)*\s*\]$')


def _reduce_short(A, B):
    """Divide out the largest u with u^4 | A and u^6 | B."""
    u = 1
    primes = set(factorint(abs(A))) if A else set()
    primes |= set(factorint(abs(B))) if B else set()
    for p in primes:
        while (A == 0 or A % (u * p) ** 4 == 0) and (B == 0 or B % (u * p) ** 6 == 0):
            u *= p
    return A // u ** 4, B // u ** 6


@dataclass(frozen=True)
class WeierstrassCurve:
    """y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 with integer coefficients."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.disc == 0:
            raise DomainError(f"{self.ainvs} is singular")

    @classmethod
    def from_ainvs(cls, ainvs):
        ainvs = [int(a) for a in ainvs]
        if len(ainvs) != 5:
            raise DomainError(f"Expected five a-invariants, got {len(ainvs)}")
        return cls(*ainvs)

    @classmethod
    def from_short(cls, A, B):
        return cls(0, 0, 0, int(A), int(B))

    @property
    def ainvs(self):
        return [self.a1, self.a2, self.a3, self.a4, self.a6]

    @cached_property
    def b2(self):
        return self.a1 ** 2 + 4 * self.a2

    @cached_property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @cached_property
    def b6(self):
        return self.a3 ** 2 + 4 * self.a6

    @cached_property
    def b8(self):
        a1, a2, a3, a4, a6 = self.ainvs
        return a1 ** 2 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 ** 2 - a4 ** 2

    @cached_property
    def c4(self):
        return self.b2 ** 2 - 24 * self.b4

    @cached_property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @cached_property
    def disc(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 ** 2 * b8 - 8 * b4 ** 3 - 27 * b6 ** 2 + 9 * b2 * b4 * b6

    @cached_property
    def j(self):
        return Fraction(self.c4 ** 3, self.disc)

    @cached_property
    def short_model(self):
        """(A, B) of an isomorphic y^2 = x^3 + Ax + B with no u^4, u^6 left to remove."""
        return _reduce_short(-27 * self.c4, -54 * self.c6)

    @property
    def A(self):
        return self.short_model[0]

    @property
    def B(self):
        return self.short_model[1]

    def __str__(self):
        return f"[{','.join(str(a) for a in self.ainvs)}]"


def long_to_short(E):
    return WeierstrassCurve.from_short(*E.short_model)


def quadratic_twist(E, N):
    """E^N: y^2 = x^3 + N^2 A x + N^3 B."""
    if N == 0 or not is_squarefree(N):
        raise DomainError(f"Twist parameter must be a non-zero square-free integer, got {N}")
    A, B = E.short_model
    return WeierstrassCurve.from_short(N * N * A, N ** 3 * B)


def _is_rational_power(q, n):
    q = Fraction(q)
    if q <= 0:
        return False
    _, num_exact = integer_nthroot(q.numerator, n)
    _, den_exact = integer_nthroot(q.denominator, n)
    return num_exact and den_exact


def is_isomorphic_Q(E, F):
    """True iff c4(F) = u^4 c4(E) and c6(F) = u^6 c6(E) for some rational u."""
    if E.j != F.j:
        return False
    if E.c4 == 0:
        return _is_rational_power(Fraction(F.c6, E.c6), 6)
    if E.c6 == 0:
        return _is_rational_power(Fraction(F.c4, E.c4), 4)
    r = Fraction(F.c4, E.c4)
    s = Fraction(F.c6, E.c6)
    return _is_rational_power(s / r, 2)


def change_coordinates(E, u, r, s, t):
    """
    The model for x = u^2 x' + r, y = u^3 y' + s u^2 x' + t, or None when it
    has non-integral coefficients.
    """
    a1, a2, a3, a4, a6 = E.ainvs
    numerators = (
        (a1 + 2 * s, u),
        (a2 - s * a1 + 3 * r - s * s, u ** 2),
        (a3 + r * a1 + 2 * t, u ** 3),
        (a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t, u ** 4),
        (a6 + r * a4 + r * r * a2 + r ** 3 - t * a3 - t * t - r * t * a1, u ** 6),
    )
    if any(n % d for n, d in numerators):
        return None
    return WeierstrassCurve.from_ainvs([n // d for n, d in numerators])


def _scale_down_once(E, p):
    # r mod p^2, s mod p and t mod p^3 cover every integral change with u = p
    for r in range(p * p):
        for s in range(p):
            for t in range(p ** 3):
                F = change_coordinates(E, p, r, s, t)
                if F is not None:
                    return F
    return None


def minimal_model_at(E, p):
    """An integral model of E whose discriminant has the least valuation at p."""
    current = E
    while current.disc % p ** 12 == 0:
        smaller = _scale_down_once(current, p)
        if smaller is None:
            break
        current = smaller
    if current is not E:
        logger.debug(f"{E} is not minimal at {p}; using {current}")
    return current


def record_curve(record):
    """The short model stored in a simplest-curve record."""
    return WeierstrassCurve.from_short(record.A, record.B)


class TwistDatum(BaseModel):
    model_config = ConfigDict(frozen=True)

    N: int
    N_dagger: int
    simplest_label: str


def twist_to_simplest(E):
    """
    Square-free N with E^N isomorphic over Q to a simplest curve.

    Raises:
        NotCM: j(E) is not a rational CM j-invariant.
        Unsupported: j(E) is 0 or 1728 and E is not itself simplest.
    """
    order = lookup_cm_order(E.j)
    if order is None:
        raise NotCM(f"j = {E.j} is not the j-invariant of a CM curve over Q")
    records = simplest_curves_for(order.disc)

    if order.j in (0, 1728):
        for record in records:
            if is_isomorphic_Q(E, record_curve(record)):
                return TwistDatum(N=1, N_dagger=1, simplest_label=record.label)
        raise Unsupported(f"{E} has j = {order.j} and is not a simplest curve")

    A, B = E.short_model
    candidates = []
    for record in records:
        d = Fraction(record.B * A, B * record.A)
        N = squarefree_class(d)
        dagger = n_dagger(N)
        if gcd(record.ell, dagger) != 1:
            continue
        if not is_isomorphic_Q(quadratic_twist(E, N), record_curve(record)):
            raise InternalInvariantViolation(f"Twist of {E} by {N} is not isomorphic to {record.label}")
        candidates.append(TwistDatum(N=N, N_dagger=dagger, simplest_label=record.label))

    if not candidates:
        raise InternalInvariantViolation(f"No twist of {E} coprime to {order.ell} reaches a simplest curve")
    datum = min(candidates, key=lambda t: (abs(t.N), t.N < 0))
    logger.debug(f"{E}: twist by {datum.N} gives {datum.simplest_label}")
    return datum


def _count_points_small(E, p):
    a1, a2, a3, a4, a6 = (a % p for a in E.ainvs)
    count = 1
    for x in range(p):
        for y in range(p):
            if (y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6) % p == 0:
                count += 1
    return count


def ap_trace(E, p):
    """a_p = p + 1 - #E(F_p) at a prime p of good reduction."""
    if not isprime(p):
        raise DomainError(f"{p} is not prime")
    limit = settings.CM_ADELIC_AP_PRIME_LIMIT
    if p > limit:
        raise SearchTooLarge(f"Point counting at p = {p} exceeds the limit {limit}")
    if p <= 3:
        # short models are usually not minimal at 2 and 3
        local = minimal_model_at(E, p)
        if local.disc % p == 0:
            raise BadPrime(f"{E} has bad reduction at {p}")
        return p + 1 - _count_points_small(local, p)

    A, B = E.short_model
    if (4 * A ** 3 + 27 * B ** 2) % p == 0:
        raise BadPrime(f"{E} has bad reduction at {p}")
    squares = bytearray(p)
    for y in range(1, (p + 1) // 2):
        squares[y * y % p] = 1
    total = 0
    A, B = A % p, B % p
    for x in range(p):
        v = (x * x * x + A * x + B) % p
        if v:
            total += 1 if squares[v] else -1
    return -total


def parse_curve_spec(text, kind='auto'):
    """
    Parse ``[a1,a2,a3,a4,a6]`` or ``[A,B]``.

    Args:
        kind: 'long', 'short' or 'auto' (decided by the number of entries).

    Raises:
        CurveParseError: Malformed text, wrong length or a singular curve.
    """
    text = (text or '').strip()
    if not _SPEC_RE.match(text):
        raise CurveParseError(f"Cannot parse curve {text!r}; expected [a1,a2,a3,a4,a6] or [A,B]")
    values = [int(v) for v in text.strip('[] ').split(',')]
    if kind == 'auto':
        kind = {5: 'long', 2: 'short'}.get(len(values))
    expected = {'long': 5, 'short': 2}.get(kind)
    if expected is None or len(values) != expected:
        raise CurveParseError(f"{text!r} has {len(values)} entries")
    try:
        if kind == 'long':
            return WeierstrassCurve.from_ainvs(values)
        return WeierstrassCurve.from_short(*values)
    except DomainError as e:
        raise CurveParseError(str(e)) from None
