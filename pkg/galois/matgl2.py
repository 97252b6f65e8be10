"""
Finite matrix groups inside GL(2, Z/NZ).

Group elements are packed into a single int key ((a*N + b)*N + c)*N + d so a
materialized subgroup is a frozenset of ints. Subgroups are compared as sets,
never by their generator lists.
"""

import logging
import threading
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import product
from math import gcd
from typing import NamedTuple

from sympy import factorint, mod_inverse

from .conf import settings
from .exceptions import (
    BadLevel,
    GroupTooLarge,
    NotASubgroup,
    NotAUnit,
    SearchTooLarge,
)
from .modarith import crt_coefficients

logger = logging.getLogger(__name__)


def pack(a, b, c, d, N):
    return ((a * N + b) * N + c) * N + d


def unpack(key, N):
    key, d = divmod(key, N)
    key, c = divmod(key, N)
    a, b = divmod(key, N)
    return a, b, c, d


def _mul(x, y, N):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % N, (a * f + b * h) % N, (c * e + d * g) % N, (c * f + d * h) % N)


@dataclass(frozen=True)
class Mat2:
    """A 2x2 matrix (a, b; c, d) over Z/NZ, entries stored reduced."""

    a: int
    b: int
    c: int
    d: int
    modulus: int

    def __post_init__(self):
        N = self.modulus
        if N < 1:
            raise BadLevel(f"Modulus must be positive, got {N}")
        for name in ('a', 'b', 'c', 'd'):
            object.__setattr__(self, name, getattr(self, name) % N)

    @classmethod
    def identity(cls, N):
        return cls(1, 0, 0, 1, N)

    @classmethod
    def scalar(cls, s, N):
        return cls(s, 0, 0, s, N)

    @classmethod
    def from_key(cls, key, N):
        return cls(*unpack(key, N), N)

    @classmethod
    def from_tuple(cls, entries, N):
        return cls(*entries, N)

    @property
    def key(self):
        return pack(self.a, self.b, self.c, self.d, self.modulus)

    @property
    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def det(self):
        return (self.a * self.d - self.b * self.c) % self.modulus

    def trace(self):
        return (self.a + self.d) % self.modulus

    def is_invertible(self):
        return gcd(self.det(), self.modulus) == 1

    def __mul__(self, other):
        if isinstance(other, int):
            return Mat2(self.a * other, self.b * other, self.c * other, self.d * other, self.modulus)
        if other.modulus != self.modulus:
            raise BadLevel(f"Cannot multiply matrices mod {self.modulus} and mod {other.modulus}")
        return Mat2(*_mul(self.entries, other.entries, self.modulus), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def inverse(self):
        if not self.is_invertible():
            raise NotAUnit(f"{self} is not invertible")
        N = self.modulus
        if N == 1:
            return self
        e = mod_inverse(self.det(), N)
        return Mat2(self.d * e, -self.b * e, -self.c * e, self.a * e, N)

    def __pow__(self, exponent):
        base = self if exponent >= 0 else self.inverse()
        exponent = abs(exponent)
        result = Mat2.identity(self.modulus)
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def conjugate_by(self, B):
        """B * self * B^-1."""
        return B * self * B.inverse()

    def reduce(self, M):
        if self.modulus % M:
            raise BadLevel(f"{M} does not divide {self.modulus}")
        return Mat2(self.a, self.b, self.c, self.d, M)

    def order(self):
        """Multiplicative order, found by walking powers."""
        identity = Mat2.identity(self.modulus)
        power, n = self, 1
        while power != identity:
            power = power * self
            n += 1
        return n

    def __str__(self):
        return f"({self.a},{self.b};{self.c},{self.d}) mod {self.modulus}"


class Ambient(str, Enum):
    GL2 = 'GL2'
    CARTAN = 'Cartan'
    NORMALIZER = 'Normalizer'


class SubgroupModN:
    """
    A subgroup of GL(2, Z/NZ) given by generators.

    The element set is materialized lazily, at most once, by breadth-first
    closure unless the constructor already knows it (Cartan enumeration,
    reductions, preimages).
    """

    def __init__(self, modulus, generators=None, ambient=Ambient.GL2, params=None, elements=None):
        if generators is None and elements is None:
            raise ValueError("A subgroup needs generators or elements")
        self.modulus = modulus
        self._generators = None
        if generators is not None:
            self._generators = tuple(generators)
            for g in self._generators:
                if g.modulus != modulus:
                    raise BadLevel(f"Generator {g} does not live mod {modulus}")
                if not g.is_invertible():
                    raise NotAUnit(f"Generator {g} is not invertible")
        self.ambient = Ambient(ambient)
        self.params = params
        self._elements = frozenset(elements) if elements is not None else None
        self._lock = threading.RLock()

    @property
    def generators(self):
        if self._generators is None:
            with self._lock:
                if self._generators is None:
                    self._generators = tuple(generating_set(self._elements, self.modulus))
        return self._generators

    @property
    def elements(self):
        if self._elements is None:
            with self._lock:
                if self._elements is None:
                    self._elements = closure(self.generators, self.modulus)
        return self._elements

    @property
    def known_generators(self):
        """Generators if they were supplied or already computed, else None."""
        return self._generators

    @property
    def is_materialized(self):
        return self._elements is not None

    @property
    def order(self):
        return len(self.elements)

    @cached_property
    def fingerprint(self):
        return Fingerprint(self)

    def tuples(self):
        N = self.modulus
        for key in self.elements:
            yield unpack(key, N)

    def matrices(self):
        N = self.modulus
        for key in sorted(self.elements):
            yield Mat2.from_key(key, N)

    def trace_det_pairs(self):
        N = self.modulus
        return {((a + d) % N, (a * d - b * c) % N) for a, b, c, d in self.tuples()}

    def determinants(self):
        N = self.modulus
        return {(a * d - b * c) % N for a, b, c, d in self.tuples()}

    def __contains__(self, g):
        return g.modulus == self.modulus and g.key in self.elements

    def __eq__(self, other):
        if not isinstance(other, SubgroupModN):
            return NotImplemented
        return self.modulus == other.modulus and self.elements == other.elements

    __hash__ = None

    def issubset(self, other):
        return self.modulus == other.modulus and self.elements <= other.elements

    def __len__(self):
        return self.order

    def __repr__(self):
        size = len(self._elements) if self._elements is not None else '?'
        gens = len(self._generators) if self._generators is not None else '?'
        return f"<SubgroupModN mod {self.modulus} ({self.ambient.value}) order={size} gens={gens}>"


def group_order_gl2(N):
    """|GL(2, Z/NZ)| = N^4 * prod over p | N of (1 - 1/p)(1 - 1/p^2)."""
    order = 1
    for p, k in factorint(N).items():
        order *= p ** (4 * (k - 1)) * (p * p - 1) * (p * p - p)
    return order


def closure(generators, N, cap=None):
    """
    Materialize the subgroup generated by ``generators`` by breadth-first
    right multiplication from the identity.

    Returns:
        frozenset: Packed keys of every element.
    """
    cap = cap or settings.CM_ADELIC_CLOSURE_CAP
    gens = []
    for g in generators:
        if g.modulus != N:
            raise BadLevel(f"Generator {g} does not live mod {N}")
        if not g.is_invertible():
            raise NotAUnit(f"Generator {g} is not invertible")
        gens.append(g.entries)
    identity = (1 % N, 0, 0, 1 % N)
    seen = {pack(*identity, N)}
    frontier = [identity]
    while frontier:
        discovered = []
        for x in frontier:
            for y in gens:
                z = _mul(x, y, N)
                key = pack(*z, N)
                if key not in seen:
                    seen.add(key)
                    discovered.append(z)
        if len(seen) > cap:
            raise GroupTooLarge(f"Closure mod {N} exceeded {cap} elements")
        frontier = discovered
    return frozenset(seen)


def _extend_elements(elements, new_gens, old_gens, N, cap=None):
    """Closure of a known subgroup together with extra generators."""
    cap = cap or settings.CM_ADELIC_CLOSURE_CAP
    gens = [g.entries for g in old_gens] + [g.entries for g in new_gens]
    seen = set(elements)
    frontier = [unpack(k, N) for k in elements]
    while frontier:
        discovered = []
        for x in frontier:
            for y in gens:
                z = _mul(x, y, N)
                key = pack(*z, N)
                if key not in seen:
                    seen.add(key)
                    discovered.append(z)
        if len(seen) > cap:
            raise GroupTooLarge(f"Closure mod {N} exceeded {cap} elements")
        frontier = discovered
    return frozenset(seen)


def generating_set(elements, N):
    """A small generating set for a subgroup known only by its elements."""
    identity_key = pack(1 % N, 0, 0, 1 % N, N)
    gens = []
    current = frozenset({identity_key})
    for key in sorted(elements):
        if key in current:
            continue
        g = Mat2.from_key(key, N)
        current = _extend_elements(current, [g], gens, N)
        gens.append(g)
        if len(current) == len(elements):
            break
    return gens


def subgroup_from_elements(elements, N, ambient=Ambient.GL2, params=None):
    return SubgroupModN(N, ambient=ambient, params=params, elements=elements)


def subgroup_index(ambient, sub):
    if ambient.modulus != sub.modulus:
        raise BadLevel(f"Moduli {ambient.modulus} and {sub.modulus} differ")
    if not sub.elements <= ambient.elements:
        raise NotASubgroup(f"{sub!r} is not contained in {ambient!r}")
    return ambient.order // sub.order


def _reduce_keys(elements, N, M):
    reduced = set()
    for key in elements:
        a, b, c, d = unpack(key, N)
        reduced.add(pack(a % M, b % M, c % M, d % M, M))
    return reduced


def reduce_subgroup(G, M):
    """Image of G under GL(2, Z/NZ) -> GL(2, Z/MZ)."""
    N = G.modulus
    if M < 1 or N % M:
        raise BadLevel(f"{M} does not divide {N}")
    if M == N:
        return G
    known = G.known_generators
    gens = [g.reduce(M) for g in known] if known is not None else None
    elements = _reduce_keys(G.elements, N, M) if G.is_materialized else None
    return SubgroupModN(M, gens, ambient=G.ambient, params=G.params, elements=elements)


def preimage_subgroup(G, N, ambient):
    """{g in ambient : g mod M in G} where M is the modulus of G."""
    M = G.modulus
    if N % M:
        raise BadLevel(f"{M} does not divide {N}")
    if ambient.modulus != N:
        raise BadLevel(f"Ambient lives mod {ambient.modulus}, expected {N}")
    if not G.elements <= _reduce_keys(ambient.elements, N, M):
        raise NotASubgroup(f"{G!r} is not inside the reduction of {ambient!r}")

    targets = G.elements
    elements = set()
    kernel = set()
    lifts = {}
    identity_key = pack(1 % M, 0, 0, 1 % M, M)
    wanted = {g.key: g for g in G.generators}
    for key in ambient.elements:
        a, b, c, d = unpack(key, N)
        low = pack(a % M, b % M, c % M, d % M, M)
        if low in targets:
            elements.add(key)
            if low == identity_key:
                kernel.add(key)
            if low in wanted and low not in lifts:
                lifts[low] = Mat2(a, b, c, d, N)
    gens = list(lifts.values()) + generating_set(kernel, N)
    return SubgroupModN(N, gens, ambient=ambient.ambient, params=ambient.params, elements=elements)


def crt_matrix(x, y):
    """The matrix mod MN whose reductions are x mod M and y mod N."""
    M, N = x.modulus, y.modulus
    e_M, e_N = crt_coefficients(M, N)
    MN = M * N
    return Mat2(*((u * e_M + v * e_N) % MN for u, v in zip(x.entries, y.entries)), MN)


def crt_glue(G_M, G_N, pair_gens, include_product=True):
    """
    Subgroup of GL(2, Z/MNZ) generated by CRT images of paired generators.

    With ``include_product`` the generators (g, Id) and (Id, h) of the two
    factors are added, so the direct product G_M x G_N is always contained.
    """
    M, N = G_M.modulus, G_N.modulus
    if gcd(M, N) != 1:
        raise BadLevel(f"crt_glue needs coprime moduli, got {M} and {N}")
    gens = [crt_matrix(x, y) for x, y in pair_gens]
    if include_product:
        gens += [crt_matrix(g, Mat2.identity(N)) for g in G_M.generators]
        gens += [crt_matrix(Mat2.identity(M), h) for h in G_N.generators]
    params = G_M.params if G_M.params == G_N.params else None
    return SubgroupModN(M * N, gens, params=params)


def intersect(G, H):
    if G.modulus != H.modulus:
        raise BadLevel(f"Moduli {G.modulus} and {H.modulus} differ")
    return subgroup_from_elements(G.elements & H.elements, G.modulus)


def normalizes(g, G):
    return all((g * h * g.inverse()).key in G.elements for h in G.generators)


def extend_by_normalizing(G, g, ambient=Ambient.GL2, params=None):
    """
    <g, G>. When g normalizes G and g^2 lies in G this is G u gG and needs
    no closure.
    """
    N = G.modulus
    if normalizes(g, G) and (g * g).key in G.elements:
        x = g.entries
        elements = set(G.elements)
        for y in G.tuples():
            elements.add(pack(*_mul(x, y, N), N))
    else:
        elements = _extend_elements(G.elements, [g], G.generators, N)
    return SubgroupModN(N, (g,) + G.generators, ambient=ambient, params=params, elements=elements)


def _element_order(x, N, group_order, primes):
    """Order of x, given that it divides group_order."""
    identity = (1 % N, 0, 0, 1 % N)

    def power(e):
        result, base = identity, x
        while e:
            if e & 1:
                result = _mul(result, base, N)
            base = _mul(base, base, N)
            e >>= 1
        return result

    n = group_order
    for p in primes:
        while n % p == 0 and power(n // p) == identity:
            n //= p
    return n


def orbit_sizes(G):
    """Sorted orbit sizes of G acting on the nonzero column vectors of (Z/NZ)^2."""
    N = G.modulus
    gens = [g.entries for g in G.generators]
    seen = set()
    sizes = []
    for start in product(range(N), repeat=2):
        if start == (0, 0) or start in seen:
            continue
        seen.add(start)
        stack = [start]
        size = 1
        while stack:
            x, y = stack.pop()
            for a, b, c, d in gens:
                v = ((a * x + b * y) % N, (c * x + d * y) % N)
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
                    size += 1
        sizes.append(size)
    return tuple(sorted(sizes))


class Fingerprint:
    """
    Conjugation invariants of a subgroup, compared cheapest first.

    Two subgroups with different fingerprints are never conjugate in
    GL(2, Z/NZ); equal fingerprints prove nothing.
    """

    def __init__(self, group):
        self.group = group

    @cached_property
    def order(self):
        return self.group.order

    @cached_property
    def orbits(self):
        return orbit_sizes(self.group)

    @cached_property
    def trace_det_profile(self):
        N = self.group.modulus
        counts = Counter(((a + d) % N, (a * d - b * c) % N) for a, b, c, d in self.group.tuples())
        return tuple(sorted(counts.items()))

    @cached_property
    def order_profile(self):
        N = self.group.modulus
        n = self.order
        primes = sorted(factorint(n))
        counts = Counter(
            (_element_order(x, N, n, primes), (x[0] + x[3]) % N, (x[0] * x[3] - x[1] * x[2]) % N)
            for x in self.group.tuples()
        )
        return tuple(sorted(counts.items()))

    def stages(self):
        yield 'modulus', self.group.modulus
        yield 'order', self.order
        yield 'orbits', self.orbits
        yield 'trace_det', self.trace_det_profile
        yield 'order_profile', self.order_profile

    def differs_from(self, other):
        """Name of the first invariant that differs, or None."""
        for (name, mine), (_, theirs) in zip(self.stages(), other.stages()):
            if mine != theirs:
                return name
        return None

    def __eq__(self, other):
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return self.differs_from(other) is None

    __hash__ = None


def fingerprint(G):
    return G.fingerprint


def _maps_into(B_entries, B_inv_entries, gens, target, N):
    for g in gens:
        z = _mul(_mul(B_entries, g, N), B_inv_entries, N)
        if pack(*z, N) not in target:
            return False
    return True


def is_conjugate(G, H, mode='full_gl2', candidate=None, cap=None):
    """
    Find B in GL(2, Z/NZ) with B G B^-1 = H.

    Args:
        mode: 'full_gl2' scans GL(2, Z/NZ) in lexicographic order, 'given'
            only tests ``candidate``.

    Returns:
        Mat2 or None: A conjugator, or None when none exists.
    """
    if G.modulus != H.modulus:
        raise BadLevel(f"Moduli {G.modulus} and {H.modulus} differ")
    N = G.modulus
    if G.order != H.order:
        return None

    # generators of G must land in H
    gens = [g.entries for g in G.generators]
    target = H.elements

    if mode == 'given':
        if candidate is None or candidate.modulus != N:
            raise BadLevel("mode='given' needs a candidate matrix at the same modulus")
        ok = _maps_into(candidate.entries, candidate.inverse().entries, gens, target, N)
        return candidate if ok else None
    if mode != 'full_gl2':
        raise ValueError(f"Unknown conjugacy mode {mode!r}")

    # cheap exits: equal groups, then fingerprints
    if G == H:
        return Mat2.identity(N)
    differing = G.fingerprint.differs_from(H.fingerprint)
    if differing:
        logger.debug(f"Fingerprints differ at {differing}; not conjugate mod {N}")
        return None

    cap = cap or settings.CM_ADELIC_CONJUGACY_SEARCH_CAP
    size = group_order_gl2(N)
    if size > cap:
        raise SearchTooLarge(f"|GL2(Z/{N}Z)| = {size} exceeds the search cap {cap}")

    # exhaustive scan of GL2 in lexicographic order
    logger.info(f"Scanning {size} conjugators mod {N}")
    inverses = {u: mod_inverse(u, N) for u in range(1, N) if gcd(u, N) == 1} if N > 1 else {0: 0}
    for a, b, c, d in product(range(N), repeat=4):
        det = (a * d - b * c) % N
        e = inverses.get(det)
        if e is None:
            continue
        B_inv = ((d * e) % N, (-b * e) % N, (-c * e) % N, (a * e) % N)
        if _maps_into((a, b, c, d), B_inv, gens, target, N):
            return Mat2(a, b, c, d, N)
    return None


class ConjugacyVerdict(NamedTuple):
    verdict: str
    witness: Mat2 = None
    reason: str = ''


def distinguish(G, H, cap=None):
    """
    Decide conjugacy when affordable.

    Returns:
        ConjugacyVerdict: 'conjugate' (with witness), 'not_conjugate', or
        'inconclusive' when the fingerprints agree and GL(2, Z/NZ) is larger
        than the search cap.
    """
    if G.order != H.order:
        return ConjugacyVerdict('not_conjugate', reason='order')
    differing = G.fingerprint.differs_from(H.fingerprint)
    if differing:
        return ConjugacyVerdict('not_conjugate', reason=differing)
    try:
        witness = is_conjugate(G, H, cap=cap)
    except SearchTooLarge:
        return ConjugacyVerdict('inconclusive', reason='search cap')
    if witness is None:
        return ConjugacyVerdict('not_conjugate', reason='exhaustive search')
    return ConjugacyVerdict('conjugate', witness=witness, reason='exhaustive search')
