"""
CM-specific matrix groups: the Cartan subgroup C_{delta,phi}(N) of matrices
c(a, b) = (a + b*phi, b; delta*b, a), its normalizer <C, c_eps>, the squares
subgroup attached to a ramified odd prime, basis changes between the
(delta, phi) and (delta + phi^2/4, 0) models, and determinant conditions.
"""

import logging
from math import gcd

from pydantic import BaseModel, ConfigDict, model_validator
from sympy import factorint, mod_inverse

from .exceptions import BadLevel, BadPrime, DomainError
from .matgl2 import Ambient, Mat2, SubgroupModN, pack, unpack
from .modarith import Residue, fundamental_discriminant, kronecker, n_dagger, units

logger = logging.getLogger(__name__)


class CartanParams(BaseModel):
    """(delta, phi) with phi^2 + 4*delta equal to the order's discriminant."""

    model_config = ConfigDict(frozen=True)

    delta: int
    phi: int
    discriminant: int

    @model_validator(mode='after')
    def check_discriminant(self):
        if self.phi * self.phi + 4 * self.delta != self.discriminant:
            raise ValueError(
                f"phi^2 + 4*delta = {self.phi ** 2 + 4 * self.delta} does not match {self.discriminant}"
            )
        return self


def is_fundamental_discriminant(D):
    if D % 4 == 1:
        core = D
    elif D % 4 == 0 and (D // 4) % 4 in (2, 3):
        core = D // 4
    else:
        return False
    return core != 1 and all(e == 1 for e in factorint(abs(core)).values())


def delta_phi(Delta_K, f):
    """CartanParams for the order of conductor f in the field of discriminant Delta_K."""
    if Delta_K >= 0 or not is_fundamental_discriminant(Delta_K):
        raise DomainError(f"{Delta_K} is not a negative fundamental discriminant")
    if f < 1:
        raise DomainError(f"Conductor must be positive, got {f}")
    disc = Delta_K * f * f
    if disc % 4 == 0:
        return CartanParams(delta=disc // 4, phi=0, discriminant=disc)
    return CartanParams(delta=(Delta_K - 1) * f * f // 4, phi=f, discriminant=disc)


def cartan_det(a, b, params, N):
    return (a * a + a * b * params.phi - params.delta * b * b) % N


def cartan_matrix(a, b, params, N):
    return Mat2(a + b * params.phi, b, params.delta * b, a, N)


def cartan_element(a, b, params):
    """c_{delta,phi}(a, b) for residues a, b sharing a modulus."""
    if not isinstance(a, Residue):
        a = Residue(a, b.modulus)
    if not isinstance(b, Residue):
        b = Residue(b, a.modulus)
    if a.modulus != b.modulus:
        raise BadLevel(f"Residues mod {a.modulus} and mod {b.modulus} cannot be combined")
    return cartan_matrix(a.value, b.value, params, a.modulus)


def cartan_coordinates(g, params):
    """(a, b) with g = c(a, b), or None when g is not of Cartan shape."""
    N = g.modulus
    a, b = g.d, g.b
    if g == cartan_matrix(a, b, params, N):
        return a, b
    return None


def _cartan_keys(params, N):
    phi, delta = params.phi, params.delta
    keys = set()
    for a in range(N):
        for b in range(N):
            if gcd((a * a + a * b * phi - delta * b * b) % N, N) == 1:
                keys.add(pack((a + b * phi) % N, b, (delta * b) % N, a, N))
    return keys


def build_cartan(params, N):
    """C_{delta,phi}(N), enumerated pair by pair."""
    if N < 1:
        raise BadLevel(f"Level must be positive, got {N}")
    return SubgroupModN(N, ambient=Ambient.CARTAN, params=params, elements=_cartan_keys(params, N))


def c_eps(params, epsilon, N):
    """The involution (eps, 0; -eps*phi, -eps)."""
    if epsilon not in (1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon}")
    return Mat2(epsilon, 0, -epsilon * params.phi, -epsilon, N)


def c_prime(epsilon, N):
    """The involution (0, eps; eps, 0)."""
    if epsilon not in (1, -1):
        raise DomainError(f"epsilon must be +1 or -1, got {epsilon}")
    return Mat2(0, epsilon, epsilon, 0, N)


def build_normalizer(params, N, epsilon=1, cartan=None):
    """
    N_{delta,phi}(N) = <C_{delta,phi}(N), c_eps> = C u c_eps*C.

    Returns:
        tuple: (SubgroupModN, c_eps)
    """
    cartan = cartan or build_cartan(params, N)
    c = c_eps(params, epsilon, N)
    elements = set(cartan.elements)
    x = c.entries
    for a, b, cc, d in cartan.tuples():
        elements.add(pack(
            (x[0] * a + x[1] * cc) % N, (x[0] * b + x[1] * d) % N,
            (x[2] * a + x[3] * cc) % N, (x[2] * b + x[3] * d) % N, N,
        ))
    return SubgroupModN(N, ambient=Ambient.NORMALIZER, params=params, elements=elements), c


def _half_phi(params, N):
    if N % 2 == 0:
        raise BadLevel(f"Basis change needs 2 invertible, got modulus {N}")
    if N == 1:
        return 0
    return (params.phi * mod_inverse(2, N)) % N


def phi0_delta(params, N):
    """delta + phi^2/4 reduced mod an odd N."""
    if N == 1:
        return 0
    return (params.delta + params.phi * params.phi * mod_inverse(4, N)) % N


def basis_change(m, direction, params):
    """
    Conjugate between the (delta, phi) basis and the (delta + phi^2/4, 0) basis.

    Args:
        m: Matrix at an odd modulus.
        direction: 'to_phi0' or 'from_phi0'.
    """
    N = m.modulus
    h = _half_phi(params, N)
    P = Mat2(1, 0, -h, 1, N)
    P_inv = Mat2(1, 0, h, 1, N)
    if direction == 'to_phi0':
        return P_inv * m * P
    if direction == 'from_phi0':
        return P * m * P_inv
    raise ValueError(f"Unknown basis change direction {direction!r}")


def transport_subgroup(G, direction, params):
    """Apply basis_change to every element of G."""
    N = G.modulus
    h = _half_phi(params, N)
    if h == 0:
        return G
    sign = 1 if direction == 'to_phi0' else -1
    if direction not in ('to_phi0', 'from_phi0'):
        raise ValueError(f"Unknown basis change direction {direction!r}")
    k = sign * h
    elements = set()
    for a, b, c, d in G.tuples():
        # (1,0;k,1) (a,b;c,d) (1,0;-k,1)
        a2, b2 = (a - b * k) % N, b
        c2, d2 = (k * a + c - k * b * k - d * k) % N, (k * b + d) % N
        elements.add(pack(a2, b2, c2, d2, N))
    known = G.known_generators
    gens = [basis_change(g, direction, params) for g in known] if known is not None else None
    return SubgroupModN(N, gens, ambient=G.ambient, params=params, elements=elements)


def a_subgroup(N, m):
    """A_N^m: units a mod m fixing sqrt(N), i.e. kronecker(disc Q(sqrt N), a) = 1."""
    dagger = n_dagger(N)
    if m % dagger:
        raise BadLevel(f"N-dagger {dagger} does not divide {m}")
    D = fundamental_discriminant(N)
    return frozenset(a for a in units(m) if kronecker(D, a) == 1)


def det_fixed_subgroup(cartan, allowed_dets):
    """{g in cartan : det(g) in allowed_dets}."""
    N = cartan.modulus
    allowed = frozenset(x % N for x in allowed_dets)
    for x in allowed:
        for y in allowed:
            if (x * y) % N not in allowed:
                raise DomainError(f"Allowed determinants are not closed under multiplication mod {N}")
    elements = set()
    for key in cartan.elements:
        a, b, c, d = unpack(key, N)
        if (a * d - b * c) % N in allowed:
            elements.add(key)
    return SubgroupModN(N, ambient=cartan.ambient, params=cartan.params, elements=elements)


def squares_cartan_subgroup(params, ell, n):
    """
    Cartan part J of the image for an odd prime ell ramified in the order:
    (s, b; delta'*b, s) with s a square unit in the (delta', 0) basis,
    returned in the working (delta, phi) basis.
    """
    if ell == 2:
        raise BadPrime("The 2-adic Cartan part comes from the embedded curve data")
    if params.discriminant % ell:
        raise DomainError(f"{ell} does not divide the discriminant {params.discriminant}")
    N = ell ** n
    h = _half_phi(params, N)
    square_units = {(u * u) % N for u in units(N)}
    elements = set()
    for s in square_units:
        for b in range(N):
            elements.add(cartan_matrix((s - h * b) % N, b, params, N).key)
    logger.debug(f"Squares Cartan subgroup mod {N}: {len(elements)} elements")
    return SubgroupModN(N, ambient=Ambient.CARTAN, params=params, elements=elements)


def cartan_part(G, params):
    """G intersected with C_{delta,phi}(N)."""
    N = G.modulus
    phi, delta = params.phi % N, params.delta % N
    elements = set()
    for key in G.elements:
        a, b, c, d = unpack(key, N)
        if c == (delta * b) % N and a == (d + b * phi) % N:
            elements.add(key)
    return SubgroupModN(N, ambient=Ambient.CARTAN, params=params, elements=elements)
