"""
Adelic Galois images of CM elliptic curves over Q.

For a simplest curve the image is the full preimage of its embedded
ell-adic image. Any other curve (j not 0 or 1728) is a quadratic twist E^N of
a simplest one, and its image is defined at M = ell^n * N-dagger: the Cartan
part is glued from an index-two subgroup at ell^n and the kernel of the
character of Q(sqrt N) at N-dagger, and complex conjugation contributes the
one element outside the Cartan.
"""

import logging
import random
from math import gcd

from pydantic import BaseModel, ConfigDict, Field
from sympy import divisors

from .cartan import (
    CartanParams,
    a_subgroup,
    build_cartan,
    build_normalizer,
    c_eps,
    cartan_coordinates,
    cartan_part,
    det_fixed_subgroup,
    squares_cartan_subgroup,
)
from .cmdata import CMOrderRecord, lookup_cm_order, simplest_curves_for, simplest_ell_adic_image, simplest_record
from .conf import settings
from .curves import TwistDatum, is_isomorphic_Q, quadratic_twist, record_curve, twist_to_simplest
from .exceptions import BadLevel, DomainError, InternalInvariantViolation, NotCM, NotSimplest
from .matgl2 import (
    Ambient,
    Mat2,
    SubgroupModN,
    crt_glue,
    crt_matrix,
    extend_by_normalizing,
    pack,
    reduce_subgroup,
    subgroup_index,
    unpack,
)
from .modarith import fundamental_discriminant, kronecker, n_dagger

logger = logging.getLogger(__name__)


class GaloisImageResult(BaseModel):
    """Image of the adelic representation, known through its reduction mod ``level``."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str | None = None
    input: str
    cm: CMOrderRecord
    params: CartanParams
    level: int
    index: int
    minimal_level: int
    twist: TwistDatum
    is_simplest: bool
    generators: tuple[tuple[int, int, int, int], ...]
    image: SubgroupModN = Field(exclude=True, repr=False)

    def to_payload(self):
        """The schema-stable dict printed by the management commands."""
        payload = {
            'input': self.input,
            'cm': {
                'Delta_K': self.cm.Delta_K,
                'f': self.cm.f,
                'disc': self.cm.disc,
                'j': self.cm.j,
                'ell': self.cm.ell,
            },
            'delta': self.params.delta,
            'phi': self.params.phi,
            'level': self.level,
            'index': self.index,
            'minimal_level': self.minimal_level,
            'twist': self.twist.model_dump(),
            'generators': [list(g) for g in self.generators],
        }
        if self.label is not None:
            payload['label'] = self.label
        return payload


def _normalizer_index(image, params, d):
    reduced = reduce_subgroup(image, d)
    normalizer, _ = build_normalizer(params, d)
    return subgroup_index(normalizer, reduced)


def _minimal_level(image, params, index, ell):
    for d in divisors(image.modulus):
        if _normalizer_index(image, params, d) == index:
            if d % ell:
                raise InternalInvariantViolation(f"Minimal level {d} is not divisible by {ell}")
            return d
    raise InternalInvariantViolation(f"No divisor of {image.modulus} reaches index {index}")


def index_at(result, d):
    """[N_{delta,phi}(d) : G_{E,d}] for a divisor d of the level."""
    if d < 1 or result.level % d:
        raise BadLevel(f"{d} does not divide the level {result.level}")
    return _normalizer_index(result.image, result.params, d)


def minimal_level(result):
    """Smallest divisor of the level at which the image is already defined."""
    return _minimal_level(result.image, result.params, result.index, result.cm.ell)


def levels_of_definition(result):
    """Every divisor d of the level with [N(d) : G_{E,d}] equal to the full index."""
    return [d for d in divisors(result.level) if index_at(result, d) == result.index]


def _make_result(E, order, image, index, twist, is_simplest, label):
    generators = tuple(g.entries for g in image.generators)
    return GaloisImageResult(
        label=label,
        input=str(E),
        cm=order,
        params=order.params,
        level=image.modulus,
        index=index,
        minimal_level=_minimal_level(image, order.params, index, order.ell),
        twist=twist,
        is_simplest=is_simplest,
        generators=generators,
        image=image,
    )


def _matching_record(E, order):
    for record in simplest_curves_for(order.disc):
        if is_isomorphic_Q(E, record_curve(record)):
            return record
    return None


def simplest_adelic_image(E, label=None):
    """
    Image of a simplest curve: the preimage of its embedded ell-adic image.

    Raises:
        NotSimplest: E is not isomorphic over Q to an embedded curve.
    """
    order = lookup_cm_order(E.j)
    record = _matching_record(E, order) if order is not None else None
    if record is None:
        raise NotSimplest(f"{E} is not a simplest CM curve")
    image = simplest_ell_adic_image(record.label)
    normalizer, _ = build_normalizer(order.params, record.level)
    index = subgroup_index(normalizer, image)
    if index != order.d_E:
        raise InternalInvariantViolation(f"{record.label}: index {index}, expected {order.d_E}")
    twist = TwistDatum(N=1, N_dagger=1, simplest_label=record.label)
    logger.info(f"{record.label} is simplest; level {record.level}, index {index}")
    return _make_result(E, order, image, index, twist, True, label)


def _split(key, M, N):
    a, b, c, d = unpack(key, M * N)
    return pack(a % M, b % M, c % M, d % M, M), pack(a % N, b % N, c % N, d % N, N)


def _check_glue(glued, H_ell, H_dag, C_ell, C_dag):
    """Index two, full reductions, and the two fibre conditions agree."""
    L, D = H_ell.modulus, H_dag.modulus
    # index two in C(L) x C(D)
    if 2 * glued.order != C_ell.order * C_dag.order:
        return False
    # both reductions full, both fibre conditions cut the same subgroup
    left, right = set(), set()
    lows, highs = set(), set()
    for key in glued.elements:
        x, y = _split(key, L, D)
        lows.add(x)
        highs.add(y)
        if x in H_ell.elements:
            left.add(key)
        if y in H_dag.elements:
            right.add(key)
    return lows == C_ell.elements and highs == C_dag.elements and left == right


def cartan_image_glued(H_ell, H_dag, params, M, sample_pairs=None, rng=None):
    """
    The unique index-two subgroup of C(M) with full reductions mod ell^n and
    mod N-dagger whose two fibre conditions cut out the same subgroup.

    Raises:
        InternalInvariantViolation: No candidate survives, or two candidate
            pairs generate different groups.
    """
    L, D = H_ell.modulus, H_dag.modulus
    if L * D != M or gcd(L, D) != 1:
        raise BadLevel(f"Level {M} is not the coprime product of {L} and {D}")
    C_ell = build_cartan(params, L)
    C_dag = build_cartan(params, D)
    # both factors must be index two in their Cartans
    for H, C in ((H_ell, C_ell), (H_dag, C_dag)):
        if not H.elements <= C.elements or 2 * H.order != C.order:
            raise DomainError(f"{H!r} is not an index-two subgroup of the Cartan mod {C.modulus}")

    # glue along the first pair outside each subgroup
    outside_ell = sorted(C_ell.elements - H_ell.elements)
    outside_dag = sorted(C_dag.elements - H_dag.elements)
    g_ell = Mat2.from_key(outside_ell[0], L)
    g_dag = Mat2.from_key(outside_dag[0], D)
    glued = crt_glue(H_ell, H_dag, [(g_ell, g_dag)])
    if not _check_glue(glued, H_ell, H_dag, C_ell, C_dag):
        raise InternalInvariantViolation(f"The first candidate pair fails the glue conditions at level {M}")

    # any other pair must land in the same group
    rng = rng or random.Random(M)
    count = settings.CM_ADELIC_GLUE_SAMPLE_PAIRS if sample_pairs is None else sample_pairs
    for _ in range(count):
        x = Mat2.from_key(rng.choice(outside_ell), L)
        y = Mat2.from_key(rng.choice(outside_dag), D)
        # <(x, y), H_ell x H_dag> has the order of ``glued``; containment is equality
        if crt_matrix(x, y).key not in glued.elements:
            raise InternalInvariantViolation(f"Candidate pair ({x}, {y}) generates a second group at level {M}")
    logger.debug(f"Glued Cartan image at {M}: {glued.order} elements")
    return SubgroupModN(M, glued.generators, ambient=Ambient.CARTAN, params=params, elements=glued.elements)


def conjugation_lift(c, N, M, params, lift_at_dagger=None):
    """
    (chi_N(c') Id) * L for a lift L of ``c`` to level M.

    L restricts to ``c`` mod ell^n and to ``lift_at_dagger`` (c_1 by default)
    mod N-dagger; chi_N is read off det(L) mod N-dagger.
    """
    if cartan_coordinates(c, params) is not None:
        raise DomainError(f"{c} lies in the Cartan subgroup")
    L_mod = c.modulus
    if M % L_mod:
        raise BadLevel(f"{L_mod} does not divide {M}")
    D = M // L_mod
    if D == 1:
        return c
    if lift_at_dagger is None:
        lift_at_dagger = c_eps(params, 1, D)
    if cartan_coordinates(lift_at_dagger, params) is not None:
        raise DomainError(f"{lift_at_dagger} lies in the Cartan subgroup")
    lift = crt_matrix(c, lift_at_dagger)
    chi = kronecker(fundamental_discriminant(N), lift_at_dagger.det())
    return lift * chi


def _non_cartan_generator(image, params):
    for g in image.generators:
        if cartan_coordinates(g, params) is None:
            return g
    raise InternalInvariantViolation(f"{image!r} has no generator outside the Cartan")


def ell_cartan_part(record, params):
    """Index-two Cartan subgroup mod ell^n used for twists of ``record``."""
    if record.ell == 2:
        return cartan_part(simplest_ell_adic_image(record.label), params)
    return squares_cartan_subgroup(params, record.ell, record.n)


def adelic_image(E, label=None):
    """
    Adelic image of a CM curve over Q at a level of definition.

    Raises:
        NotCM: j(E) is not a CM j-invariant.
        Unsupported: j(E) is 0 or 1728 and E is not simplest.
    """
    order = lookup_cm_order(E.j)
    if order is None:
        raise NotCM(f"j = {E.j} is not the j-invariant of a CM curve over Q")
    twist = twist_to_simplest(E)
    if twist.N == 1:
        return simplest_adelic_image(E, label=label)

    record = simplest_record(twist.simplest_label)
    params = order.params
    L, D = record.level, twist.N_dagger
    M = L * D
    logger.info(f"{E}: twist of {record.label} by {twist.N}, level {M}")

    H_ell = ell_cartan_part(record, params)
    H_dag = det_fixed_subgroup(build_cartan(params, D), a_subgroup(twist.N, D))
    cartan_image = cartan_image_glued(H_ell, H_dag, params, M)

    c = _non_cartan_generator(simplest_ell_adic_image(record.label), params)
    C_M = conjugation_lift(c, twist.N, M, params)
    image = extend_by_normalizing(cartan_image, C_M, ambient=Ambient.NORMALIZER, params=params)

    normalizer, _ = build_normalizer(params, M)
    index = subgroup_index(normalizer, image)
    if index != 2:
        raise InternalInvariantViolation(f"{E}: index {index} in the normalizer at {M}, expected 2")
    return _make_result(E, order, image, index, twist, False, label)


def twist_family(label, Ns):
    """
    Quadratic twists of a simplest curve by each N with gcd(ell, N-dagger) = 1.

    Returns:
        list: (N, WeierstrassCurve) pairs.
    """
    record = simplest_record(label)
    base = record_curve(record)
    family = []
    for N in Ns:
        if gcd(record.ell, n_dagger(N)) != 1:
            continue
        family.append((N, quadratic_twist(base, N)))
    return family
