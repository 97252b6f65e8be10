"""
Checks of a computed image against data the algorithm never looks at:
Frobenius traces, the entanglement index pattern, conjugacy versus
isomorphism, determinants and the primes of the level.
"""

import logging
from math import gcd

from pydantic import BaseModel, ConfigDict
from sympy import primerange

from .adelic import adelic_image
from .cartan import a_subgroup, build_cartan, build_normalizer, cartan_coordinates, cartan_part
from .conf import settings
from .curves import ap_trace, is_isomorphic_Q
from .exceptions import (
    BadLevel,
    BadPrime,
    DeterminantMismatch,
    DifferentiationMismatch,
    EntanglementMismatch,
    FrobeniusMismatch,
    LevelSupportMismatch,
)
from .matgl2 import distinguish, preimage_subgroup, reduce_subgroup
from .modarith import kronecker, n_dagger, prime_divisors, squarefree_part, units

logger = logging.getLogger(__name__)


class FrobeniusReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int
    prime_bound: int
    primes_checked: int
    mismatches: tuple[int, ...]
    supersingular_primes: int
    supersingular_mismatches: tuple[int, ...]
    classes_hit: int
    classes_total: int

    @property
    def coverage(self):
        return self.classes_hit / self.classes_total if self.classes_total else 1.0

    @property
    def ok(self):
        return not self.mismatches and not self.supersingular_mismatches


class EntanglementReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    skipped: bool
    level: int
    ell_level: int | None = None
    dagger_level: int | None = None
    # Cartan indices at level, ell^n, N-dagger
    pattern: tuple[int, int, int] | None = None


class DifferentiationReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int
    verdict: str
    reason: str
    isomorphic: bool
    witness: tuple[int, int, int, int] | None = None
    cartan_preserved: bool | None = None


class DeterminantReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int
    surjective: bool
    cartan_matches_character: bool


class PrimeSupportReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    level: int
    minimal_level: int
    level_primes: tuple[int, ...]
    minimal_primes: tuple[int, ...]


def check_frobenius(E, group, params, prime_bound=None):
    """
    Every good prime p not dividing the level must meet an element of
    ``group`` with trace a_p and determinant p.

    Returns:
        FrobeniusReport: Mismatches are reported, not raised.
    """
    bound = prime_bound or settings.CM_ADELIC_DEFAULT_PRIME_BOUND
    M = group.modulus
    pairs = group.trace_det_pairs()
    outside = {
        ((a + d) % M, (a * d - b * c) % M)
        for a, b, c, d in group.tuples()
        if c != (params.delta * b) % M or a != (d + params.phi * b) % M
    }
    hit = set()
    mismatches, supersingular_bad = [], []
    checked = supersingular = 0
    for p in primerange(2, bound + 1):
        if M % p == 0:
            continue
        try:
            a_p = ap_trace(E, p)
        except BadPrime:
            continue
        checked += 1
        pair = (a_p % M, p % M)
        if pair in pairs:
            hit.add(pair)
        else:
            logger.warning(f"{E}: Frobenius at {p} has trace {a_p}, no element mod {M} matches")
            mismatches.append(p)
        if kronecker(params.discriminant, p) == -1:
            supersingular += 1
            if a_p != 0 or (0, p % M) not in outside:
                supersingular_bad.append(p)
    return FrobeniusReport(
        level=M,
        prime_bound=bound,
        primes_checked=checked,
        mismatches=tuple(mismatches),
        supersingular_primes=supersingular,
        supersingular_mismatches=tuple(supersingular_bad),
        classes_hit=len(hit),
        classes_total=len(pairs),
    )


def frobenius_consistency(E, result, prime_bound=None):
    """
    Raises:
        FrobeniusMismatch: Some prime has no matching element.
    """
    report = check_frobenius(E, result.image, result.params, prime_bound)
    if not report.ok:
        raise FrobeniusMismatch(
            f"{E}: Frobenius mismatches at {list(report.mismatches + report.supersingular_mismatches)}",
            report=report,
        )
    logger.info(f"{E}: {report.primes_checked} primes agree, coverage {report.coverage:.0%}")
    return report


def _cartan_index(G, params, d):
    return build_cartan(params, d).order // reduce_subgroup(G, d).order


def entanglement_check(E, datum, result):
    """
    The Cartan part has index 2 at the level but index 1 at ell^n and at
    N-dagger separately.

    Raises:
        EntanglementMismatch: The pattern is not (2, 1, 1).
    """
    M = result.level
    if datum.N == 1:
        return EntanglementReport(skipped=True, level=M)
    D = datum.N_dagger
    L = M // D
    cartan = cartan_part(result.image, result.params)
    pattern = (
        _cartan_index(cartan, result.params, M),
        _cartan_index(cartan, result.params, L),
        _cartan_index(cartan, result.params, D),
    )
    report = EntanglementReport(skipped=False, level=M, ell_level=L, dagger_level=D, pattern=pattern)
    if pattern != (2, 1, 1):
        raise EntanglementMismatch(f"{E}: Cartan index pattern {pattern} at ({M}, {L}, {D})", report=report)
    return report


def image_at(result, d):
    """G_{E,d}: a reduction when d divides the level, else a preimage."""
    M = result.level
    if M % d == 0:
        return reduce_subgroup(result.image, d)
    top = M * d // gcd(M, d)
    normalizer, _ = build_normalizer(result.params, top)
    lifted = preimage_subgroup(result.image, top, normalizer)
    return reduce_subgroup(lifted, d)


def differentiation_check(E, F, level=None, cap=None):
    """
    Conjugacy of the images at ``level`` must agree with isomorphism over Q.

    Raises:
        DifferentiationMismatch: A definite verdict contradicts isomorphism.
        BadLevel: The curves have different CM orders.
    """
    first, second = adelic_image(E), adelic_image(F)
    if first.cm.disc != second.cm.disc:
        raise BadLevel(f"{E} and {F} have different CM orders")
    if level is None:
        level = first.level * second.level // gcd(first.level, second.level)
    G, H = image_at(first, level), image_at(second, level)
    verdict = distinguish(G, H, cap=cap)
    isomorphic = is_isomorphic_Q(E, F)

    preserved = None
    witness = None
    if verdict.witness is not None:
        B = verdict.witness
        witness = B.entries
        target = cartan_part(H, first.params).elements
        B_inv = B.inverse()
        preserved = all((B * g * B_inv).key in target for g in cartan_part(G, first.params).generators)
    report = DifferentiationReport(
        level=level,
        verdict=verdict.verdict,
        reason=verdict.reason,
        isomorphic=isomorphic,
        witness=witness,
        cartan_preserved=preserved,
    )
    if verdict.verdict == 'inconclusive':
        logger.info(f"Conjugacy of {E} and {F} at {level} is inconclusive")
        return report
    if (verdict.verdict == 'conjugate') != isomorphic:
        raise DifferentiationMismatch(
            f"{E} and {F}: {verdict.verdict} at {level} but isomorphic={isomorphic}", report=report
        )
    return report


def determinant_check(result):
    """
    det is onto (Z/MZ)^x, and an element lies in the Cartan exactly when its
    determinant fixes sqrt(Delta_K).

    Raises:
        DeterminantMismatch
    """
    M = result.level
    G = result.image
    params = result.params
    surjective = G.determinants() == set(units(M)) if M > 1 else True
    field, _ = squarefree_part(result.cm.Delta_K)
    fixed = a_subgroup(field, M) if M % n_dagger(field) == 0 else None
    matches = True
    if fixed is not None and M > 2:
        for g in G.matrices():
            in_cartan = cartan_coordinates(g, params) is not None
            if in_cartan != (g.det() in fixed):
                matches = False
                break
    report = DeterminantReport(level=M, surjective=surjective, cartan_matches_character=matches)
    if not (surjective and matches):
        raise DeterminantMismatch(f"Determinant check failed at level {M}", report=report)
    return report


def prime_support_check(result):
    """
    Raises:
        LevelSupportMismatch: minimal level and level have different primes.
    """
    report = PrimeSupportReport(
        level=result.level,
        minimal_level=result.minimal_level,
        level_primes=tuple(prime_divisors(result.level)),
        minimal_primes=tuple(prime_divisors(result.minimal_level)),
    )
    if report.level_primes != report.minimal_primes:
        raise LevelSupportMismatch(
            f"Minimal level {result.minimal_level} and level {result.level} have different primes",
            report=report,
        )
    return report
