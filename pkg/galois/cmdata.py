"""
Embedded data: the 13 CM orders of class number one and the 40 simplest CM
curves with their ell-adic images.

The curve table ships as ``data/simplest_curves.txt`` (format documented at
the top of that file) and is validated when first loaded.
"""

import logging
import re
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

from pydantic import BaseModel, ConfigDict, ValidationError

from .cartan import CartanParams, build_normalizer, delta_phi, transport_subgroup
from .conf import settings
from .exceptions import DataIntegrityError, DomainError, GaloisImageError
from .matgl2 import Mat2, SubgroupModN, subgroup_index
from .modarith import n_exponent, prime_divisors

logger = logging.getLogger(__name__)

# (Delta_K, f, j)
CM_ORDERS = (
    (-3, 1, 0),
    (-3, 2, 54000),
    (-3, 3, -12288000),
    (-4, 1, 1728),
    (-4, 2, 287496),
    (-7, 1, -3375),
    (-7, 2, 16581375),
    (-8, 1, 8000),
    (-11, 1, -32768),
    (-19, 1, -884736),
    (-43, 1, -884736000),
    (-67, 1, -147197952000),
    (-163, 1, -262537412640768000),
)

EXPECTED_CLASS_SIZES = {
    -3: 6, -12: 2, -27: 2, -4: 8, -16: 4, -7: 2, -28: 2, -8: 4,
    -11: 2, -19: 2, -43: 2, -67: 2, -163: 2,
}

LABEL_RE = re.compile(r'^\d+\.[a-z]+\d+$')


class CMOrderRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    Delta_K: int
    f: int
    disc: int
    j: int
    ell: int
    params: CartanParams
    d_E: int


class SimplestCurveRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    label: str
    disc: int
    ell: int
    n: int
    A: int
    B: int
    conductor: int
    basis: str
    ell_adic_gens: tuple[tuple[int, int, int, int], ...]

    @property
    def level(self):
        return self.ell ** self.n


def short_j(A, B):
    """j-invariant of y^2 = x^3 + A x + B."""
    denominator = 4 * A ** 3 + 27 * B ** 2
    if denominator == 0:
        raise DomainError(f"y^2 = x^3 + {A}x + {B} is singular")
    return Fraction(1728 * 4 * A ** 3, denominator)


def _max_index(j):
    if j == 0:
        return 6
    if j == 1728:
        return 4
    return 2


def _build_orders():
    orders = []
    for Delta_K, f, j in CM_ORDERS:
        (ell,) = prime_divisors(Delta_K)
        orders.append(CMOrderRecord(
            Delta_K=Delta_K,
            f=f,
            disc=Delta_K * f * f,
            j=j,
            ell=ell,
            params=delta_phi(Delta_K, f),
            d_E=_max_index(j),
        ))
    return tuple(orders)


ORDERS = _build_orders()
_ORDERS_BY_DISC = {order.disc: order for order in ORDERS}
_ORDERS_BY_J = {order.j: order for order in ORDERS}


def lookup_cm_order(j):
    """The CM order with rational j-invariant j, or None."""
    j = Fraction(j)
    if j.denominator != 1:
        return None
    return _ORDERS_BY_J.get(j.numerator)


def cm_order_for_disc(disc):
    try:
        return _ORDERS_BY_DISC[disc]
    except KeyError:
        raise DomainError(f"{disc} is not the discriminant of a class number one CM order") from None


def _parse_matrix(text, N, line_no):
    try:
        entries = tuple(int(x) % N for x in text.split(','))
    except ValueError:
        raise DataIntegrityError(f"line {line_no}: bad matrix {text!r}") from None
    if len(entries) != 4:
        raise DataIntegrityError(f"line {line_no}: matrix {text!r} needs four entries")
    return entries


def parse_table(text):
    """Parse the table text into SimplestCurveRecord objects (no group checks)."""
    records = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        fields = line.split()
        if len(fields) != 9:
            raise DataIntegrityError(f"line {line_no}: expected 9 fields, found {len(fields)}")
        label, disc, ell, n, A, B, conductor, basis, gens = fields
        if not LABEL_RE.match(label):
            raise DataIntegrityError(f"line {line_no}: malformed label {label!r}")
        if basis not in ('working', 'phi0'):
            raise DataIntegrityError(f"line {line_no}: unknown basis {basis!r}")
        try:
            ell_i, n_i = int(ell), int(n)
            modulus = ell_i ** n_i
            record = SimplestCurveRecord(
                label=label,
                disc=int(disc),
                ell=ell_i,
                n=n_i,
                A=int(A),
                B=int(B),
                conductor=int(conductor),
                basis=basis,
                ell_adic_gens=tuple(_parse_matrix(g, modulus, line_no) for g in gens.split(';')),
            )
        except (ValueError, ValidationError) as e:
            raise DataIntegrityError(f"line {line_no}: {e}") from None
        records.append(record)
    return records


def _image_of(record, order):
    N = record.level
    gens = [Mat2.from_tuple(g, N) for g in record.ell_adic_gens]
    group = SubgroupModN(N, gens, params=order.params)
    if record.basis == 'phi0':
        group = transport_subgroup(group, 'from_phi0', order.params)
    return group


def validate_record(record, check_groups=True):
    """
    Load-time invariants of one record.

    Raises:
        DataIntegrityError: On the first violated invariant.
    """
    order = _ORDERS_BY_DISC.get(record.disc)
    if order is None:
        raise DataIntegrityError(f"{record.label}: unknown discriminant {record.disc}")
    if record.ell != order.ell:
        raise DataIntegrityError(f"{record.label}: ell {record.ell} does not divide Delta_K {order.Delta_K}")
    try:
        j = short_j(record.A, record.B)
    except DomainError as e:
        raise DataIntegrityError(f"{record.label}: {e}") from None
    if j != order.j:
        raise DataIntegrityError(f"{record.label}: model has j = {j}, expected {order.j}")
    if record.n != n_exponent(order.j, order.ell):
        raise DataIntegrityError(f"{record.label}: n = {record.n} disagrees with the exponent table")
    if record.disc == -12:
        if record.conductor != 36:
            raise DataIntegrityError(f"{record.label}: conductor must be 36")
    elif prime_divisors(record.conductor) != [record.ell]:
        raise DataIntegrityError(f"{record.label}: conductor {record.conductor} is not a power of {record.ell}")
    if record.basis == 'phi0' and record.ell == 2:
        raise DataIntegrityError(f"{record.label}: the phi0 basis needs an odd prime")
    if not check_groups:
        return None
    try:
        image = _image_of(record, order)
        normalizer, _ = build_normalizer(order.params, record.level)
        index = subgroup_index(normalizer, image)
    except GaloisImageError as e:
        raise DataIntegrityError(f"{record.label}: {e}") from None
    if index != order.d_E:
        raise DataIntegrityError(
            f"{record.label}: image has index {index} in the normalizer, expected {order.d_E}"
        )
    return image


class SimplestTable:
    """Validated, read-only view of the simplest-curve records."""

    def __init__(self, records, images=None):
        self.records = tuple(records)
        self.by_label = {r.label: r for r in self.records}
        if len(self.by_label) != len(self.records):
            raise DataIntegrityError("duplicate labels in the simplest-curve table")
        self.by_disc = {}
        for r in self.records:
            self.by_disc.setdefault(r.disc, []).append(r)
        sizes = {disc: len(rows) for disc, rows in self.by_disc.items()}
        if sizes != EXPECTED_CLASS_SIZES:
            raise DataIntegrityError(f"class sizes {sizes} do not match {EXPECTED_CLASS_SIZES}")
        self._images = dict(images or {})

    def __len__(self):
        return len(self.records)

    def image(self, label):
        if label not in self._images:
            record = self.by_label[label]
            self._images[label] = _image_of(record, _ORDERS_BY_DISC[record.disc])
        return self._images[label]


@lru_cache(maxsize=4)
def _load(path, check_groups):
    text = Path(path).read_text()
    records = parse_table(text)
    images = {}
    for record in records:
        image = validate_record(record, check_groups=check_groups)
        if image is not None:
            images[record.label] = image
    table = SimplestTable(records, images)
    logger.info(f"Loaded {len(table)} simplest curves from {path}")
    return table


def load_table(path=None, check_groups=True):
    return _load(str(path or settings.CM_ADELIC_DATA_FILE), check_groups)


def simplest_curves_for(disc):
    cm_order_for_disc(disc)
    return list(load_table().by_disc[disc])


def all_simplest_curves():
    return list(load_table().records)


def simplest_record(label):
    try:
        return load_table().by_label[label]
    except KeyError:
        raise DomainError(f"{label} is not a simplest CM curve") from None


def simplest_ell_adic_image(label):
    """Mod ell^n reduction of the ell-adic image, in the working basis."""
    simplest_record(label)
    return load_table().image(label)
