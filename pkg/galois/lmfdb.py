"""Client for the LMFDB elliptic-curve API with an on-disk JSON cache."""

import json
import logging
import os
import tempfile
from pathlib import Path

import requests
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from .cmdata import LABEL_RE, load_table
from .conf import settings
from .curves import WeierstrassCurve, record_curve
from .exceptions import CurveParseError, DomainError, LMFDBUnavailable

logger = logging.getLogger(__name__)


class CurveDataRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    lmfdb_label: str
    ainvs: tuple[int, int, int, int, int]
    conductor: int

    @field_validator('ainvs', mode='before')
    @classmethod
    def coerce_ainvs(cls, value):
        if isinstance(value, str):
            value = json.loads(value)
        return tuple(int(a) for a in value)


def _cache_path(label, cache_dir):
    return Path(cache_dir or settings.CM_ADELIC_CACHE_DIR) / f"{label}.json"


def _read_cache(path):
    try:
        return CurveDataRecord.model_validate_json(path.read_text())
    except FileNotFoundError:
        return None
    except ValidationError as e:
        logger.warning(f"Ignoring unreadable cache file {path}: {e}")
        return None


def _write_cache(path, record):
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile('w', dir=path.parent, suffix='.tmp', delete=False) as handle:
        handle.write(json.dumps(record.model_dump(mode='json'), sort_keys=True))
        temp_name = handle.name
    os.replace(temp_name, path)


def _download(label):
    url = settings.CM_ADELIC_LMFDB_API_URL
    params = {
        'lmfdb_label': label,
        '_format': 'json',
        '_fields': 'lmfdb_label,ainvs,conductor',
    }
    logger.info(f"Fetching {label} from {url}")
    try:
        response = requests.get(url, params=params, timeout=settings.CM_ADELIC_LMFDB_TIMEOUT)
        response.raise_for_status()
        rows = response.json().get('data') or []
    except requests.exceptions.ConnectionError:
        logger.error(f"Connection error fetching {label}")
        raise LMFDBUnavailable(f"Could not connect to {url}") from None
    except requests.exceptions.Timeout:
        logger.error(f"Timeout fetching {label}")
        raise LMFDBUnavailable(f"Request for {label} timed out") from None
    except requests.exceptions.HTTPError as e:
        logger.error(f"HTTP error fetching {label}: {e}")
        raise LMFDBUnavailable(f"LMFDB answered {e.response.status_code} for {label}") from None
    except ValueError:
        raise LMFDBUnavailable(f"LMFDB returned a malformed response for {label}") from None
    if not rows:
        raise LMFDBUnavailable(f"LMFDB has no curve labelled {label}")
    try:
        return CurveDataRecord.model_validate(rows[0])
    except ValidationError as e:
        raise LMFDBUnavailable(f"Unexpected LMFDB record for {label}: {e}") from None


def fetch_curve(label, cache_dir=None, network=None):
    """
    Curve data for an LMFDB label, from the cache or the API.

    Raises:
        CurveParseError: The label is malformed.
        LMFDBUnavailable: Not cached and the network is off or failed.
    """
    if not LABEL_RE.match(label or ''):
        raise CurveParseError(f"{label!r} is not an LMFDB curve label")
    path = _cache_path(label, cache_dir)
    record = _read_cache(path)
    if record is not None:
        logger.debug(f"Cache hit for {label}")
        return record

    if network is None:
        network = settings.CM_ADELIC_NETWORK
    if not network:
        raise LMFDBUnavailable(f"{label} is not cached in {path.parent} and the network is disabled")
    record = _download(label)
    _write_cache(path, record)
    return record


def curve_from_label(label, cache_dir=None, network=None):
    """
    Returns:
        tuple: (WeierstrassCurve, label). Simplest curves come from the
        embedded table without touching the cache.
    """
    table = load_table()
    if label in table.by_label:
        return record_curve(table.by_label[label]), label
    record = fetch_curve(label, cache_dir=cache_dir, network=network)
    try:
        return WeierstrassCurve.from_ainvs(record.ainvs), label
    except DomainError as e:
        raise LMFDBUnavailable(f"LMFDB data for {label} is unusable: {e}") from None
