"""Application settings with overridable defaults (``CM_ADELIC_*``)."""

from pathlib import Path

from appconf import AppConf
from django.conf import settings

__all__ = ['settings', 'GaloisConf']


class GaloisConf(AppConf):
    # Largest subgroup closure() will materialize.
    CLOSURE_CAP = 2 ** 26
    # Largest |GL2(Z/NZ)| a full conjugacy scan may enumerate.
    CONJUGACY_SEARCH_CAP = 2 ** 21

    CACHE_DIR = str(Path(__file__).resolve().parent.parent / 'data' / 'lmfdb')
    NETWORK = True
    LMFDB_API_URL = 'https://www.lmfdb.org/api/ec_curvedata/'
    LMFDB_TIMEOUT = 10

    DEFAULT_PRIME_BOUND = 2000
    AP_PRIME_LIMIT = 10 ** 5
    GLUE_SAMPLE_PAIRS = 10

    DATA_FILE = str(Path(__file__).resolve().parent / 'data' / 'simplest_curves.txt')

    class Meta:
        prefix = 'cm_adelic'
