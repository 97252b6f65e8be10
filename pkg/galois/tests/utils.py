from pathlib import Path

from galois.lmfdb import curve_from_label

FIXTURE_CACHE = Path(__file__).resolve().parent / 'fixtures' / 'lmfdb'


def labelled_curve(label):
    """Curve for a label from the embedded table or the fixture cache, offline."""
    curve, _ = curve_from_label(label, cache_dir=FIXTURE_CACHE, network=False)
    return curve
