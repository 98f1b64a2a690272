import numpy as np
import pytest

from exclust import SegmentedSeries


def random_series(rng, n_segments=3, seg_len=(50, 200), dist="frechet"):
    """Random segmented series for property checks."""
    segments = []
    for _ in range(n_segments):
        n = int(rng.integers(seg_len[0], seg_len[1] + 1))
        if dist == "frechet":
            segments.append(-1.0 / np.log(rng.random(n)))
        else:
            segments.append(rng.standard_normal(n))
    return SegmentedSeries(segments)


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)
