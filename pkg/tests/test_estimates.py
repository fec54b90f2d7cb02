import numpy as np
import pytest

from pcal.errors import ValidationError
from pcal.estimates import ESTIMATES, corpus_signal, measure_constants, stability
from pcal.grid import GridSpec


def test_corpus_is_grid_independent():
    a = corpus_signal(GridSpec(8.0, 1024), np.random.default_rng(0))
    b = corpus_signal(GridSpec(8.0, 4096), np.random.default_rng(0))
    assert np.max(np.abs(a.values - b.values[::4])) < 1e-10


def test_corpus_needs_resolution():
    with pytest.raises(ValidationError):
        corpus_signal(GridSpec(8.0, 256), np.random.default_rng(0))


def test_measure_constants_deterministic_and_finite():
    a = measure_constants(1024, seed=1, n=4)
    b = measure_constants(1024, seed=1, n=4)
    assert a == b
    assert set(a) == set(ESTIMATES)
    assert all(np.isfinite(v) and v > 0 for v in a.values())


def test_subset_of_estimates():
    out = measure_constants(1024, n=3, names=["scaling"])
    assert list(out) == ["scaling"]


def test_constants_stable_across_grids():
    change = stability(measure_constants(1024, n=10), measure_constants(4096, n=10))
    assert max(change.values()) < 0.5


def test_stability():
    assert stability({"a": 2.0}, {"a": 3.0}) == {"a": 0.5}
