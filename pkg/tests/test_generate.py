import numpy as np
import pytest

from metricdim import rng
from metricdim.core import InvalidInputError, MetricKind
from metricdim.generate import Family, GeneratorSpec, generate


def test_same_spec_is_bit_identical():
    spec = GeneratorSpec(Family.UNIFORM_CUBE, 5, 300, seed=11)
    a, b = generate(spec), generate(spec)
    assert np.array_equal(a.points, b.points)
    assert a.metric == b.metric


def test_distinct_seeds_differ():
    a = generate(GeneratorSpec(Family.GAUSSIAN, 3, 10, seed=1))
    b = generate(GeneratorSpec(Family.GAUSSIAN, 3, 10, seed=2))
    assert not np.array_equal(a.points[0], b.points[0])


def test_point_substreams_extend_prefix():
    # growing n must not change the points already generated
    small = generate(GeneratorSpec(Family.UNIFORM_CUBE, 4, 50, seed=3))
    large = generate(GeneratorSpec(Family.UNIFORM_CUBE, 4, 80, seed=3))
    assert np.array_equal(large.points[:50], small.points)


def test_metrics_match_family():
    assert generate(GeneratorSpec(Family.UNIFORM_CUBE, 2, 5, 0)).metric.kind is MetricKind.EUCLIDEAN
    assert generate(GeneratorSpec(Family.GAUSSIAN, 2, 5, 0)).metric.kind is MetricKind.EUCLIDEAN
    assert generate(GeneratorSpec(Family.HAMMING_UNIFORM, 2, 5, 0)).metric.kind is MetricKind.HAMMING


@pytest.mark.parametrize("dim,count", [(0, 5), (3, 0)])
def test_invalid_spec_rejected(dim, count):
    with pytest.raises(InvalidInputError):
        GeneratorSpec(Family.UNIFORM_CUBE, dim, count, 0)


def test_uniform_cube_coordinate_means():
    # uniform mean 1/2; 3-sigma CLT band at n=100000 is about +/- 0.0027
    ds = generate(GeneratorSpec(Family.UNIFORM_CUBE, 3, 100_000, seed=42))
    means = ds.points.mean(axis=0)
    assert ((means > 0.49) & (means < 0.51)).all()
    assert ds.points.min() >= 0.0 and ds.points.max() < 1.0


def test_hamming_ones_fraction():
    ds = generate(GeneratorSpec(Family.HAMMING_UNIFORM, 64, 50_000, seed=42))
    frac = ds.points.mean()
    assert 0.495 < frac < 0.505


def test_gaussian_unit_variance():
    ds = generate(GeneratorSpec(Family.GAUSSIAN, 1, 100_000, seed=42))
    assert 0.98 < ds.points.var(ddof=1) < 1.02


def test_uniform_statistics_hold_across_seeds():
    for seed in (0, 1, 7):
        ds = generate(GeneratorSpec(Family.UNIFORM_CUBE, 2, 50_000, seed=seed))
        assert abs(ds.points.mean() - 0.5) < 0.01


_MASK = 0xFFFFFFFFFFFFFFFF


def _splitmix64_reference(state):
    """The published SplitMix64 step, in plain Python integers."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


class TestRngPlumbing:
    def test_raw_stream_matches_published_algorithm(self):
        # draw k of a stream must equal the k-th output of SplitMix64
        # seeded at the stream key; this pins cross-machine portability
        key = int(rng.stream_key(9, stream=4))
        state = key
        for k in range(20):
            state, expected = _splitmix64_reference(state)
            got = int(rng._raw(rng.stream_key(9, 4), [k])[0])
            assert got == expected

    def test_frozen_uniform_values(self):
        # regression freeze: changing these silently would break every
        # published CSV's reproducibility
        assert [repr(float(v)) for v in rng.uniform01(42, 3)] == [
            "0.6146409341949204",
            "0.45010882945711317",
            "0.20639215340029482",
        ]
        assert rng.derive_seed(42) == 12058926934050108962

    def test_matrix_rows_are_named_streams(self):
        m = rng.matrix_uniform01(42, 6, 9)
        for i in range(6):
            assert np.array_equal(m[i], rng.uniform01(42, 9, stream=i))

    def test_distinct_indices_prefix_property(self):
        short = rng.distinct_indices(5, 4, 100)
        long = rng.distinct_indices(5, 9, 100)
        assert np.array_equal(long[:4], short)
        assert len(set(long.tolist())) == 9

    def test_distinct_indices_full_range(self):
        assert sorted(rng.distinct_indices(0, 10, 10).tolist()) == list(range(10))

    def test_integers_within_bound(self):
        vals = rng.integers(9, 10_000, 7)
        assert vals.min() >= 0 and vals.max() < 7

    def test_derive_seed_differs_by_tag(self):
        assert rng.derive_seed(1, 2) != rng.derive_seed(1, 3)
        assert rng.derive_seed(1, 2, 3) != rng.derive_seed(1, 3, 2)
